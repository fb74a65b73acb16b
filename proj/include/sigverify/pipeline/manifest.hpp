#pragma once

// Dataset manifests: a line-oriented description of users and their
// signature images.
//
//   # comment
//   dataset CEDAR
//   dpi 300
//   references 10
//   user 001
//   genuine full_org/original_1_*.png
//   forgery full_forg/forgeries_1_*.png
//
// Paths are relative to the manifest's directory. The last path component
// may contain shell wildcards; matches are ordered naturally (digit runs
// compare by value), so original_2 precedes original_10. Signature ids are
// "<user>:g<k>" and "<user>:f<k>", k counting from 1.

#include <fnmatch.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sigverify/errors.hpp"
#include "sigverify/eval.hpp"
#include "sigverify/text_format.hpp"

namespace sigverify {

struct SignatureEntry {
  std::string id;
  std::string path;
};

struct ManifestUser {
  std::string id;
  std::vector<SignatureEntry> genuine;
  std::vector<SignatureEntry> forgeries;
};

struct DatasetManifest {
  std::string name;
  int dpi = 0;
  int references = 10;
  std::vector<ManifestUser> users;

  std::vector<const SignatureEntry*> all_signatures() const {
    std::vector<const SignatureEntry*> out;
    for (const auto& u : users) {
      for (const auto& s : u.genuine) out.push_back(&s);
      for (const auto& s : u.forgeries) out.push_back(&s);
    }
    return out;
  }

  std::vector<UserSignatures> signature_ids() const {
    std::vector<UserSignatures> out;
    for (const auto& u : users) {
      UserSignatures s{u.id, {}, {}};
      for (const auto& g : u.genuine) s.genuine.push_back(g.id);
      for (const auto& f : u.forgeries) s.forgeries.push_back(f.id);
      out.push_back(std::move(s));
    }
    return out;
  }

  TrialPlan trials() const { return build_trials(signature_ids(), references); }
};

/// a < b with digit runs compared numerically.
inline bool natural_less(const std::string& a, const std::string& b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (std::isdigit(static_cast<unsigned char>(a[i])) && std::isdigit(static_cast<unsigned char>(b[j]))) {
      std::size_t i2 = i, j2 = j;
      while (i2 < a.size() && std::isdigit(static_cast<unsigned char>(a[i2]))) ++i2;
      while (j2 < b.size() && std::isdigit(static_cast<unsigned char>(b[j2]))) ++j2;
      auto strip = [](std::string_view s) {
        const auto nz = s.find_first_not_of('0');
        return nz == std::string_view::npos ? std::string_view{} : s.substr(nz);
      };
      const auto da = strip(std::string_view(a).substr(i, i2 - i));
      const auto db = strip(std::string_view(b).substr(j, j2 - j));
      if (da.size() != db.size()) return da.size() < db.size();
      if (da != db) return da < db;
      i = i2;
      j = j2;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  if (a.size() - i != b.size() - j) return a.size() - i < b.size() - j;
  return a < b;
}

namespace detail {

inline bool has_wildcard(const std::string& s) { return s.find_first_of("*?[") != std::string::npos; }

/// Expands a path whose last component may hold wildcards. Missing literal
/// files are reported, not dropped.
inline std::vector<std::string> expand_pattern(const std::filesystem::path& base, const std::string& pattern,
                                               std::vector<std::string>& problems) {
  namespace fs = std::filesystem;
  const fs::path full = base / pattern;
  const std::string leaf = full.filename().string();
  if (has_wildcard(full.parent_path().string())) {
    problems.push_back("wildcards are only supported in the file name: " + pattern);
    return {};
  }
  if (!has_wildcard(leaf)) {
    if (!fs::is_regular_file(full)) problems.push_back("missing file: " + full.string());
    return {full.lexically_normal().string()};
  }
  std::vector<std::string> names;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(full.parent_path(), ec)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename().string();
    if (fnmatch(leaf.c_str(), name.c_str(), 0) == 0) names.push_back(name);
  }
  if (ec) problems.push_back("cannot list directory " + full.parent_path().string() + ": " + ec.message());
  std::sort(names.begin(), names.end(), natural_less);
  if (names.empty() && !ec) problems.push_back("pattern matches no files: " + full.string());
  std::vector<std::string> out;
  for (const auto& n : names) out.push_back((full.parent_path() / n).lexically_normal().string());
  return out;
}

inline std::string signature_id(const std::string& user, char kind, std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%c%03zu", kind, index + 1);
  return user + ":" + buf;
}

}  // namespace detail

/// Parses and validates a manifest. All problems are collected and reported
/// together in one DataError.
inline DatasetManifest parse_manifest(const std::string& text, const std::filesystem::path& base_dir) {
  DatasetManifest m;
  std::vector<std::string> problems;
  std::map<std::string, std::vector<std::string>> genuine, forgeries;
  std::vector<std::string> order;
  std::string current;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = std::string(trim(raw));
    if (line.empty() || line[0] == '#') continue;
    const auto space = line.find_first_of(" \t");
    const std::string key = line.substr(0, space);
    const std::string value = space == std::string::npos ? "" : std::string(trim(line.substr(space)));
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (value.empty()) throw FormatError(where + "missing value for '" + key + "'");
    if (key == "dataset") {
      m.name = value;
    } else if (key == "dpi") {
      m.dpi = int(parse_int(value));
    } else if (key == "references") {
      m.references = int(parse_int(value));
    } else if (key == "user") {
      if (value.find_first_of(":, \t") != std::string::npos) throw FormatError(where + "user ids may not contain ':', ',' or spaces");
      if (genuine.count(value)) throw FormatError(where + "duplicate user " + value);
      current = value;
      order.push_back(value);
      genuine[value];
      forgeries[value];
    } else if (key == "genuine" || key == "forgery") {
      if (current.empty()) throw FormatError(where + "'" + key + "' before any 'user'");
      auto paths = detail::expand_pattern(base_dir, value, problems);
      auto& dst = key == "genuine" ? genuine[current] : forgeries[current];
      dst.insert(dst.end(), paths.begin(), paths.end());
    } else {
      throw FormatError(where + "unknown key '" + key + "'");
    }
  }
  if (order.empty()) throw FormatError("manifest lists no users");
  if (m.references < 2) problems.push_back("references must be at least 2");
  for (const auto& id : order) {
    ManifestUser u{id, {}, {}};
    const auto& g = genuine[id];
    const auto& f = forgeries[id];
    for (std::size_t k = 0; k < g.size(); ++k) u.genuine.push_back({detail::signature_id(id, 'g', k), g[k]});
    for (std::size_t k = 0; k < f.size(); ++k) u.forgeries.push_back({detail::signature_id(id, 'f', k), f[k]});
    if (int(g.size()) <= m.references) {
      problems.push_back("user " + id + " has " + std::to_string(g.size()) + " genuine signatures, needs more than " +
                         std::to_string(m.references));
    }
    m.users.push_back(std::move(u));
  }
  if (!problems.empty()) {
    std::string msg = "invalid manifest:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw DataError(msg);
  }
  return m;
}

inline DatasetManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read manifest " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str(), std::filesystem::absolute(path).parent_path());
}

inline nlohmann::json manifest_to_json(const DatasetManifest& m) {
  nlohmann::json j;
  j["dataset"] = m.name;
  j["dpi"] = m.dpi;
  j["references"] = m.references;
  j["users"] = nlohmann::json::array();
  for (const auto& u : m.users) {
    nlohmann::json ju;
    ju["id"] = u.id;
    for (const auto* kind : {"genuine", "forgeries"}) {
      const auto& list = std::string(kind) == "genuine" ? u.genuine : u.forgeries;
      ju[kind] = nlohmann::json::array();
      for (const auto& s : list) ju[kind].push_back({{"id", s.id}, {"path", s.path}});
    }
    j["users"].push_back(std::move(ju));
  }
  return j;
}

}  // namespace sigverify

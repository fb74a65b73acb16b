#pragma once

// Content-addressed artifact cache.
//
//   <root>/manifest.json
//   <root>/skeletons/<key>.pgm
//   <root>/graphs/<key>.graph
//   <root>/models/<key>.model
//   <root>/matrices/<system>/<user>.csv     (+ .partial while in progress)
//   <root>/reports/
//
// A skeleton key hashes the image bytes with the preprocessing parameters;
// graph and model keys extend it with their own parameters only, so changing
// D_GED leaves models valid and vice versa.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>

#include "sigverify/errors.hpp"
#include "sigverify/pipeline/config.hpp"
#include "sigverify/text_format.hpp"

namespace sigverify {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes via a temporary sibling and rename, so readers never observe a
/// partial file.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  static std::atomic<unsigned> counter{0};
  std::filesystem::create_directories(path.parent_path());
  std::ostringstream tmp_name;
  tmp_name << path.filename().string() << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id()) << '.'
           << counter++;
  const auto tmp = path.parent_path() / tmp_name.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << contents;
    if (!out.flush()) throw IoError("cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("cannot rename into " + path.string() + ": " + ec.message());
  }
}

inline std::string preprocess_signature(const RunConfig& c) {
  std::string s = "sigma_narrow=" + format_double(c.preprocess.sigma_narrow) +
                  ";sigma_wide=" + format_double(c.preprocess.sigma_wide) + ";threshold=" +
                  (c.preprocess.threshold ? std::to_string(*c.preprocess.threshold) : std::string("auto")) +
                  ";scale=" + format_double(c.scale);
  return s;
}

inline std::string graph_signature(const RunConfig& c) { return "d_ged=" + format_double(c.d_ged); }

inline std::string model_signature(const RunConfig& c) {
  return "d_inkball=" + format_double(c.d_inkball) + ";augmented=" + (c.match.augmented ? "1" : "0");
}

inline std::string ged_match_signature(const RunConfig& c) {
  return "c_node=" + format_double(c.cost.c_node) + ";c_edge=" + format_double(c.cost.c_edge) +
         ";method=" + to_string(c.ged_method);
}

inline std::string inkball_match_signature(const RunConfig& c) {
  return "lambda=" + format_double(c.match.lambda) + ";tau=" + format_double(c.match.tau) +
         ";w_alpha=" + format_double(c.match.w_alpha) + ";augmented=" + (c.match.augmented ? "1" : "0");
}

class ArtifactCache {
 public:
  explicit ArtifactCache(std::filesystem::path root) : root_(std::move(root)) {}

  const std::filesystem::path& root() const { return root_; }

  std::filesystem::path manifest_path() const { return root_ / "manifest.json"; }
  std::filesystem::path skeleton_path(const std::string& key) const { return root_ / "skeletons" / (key + ".pgm"); }
  std::filesystem::path graph_path(const std::string& key) const { return root_ / "graphs" / (key + ".graph"); }
  std::filesystem::path model_path(const std::string& key) const { return root_ / "models" / (key + ".model"); }
  std::filesystem::path matrix_path(const std::string& system, const std::string& user) const {
    return root_ / "matrices" / system / (user + ".csv");
  }
  std::filesystem::path journal_path(const std::string& system, const std::string& user) const {
    return root_ / "matrices" / system / (user + ".partial");
  }
  std::filesystem::path reports_dir() const { return root_ / "reports"; }

  static std::string skeleton_key(const std::string& image_bytes, const RunConfig& c) {
    return Fnv1a().add(image_bytes).add("|").add(preprocess_signature(c)).hex();
  }
  static std::string graph_key(const std::string& skeleton_key, const RunConfig& c) {
    return Fnv1a().add(skeleton_key).add("|").add(graph_signature(c)).hex();
  }
  static std::string model_key(const std::string& skeleton_key, const RunConfig& c) {
    return Fnv1a().add(skeleton_key).add("|").add(model_signature(c)).hex();
  }

 private:
  std::filesystem::path root_;
};

/// Cache directory: an explicit choice wins, then SIGVERIFY_CACHE, then the
/// config value.
inline std::string resolve_cache_dir(const RunConfig& c, const std::string& explicit_dir = {}) {
  if (!explicit_dir.empty()) return explicit_dir;
  if (const char* env = std::getenv("SIGVERIFY_CACHE"); env && *env) return env;
  return c.cache_dir;
}

}  // namespace sigverify

#pragma once

// User-normalized verification scores and GED/inkball score fusion.
//
// With reference set R and raw dissimilarity d,
//   delta(R)   = avg_{R in R} min_{S in R \ R} d(R, S)
//   score(R,T) = min_{R in R} d(R, T) / delta(R)
// and for the multiple classifier system each pair score d(R,T)/delta(R) is
// z-normalized with dataset statistics of the leave-one-out reference
// minima before the weighted sum, the minimum being taken last.

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sigverify/errors.hpp"
#include "sigverify/text_format.hpp"

namespace sigverify {

struct ReferenceSet {
  std::string user;
  std::vector<std::string> references;

  void validate() const {
    if (references.size() < 2) {
      throw ProtocolError("user " + user + " needs at least two references for the baseline");
    }
  }
};

/// Raw dissimilarities d(reference, test) for one system and user.
class ScoreMatrix {
 public:
  ScoreMatrix() = default;
  ScoreMatrix(std::string system, std::string user, std::string params_hash = {})
      : system_(std::move(system)), user_(std::move(user)), params_hash_(std::move(params_hash)) {}

  const std::string& system() const { return system_; }
  const std::string& user() const { return user_; }
  const std::string& params_hash() const { return params_hash_; }

  void set(const std::string& reference, const std::string& test, double d) {
    if (!(d >= 0.0)) throw DataError("dissimilarities must be nonnegative: " + reference + "," + test);
    entries_[{reference, test}] = d;
  }
  bool contains(const std::string& reference, const std::string& test) const {
    return entries_.count({reference, test}) != 0;
  }
  double at(const std::string& reference, const std::string& test) const {
    auto it = entries_.find({reference, test});
    if (it == entries_.end()) {
      throw DataError("missing " + system_ + " distance for pair (" + reference + ", " + test + ")");
    }
    return it->second;
  }
  std::size_t size() const { return entries_.size(); }
  const std::map<std::pair<std::string, std::string>, double>& entries() const { return entries_; }

  /// Every entry multiplied by k.
  ScoreMatrix scaled(double k) const {
    ScoreMatrix out(system_, user_, params_hash_);
    for (const auto& [key, d] : entries_) out.entries_[key] = d * k;
    return out;
  }

  friend bool operator==(const ScoreMatrix&, const ScoreMatrix&) = default;

 private:
  std::string system_, user_, params_hash_;
  std::map<std::pair<std::string, std::string>, double> entries_;
};

// CSV layout:
//   # system <tag>
//   # user <id>
//   # params <hash>
//   reference_id,test_id,distance
//   <reference>,<test>,<value>      (sorted by reference, then test)

inline void write_score_matrix(std::ostream& out, const ScoreMatrix& m) {
  out << "# system " << m.system() << '\n';
  out << "# user " << m.user() << '\n';
  out << "# params " << m.params_hash() << '\n';
  out << "reference_id,test_id,distance\n";
  for (const auto& [key, d] : m.entries()) out << key.first << ',' << key.second << ',' << format_double(d) << '\n';
}

inline ScoreMatrix read_score_matrix(std::istream& in) {
  auto header = [&](std::string_view key) {
    std::string line;
    const std::string prefix = "# " + std::string(key);
    if (!std::getline(in, line) || line.rfind(prefix, 0) != 0) {
      throw FormatError("score matrix: expected '" + prefix + "' header");
    }
    return std::string(trim(line.substr(prefix.size())));
  };
  const auto system = header("system");
  const auto user = header("user");
  const auto params = header("params");
  ScoreMatrix m(system, user, params);
  std::string line;
  if (!std::getline(in, line) || trim(line) != "reference_id,test_id,distance") {
    throw FormatError("score matrix: missing column header");
  }
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.rfind(',');
    if (c1 == std::string::npos || c1 == c2) throw FormatError("score matrix: bad row '" + line + "'");
    m.set(line.substr(0, c1), line.substr(c1 + 1, c2 - c1 - 1), parse_double(trim(line.substr(c2 + 1))));
  }
  return m;
}

inline std::string score_matrix_to_string(const ScoreMatrix& m) {
  std::ostringstream ss;
  write_score_matrix(ss, m);
  return ss.str();
}

inline ScoreMatrix score_matrix_from_string(const std::string& text) {
  std::istringstream ss(text);
  return read_score_matrix(ss);
}

inline constexpr double kDegenerateEpsilon = 1e-9;

/// Handling of zero baselines and zero fusion spread. By default these are
/// errors; with allow_epsilon the value is replaced by 1e-9 and warn is
/// called.
struct DegeneratePolicy {
  bool allow_epsilon = false;
  std::function<void(const std::string&)> warn;

  double guard(double value, const std::string& what) const {
    if (value > 0.0) return value;
    if (!allow_epsilon) throw DegenerateError(what + " is zero");
    if (warn) warn(what + " is zero; using 1e-9");
    return kDegenerateEpsilon;
  }
};

namespace detail {

inline double nearest_other_reference(const ReferenceSet& refs, const ScoreMatrix& d, std::size_t r) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < refs.references.size(); ++s)
    if (s != r) best = std::min(best, d.at(refs.references[r], refs.references[s]));
  return best;
}

}  // namespace detail

/// Mean over references of the distance to the nearest other reference.
inline double reference_baseline(const ReferenceSet& refs, const ScoreMatrix& d,
                                 const DegeneratePolicy& policy = {}) {
  refs.validate();
  double sum = 0.0;
  for (std::size_t r = 0; r < refs.references.size(); ++r) sum += detail::nearest_other_reference(refs, d, r);
  return policy.guard(sum / double(refs.references.size()), "reference baseline of user " + refs.user);
}

inline double verification_score(const ReferenceSet& refs, const std::string& test, const ScoreMatrix& d,
                                 const DegeneratePolicy& policy = {}) {
  const double delta = reference_baseline(refs, d, policy);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : refs.references) best = std::min(best, d.at(r, test));
  return best / delta;
}

/// Leave-one-out minima divided by the baseline, one per reference.
inline std::vector<double> normalized_reference_minima(const ReferenceSet& refs, const ScoreMatrix& d,
                                                       const DegeneratePolicy& policy = {}) {
  const double delta = reference_baseline(refs, d, policy);
  std::vector<double> out;
  for (std::size_t r = 0; r < refs.references.size(); ++r)
    out.push_back(detail::nearest_other_reference(refs, d, r) / delta);
  return out;
}

struct FusionStats {
  double mu = 0.0;
  double sigma = 0.0;
};

struct UserMatrix {
  ReferenceSet refs;
  const ScoreMatrix* matrix = nullptr;
};

/// Dataset mean and population standard deviation of the normalized
/// leave-one-out minima, each averaged per user first.
inline FusionStats fusion_stats(const std::vector<UserMatrix>& users, const DegeneratePolicy& policy = {}) {
  if (users.empty()) throw ProtocolError("fusion statistics need at least one user");
  std::vector<std::vector<double>> values;
  for (const auto& u : users) values.push_back(normalized_reference_minima(u.refs, *u.matrix, policy));
  auto nested_mean = [&](auto&& f) {
    double outer = 0.0;
    for (const auto& v : values) {
      double inner = 0.0;
      for (double x : v) inner += f(x);
      outer += inner / double(v.size());
    }
    return outer / double(values.size());
  };
  FusionStats stats;
  stats.mu = nested_mean([](double x) { return x; });
  stats.sigma = std::sqrt(nested_mean([&](double x) { return (x - stats.mu) * (x - stats.mu); }));
  stats.sigma = policy.guard(stats.sigma, "fusion standard deviation");
  return stats;
}

/// min_R [ w * z_GED(R,T) + (1 - w) * z_inkball(R,T) ], z = (d/delta - mu) / sigma.
inline double mcs_score(const ReferenceSet& refs, const std::string& test, double w, const ScoreMatrix& ged,
                        const ScoreMatrix& inkball, const FusionStats& ged_stats,
                        const FusionStats& inkball_stats, const DegeneratePolicy& policy = {}) {
  if (!(w >= 0.0 && w <= 1.0)) throw ParameterError("fusion weight must be in [0, 1]");
  if (!(ged_stats.sigma > 0.0) || !(inkball_stats.sigma > 0.0)) throw DegenerateError("fusion standard deviation is zero");
  const double delta_ged = reference_baseline(refs, ged, policy);
  const double delta_ink = reference_baseline(refs, inkball, policy);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : refs.references) {
    const double zg = (ged.at(r, test) / delta_ged - ged_stats.mu) / ged_stats.sigma;
    const double zi = (inkball.at(r, test) / delta_ink - inkball_stats.mu) / inkball_stats.sigma;
    best = std::min(best, w * zg + (1.0 - w) * zi);
  }
  return best;
}

}  // namespace sigverify

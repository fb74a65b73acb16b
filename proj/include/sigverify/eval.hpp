#pragma once

// Evaluation protocol: reference/positive/forgery split per user, error rates
// at a decision threshold (accept iff score < threshold), equal error rates
// with a global or per-user threshold, and DET operating points. All rates
// are percentages.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "sigverify/errors.hpp"
#include "sigverify/text_format.hpp"

namespace sigverify {

struct UserSignatures {
  std::string user;
  std::vector<std::string> genuine;  // in acquisition order
  std::vector<std::string> forgeries;
};

struct UserTrials {
  std::string user;
  std::vector<std::string> references;
  std::vector<std::string> positives;
  std::vector<std::string> skilled;
  std::vector<std::string> random;
};

using TrialPlan = std::vector<UserTrials>;

/// First x genuine signatures are references, the remaining genuines are
/// positives, skilled forgeries are the user's forgeries and random
/// forgeries are the first genuine signature of every other user.
inline TrialPlan build_trials(const std::vector<UserSignatures>& users, int x) {
  if (x < 2) throw ProtocolError("at least two references per user are required");
  TrialPlan plan;
  for (const auto& u : users) {
    if (int(u.genuine.size()) <= x) {
      throw ProtocolError("user " + u.user + " has " + std::to_string(u.genuine.size()) +
                          " genuine signatures, need more than " + std::to_string(x));
    }
    UserTrials t;
    t.user = u.user;
    t.references.assign(u.genuine.begin(), u.genuine.begin() + x);
    t.positives.assign(u.genuine.begin() + x, u.genuine.end());
    t.skilled = u.forgeries;
    for (const auto& other : users)
      if (other.user != u.user) t.random.push_back(other.genuine.front());
    plan.push_back(std::move(t));
  }
  return plan;
}

struct UserScores {
  std::string user;
  std::vector<double> positive;
  std::vector<double> skilled;
  std::vector<double> random;
};

using TrialSet = std::vector<UserScores>;

/// Applies score(user trials, test id) to every trial of the plan.
inline TrialSet score_trials(const TrialPlan& plan,
                             const std::function<double(const UserTrials&, const std::string&)>& score) {
  TrialSet set;
  for (const auto& t : plan) {
    UserScores s;
    s.user = t.user;
    for (const auto& id : t.positives) s.positive.push_back(score(t, id));
    for (const auto& id : t.skilled) s.skilled.push_back(score(t, id));
    for (const auto& id : t.random) s.random.push_back(score(t, id));
    set.push_back(std::move(s));
  }
  return set;
}

/// Percentage of genuine scores rejected (score >= threshold).
inline double frr_at(const std::vector<double>& genuine, double threshold) {
  if (genuine.empty()) return std::nan("");
  const auto rejected = std::count_if(genuine.begin(), genuine.end(), [&](double s) { return !(s < threshold); });
  return 100.0 * double(rejected) / double(genuine.size());
}

/// Percentage of forgery scores accepted (score < threshold).
inline double far_at(const std::vector<double>& forgery, double threshold) {
  if (forgery.empty()) return std::nan("");
  const auto accepted = std::count_if(forgery.begin(), forgery.end(), [&](double s) { return s < threshold; });
  return 100.0 * double(accepted) / double(forgery.size());
}

struct Rates {
  double frr = 0.0;
  double far_sf = 0.0;
  double far_rf = 0.0;
};

struct PooledScores {
  std::vector<double> positive, skilled, random;
};

inline PooledScores pool(const TrialSet& trials) {
  PooledScores p;
  for (const auto& u : trials) {
    p.positive.insert(p.positive.end(), u.positive.begin(), u.positive.end());
    p.skilled.insert(p.skilled.end(), u.skilled.begin(), u.skilled.end());
    p.random.insert(p.random.end(), u.random.begin(), u.random.end());
  }
  return p;
}

inline Rates far_frr_at(const TrialSet& trials, double threshold) {
  if (std::isnan(threshold)) throw ParameterError("threshold is NaN");
  const auto p = pool(trials);
  return {frr_at(p.positive, threshold), far_at(p.skilled, threshold), far_at(p.random, threshold)};
}

struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;
};

/// Candidate thresholds: below the minimum, every distinct score, every
/// midpoint between consecutive distinct scores, above the maximum.
inline std::vector<double> sweep_thresholds(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> values(a);
  values.insert(values.end(), b.begin(), b.end());
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  std::vector<double> out;
  out.reserve(2 * values.size() + 1);
  out.push_back(values.front() - 1.0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out.push_back(values[i - 1] + (values[i] - values[i - 1]) / 2.0);
    out.push_back(values[i]);
  }
  out.push_back(values.back() + 1.0);
  return out;
}

/// Equal error rate with one threshold for all scores. At the first sweep
/// step where FRR no longer exceeds FAR the two rates are interpolated
/// linearly from the previous step. The threshold returned is the sweep
/// candidate minimizing |FRR - FAR| (first on ties).
inline EerResult eer_global(const std::vector<double>& genuine, const std::vector<double>& forgery) {
  if (genuine.empty() || forgery.empty()) throw ProtocolError("EER needs genuine and forgery scores");
  const auto thresholds = sweep_thresholds(genuine, forgery);
  std::vector<double> frr, far;
  {
    // Counting sweep: sorted scores and two moving cursors.
    auto g = genuine, f = forgery;
    std::sort(g.begin(), g.end());
    std::sort(f.begin(), f.end());
    std::size_t gi = 0, fi = 0;
    for (double t : thresholds) {
      while (gi < g.size() && g[gi] < t) ++gi;
      while (fi < f.size() && f[fi] < t) ++fi;
      frr.push_back(100.0 * double(g.size() - gi) / double(g.size()));
      far.push_back(100.0 * double(fi) / double(f.size()));
    }
  }
  EerResult result;
  std::size_t best = 0;
  for (std::size_t k = 1; k < thresholds.size(); ++k)
    if (std::abs(frr[k] - far[k]) < std::abs(frr[best] - far[best])) best = k;
  result.threshold = thresholds[best];
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    const double d = frr[k] - far[k];
    if (d > 0.0) continue;
    if (d == 0.0 || k == 0) {
      result.eer = frr[k];
    } else {
      const double d_prev = frr[k - 1] - far[k - 1];
      const double a = d_prev / (d_prev - d);
      result.eer = frr[k - 1] + a * (frr[k] - frr[k - 1]);
    }
    break;
  }
  return result;
}

struct UserEerInput {
  std::vector<double> genuine;
  std::vector<double> forgery;
};

/// Mean of the per-user equal error rates.
inline double eer_user(const std::vector<UserEerInput>& users) {
  if (users.empty()) throw ProtocolError("user EER needs at least one user");
  double sum = 0.0;
  for (const auto& u : users) sum += eer_global(u.genuine, u.forgery).eer;
  return sum / double(users.size());
}

struct DetPoint {
  double threshold = 0.0;
  double far = 0.0;
  double frr = 0.0;
};

/// One operating point per distinct score plus one above all scores,
/// sorted by threshold.
inline std::vector<DetPoint> det_points(const std::vector<double>& genuine, const std::vector<double>& forgery) {
  if (genuine.empty() || forgery.empty()) throw ProtocolError("DET needs genuine and forgery scores");
  std::vector<double> thresholds(genuine);
  thresholds.insert(thresholds.end(), forgery.begin(), forgery.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  thresholds.push_back(std::numeric_limits<double>::infinity());
  std::vector<DetPoint> out;
  for (double t : thresholds) out.push_back({t, far_at(forgery, t), frr_at(genuine, t)});
  return out;
}

inline void write_det_csv(std::ostream& out, const std::vector<DetPoint>& points) {
  out << "threshold,far,frr\n";
  for (const auto& p : points)
    out << format_double(p.threshold) << ',' << format_double(p.far) << ',' << format_double(p.frr) << '\n';
}

struct EvalReport {
  std::string system;
  double threshold = 0.0;
  double frr = 0.0;
  double far_rf = 0.0;
  double eer_user_rf = 0.0;
  double eer_global_rf = 0.0;
  double far_sf = 0.0;
  double aer_sf = 0.0;
  double eer_user_sf = 0.0;
  double eer_global_sf = 0.0;
  double eer_threshold_sf = 0.0;
  double eer_threshold_rf = 0.0;
  std::vector<DetPoint> det_sf;
  std::vector<DetPoint> det_rf;
};

/// Full report. The decision threshold only affects FRR, FAR and AER.
inline EvalReport fixed_threshold_report(const TrialSet& trials, double threshold, std::string system = {}) {
  EvalReport r;
  r.system = std::move(system);
  r.threshold = threshold;
  const auto rates = far_frr_at(trials, threshold);
  r.frr = rates.frr;
  r.far_sf = rates.far_sf;
  r.far_rf = rates.far_rf;
  r.aer_sf = (r.frr + r.far_sf) / 2.0;

  const auto p = pool(trials);
  const auto sf = eer_global(p.positive, p.skilled);
  const auto rf = eer_global(p.positive, p.random);
  r.eer_global_sf = sf.eer;
  r.eer_threshold_sf = sf.threshold;
  r.eer_global_rf = rf.eer;
  r.eer_threshold_rf = rf.threshold;

  std::vector<UserEerInput> per_sf, per_rf;
  for (const auto& u : trials) {
    per_sf.push_back({u.positive, u.skilled});
    per_rf.push_back({u.positive, u.random});
  }
  r.eer_user_sf = eer_user(per_sf);
  r.eer_user_rf = eer_user(per_rf);
  r.det_sf = det_points(p.positive, p.skilled);
  r.det_rf = det_points(p.positive, p.random);
  return r;
}

inline constexpr const char* kReportColumns =
    "FRR,FAR_RF,EER_user_RF,EER_global_RF,FAR_SF,AER_SF,EER_user_SF,EER_global_SF";

inline std::vector<double> report_values(const EvalReport& r) {
  return {r.frr, r.far_rf, r.eer_user_rf, r.eer_global_rf, r.far_sf, r.aer_sf, r.eer_user_sf, r.eer_global_sf};
}

/// Aligned text table, one row per report.
inline void write_report_table(std::ostream& out, const std::vector<EvalReport>& reports) {
  const char* headers[] = {"FRR", "FAR_RF", "EER_user_RF", "EER_global_RF",
                           "FAR_SF", "AER_SF", "EER_user_SF", "EER_global_SF"};
  std::size_t name_width = 6;
  for (const auto& r : reports) name_width = std::max(name_width, r.system.size());
  auto pad = [](const std::string& s, std::size_t width) {
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
  };
  out << std::string("System") + std::string(name_width - 6, ' ');
  for (const char* h : headers) out << "  " << pad(h, 13);
  out << '\n';
  for (const auto& r : reports) {
    out << r.system << std::string(name_width - r.system.size(), ' ');
    for (double v : report_values(r)) out << "  " << pad(format_percent(v), 13);
    out << '\n';
  }
}

inline void write_report_csv(std::ostream& out, const std::vector<EvalReport>& reports) {
  out << "system,threshold," << kReportColumns << '\n';
  for (const auto& r : reports) {
    out << r.system << ',' << format_double(r.threshold);
    for (double v : report_values(r)) out << ',' << format_percent(v);
    out << '\n';
  }
}

}  // namespace sigverify

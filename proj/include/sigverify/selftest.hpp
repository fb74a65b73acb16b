#pragma once

// Built-in consistency checks of the fast algorithms against the slow
// reference implementations on fixed random fixtures.

#include <cmath>
#include <cstdint>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>

#include "sigverify/testing/oracles.hpp"

namespace sigverify {

struct SelftestOptions {
  /// Transform under test; replaceable so a broken implementation can be
  /// shown to be caught.
  std::function<EnergyField(const EnergyField&, Point2i)> gdt = [](const EnergyField& f, Point2i o) {
    return gdt_quadratic(f, o);
  };
  std::uint64_t seed = 20190101;
  int gdt_fields = 200;
  int ged_pairs = 300;
  int inkball_models = 60;
  int eer_sets = 200;
};

namespace detail {

struct SuiteReport {
  std::string name;
  int cases = 0;
  std::string failure;  // empty on success
};

inline SuiteReport selftest_gdt(const SelftestOptions& opt) {
  SuiteReport r{"gdt", 0, {}};
  SyntheticRng rng(opt.seed);
  for (int k = 0; k < opt.gdt_fields && r.failure.empty(); ++k, ++r.cases) {
    const int w = rng.uniform_int(1, 12), h = rng.uniform_int(1, 12);
    const auto in = oracle::random_field(rng, w, h);
    const Point2i o{rng.uniform_int(-6, 6), rng.uniform_int(-6, 6)};
    const auto got = opt.gdt(in, o);
    const auto want = oracle::brute_force_gdt(in, o);
    if (got.width() != w || got.height() != h) {
      r.failure = "field " + std::to_string(k) + ": wrong dimensions";
      break;
    }
    for (int y = 0; y < h && r.failure.empty(); ++y)
      for (int x = 0; x < w; ++x)
        if (got(x, y) != want(x, y)) {
          std::ostringstream ss;
          ss << "field " << k << " (" << w << "x" << h << ", offset " << o.x << "," << o.y << ") differs at ("
             << x << "," << y << "): got " << format_double(got(x, y)) << ", expected "
             << format_double(want(x, y));
          r.failure = ss.str();
          break;
        }
  }
  return r;
}

inline SuiteReport selftest_ged(const SelftestOptions& opt) {
  SuiteReport r{"ged", 0, {}};
  SyntheticRng rng(opt.seed + 1);
  const CostParams params;
  for (int k = 0; k < opt.ged_pairs && r.failure.empty(); ++k, ++r.cases) {
    const auto g1 = oracle::random_graph(rng, 6), g2 = oracle::random_graph(rng, 6);
    const double exact = oracle::brute_force_ged(g1, g2, params);
    const double lower = hed_cost(g1, g2, params);
    const double upper = bp(g1, g2, params).raw_cost;
    const double searched = exact_ged_small(g1, g2, params).raw_cost;
    const double tol = 1e-9 * (1.0 + exact);
    std::ostringstream ss;
    if (std::abs(searched - exact) > tol) {
      ss << "pair " << k << ": exact search " << format_double(searched) << " != enumeration " << format_double(exact);
    } else if (lower > exact + tol || exact > upper + tol) {
      ss << "pair " << k << ": bounds violated, HED " << format_double(lower) << ", exact " << format_double(exact)
         << ", BP " << format_double(upper);
    } else if (hed_cost(g1, g1, params) != 0.0) {
      ss << "pair " << k << ": HED(g, g) != 0";
    }
    r.failure = ss.str();
  }
  return r;
}

inline SuiteReport selftest_inkball(const SelftestOptions& opt) {
  SuiteReport r{"inkball", 0, {}};
  SyntheticRng rng(opt.seed + 2);
  for (int k = 0; k < opt.inkball_models && r.failure.empty(); ++k, ++r.cases) {
    const int nodes = rng.uniform_int(1, 4);
    const int limit = nodes == 4 ? 5 : 8;
    const int w = rng.uniform_int(2, limit), h = rng.uniform_int(2, limit);
    MatchParams params;
    params.augmented = rng.uniform() < 0.5;
    params.lambda = rng.uniform(0.5, 2.0);
    params.tau = rng.uniform(4.0, 40.0);
    params.w_alpha = rng.uniform(0.0, 128.0);
    params.margin = 0;
    const auto model = oracle::random_model(rng, nodes, w, h, params.augmented);
    const auto obs = oracle::random_skeleton(rng, w, h);
    const double got = match(model, obs, params).energy;
    const double want = oracle::brute_force_match_energy(model, obs, params);
    if (std::abs(got - want) > 1e-6) {
      std::ostringstream ss;
      ss << "model " << k << " (" << nodes << " nodes, " << w << "x" << h << "): DP energy " << format_double(got)
         << ", enumeration " << format_double(want);
      r.failure = ss.str();
    }
  }
  return r;
}

inline SuiteReport selftest_eer(const SelftestOptions& opt) {
  SuiteReport r{"eer", 0, {}};
  SyntheticRng rng(opt.seed + 3);
  for (int k = 0; k < opt.eer_sets && r.failure.empty(); ++k, ++r.cases) {
    std::vector<double> g(std::size_t(rng.uniform_int(1, 30))), f(std::size_t(rng.uniform_int(1, 30)));
    for (auto& s : g) s = double(rng.uniform_int(0, 40)) / 8.0;
    for (auto& s : f) s = double(rng.uniform_int(10, 60)) / 8.0;
    const double got = eer_global(g, f).eer;
    const double want = oracle::brute_force_eer(g, f);
    if (!(std::abs(got - want) <= 1e-9)) {
      r.failure = "score set " + std::to_string(k) + ": EER " + format_double(got) + ", sweep " + format_double(want);
    }
  }
  return r;
}

}  // namespace detail

/// Runs all suites, printing one line each. Returns true when all pass.
inline bool run_selftest(std::ostream& out, const SelftestOptions& opt = {}) {
  bool ok = true;
  for (auto suite : {detail::selftest_gdt, detail::selftest_ged, detail::selftest_inkball, detail::selftest_eer}) {
    const auto r = suite(opt);
    if (r.failure.empty()) {
      out << "PASS " << r.name << " (" << r.cases << " cases)\n";
    } else {
      ok = false;
      out << "FAIL " << r.name << ": " << r.failure << '\n';
    }
  }
  return ok;
}

}  // namespace sigverify

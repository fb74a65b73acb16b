#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "sigverify/eval.hpp"
#include "sigverify/testing/oracles.hpp"

using namespace sigverify;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST(Trials, Protocol) {
  std::vector<UserSignatures> users;
  for (const char* u : {"a", "b", "c"}) {
    UserSignatures s{u, {}, {std::string(u) + ":f1", std::string(u) + ":f2"}};
    for (int k = 1; k <= 12; ++k) s.genuine.push_back(std::string(u) + ":g" + std::to_string(k));
    users.push_back(s);
  }
  const auto plan = build_trials(users, 10);
  ASSERT_EQ(plan.size(), 3u);
  for (const auto& t : plan) {
    EXPECT_EQ(t.references.size(), 10u);
    EXPECT_EQ(t.positives.size(), 2u);
    EXPECT_EQ(t.skilled.size(), 2u);
    ASSERT_EQ(t.random.size(), 2u);
    for (const auto& r : t.random) EXPECT_NE(r.substr(0, 1), t.user);
  }
  EXPECT_EQ(plan[0].random, (std::vector<std::string>{"b:g1", "c:g1"}));
  EXPECT_THROW(build_trials(users, 12), ProtocolError);
  EXPECT_THROW(build_trials(users, 1), ProtocolError);
}

TEST(Rates, Examples) {
  const std::vector<double> g{0.1, 0.9}, f{0.5};
  EXPECT_EQ(frr_at(g, kInf), 0.0);
  EXPECT_EQ(far_at(f, kInf), 100.0);
  EXPECT_EQ(frr_at(g, -kInf), 100.0);
  EXPECT_EQ(far_at(f, -kInf), 0.0);
  EXPECT_EQ(frr_at(g, 0.5), 50.0);
  EXPECT_EQ(far_at(f, 0.5), 0.0);
  EXPECT_TRUE(std::isnan(far_at({}, 0.5)));
}

TEST(Rates, AerArithmetic) {
  // 2 of 25 genuines rejected, 269 of 2500 skilled forgeries accepted.
  TrialSet set(1);
  for (int i = 0; i < 25; ++i) set[0].positive.push_back(i < 2 ? 2.0 : 0.0);
  for (int i = 0; i < 2500; ++i) set[0].skilled.push_back(i < 269 ? 0.0 : 2.0);
  set[0].random = {2.0};
  const auto r = fixed_threshold_report(set, 1.0);
  EXPECT_NEAR(r.frr, 8.00, 1e-9);
  EXPECT_NEAR(r.far_sf, 10.76, 1e-9);
  EXPECT_EQ(format_percent(r.aer_sf), "9.38");
}

TEST(Eer, Examples) {
  EXPECT_EQ(eer_global({0.1, 0.2}, {0.5, 0.7}).eer, 0.0);
  EXPECT_NEAR(eer_global({0.1, 0.4, 0.7}, {0.1, 0.4, 0.7}).eer, 50.0, 1e-9);
  EXPECT_NEAR(eer_global({0.1, 0.2, 0.3}, {0.25, 0.4, 0.5}).eer, 100.0 / 3.0, 1e-9);
  EXPECT_THROW(eer_global({}, {1.0}), ProtocolError);
}

TEST(Eer, SeparatedThresholdSeparates) {
  const auto r = eer_global({0.1, 0.2}, {0.5, 0.7});
  EXPECT_GT(r.threshold, 0.2);
  EXPECT_LE(r.threshold, 0.5);
}

TEST(Eer, MatchesBruteForce) {
  SyntheticRng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> g, f;
    const int ng = rng.uniform_int(1, 12), nf = rng.uniform_int(1, 12);
    const bool coarse = trial % 2 == 0;
    for (int i = 0; i < ng; ++i) g.push_back(coarse ? rng.uniform_int(0, 6) : rng.uniform(0, 1));
    for (int i = 0; i < nf; ++i) f.push_back(coarse ? rng.uniform_int(2, 8) : rng.uniform(0.3, 1.3));
    const double e = eer_global(g, f).eer;
    EXPECT_NEAR(e, oracle::brute_force_eer(g, f), 1e-9);
    EXPECT_GE(e, 0.0);
    EXPECT_LE(e, 100.0);
  }
}

TEST(Eer, ScaleInvariant) {
  SyntheticRng rng(37);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> g, f, gs, fs;
    for (int i = 0; i < 8; ++i) g.push_back(rng.uniform(0, 1));
    for (int i = 0; i < 9; ++i) f.push_back(rng.uniform(0.2, 1.2));
    const double k = rng.uniform(0.1, 10);
    for (double v : g) gs.push_back(v * k);
    for (double v : f) fs.push_back(v * k);
    EXPECT_NEAR(eer_global(g, f).eer, eer_global(gs, fs).eer, 1e-9);
  }
}

TEST(Eer, UserMean) {
  EXPECT_EQ(eer_user({{{0.1}, {0.5}}, {{0.2}, {0.9}}}), 0.0);
  // EERs 50 and 0.
  EXPECT_NEAR(eer_user({{{0.1, 0.9}, {0.1, 0.9}}, {{0.1}, {0.5}}}), 25.0, 1e-9);
  EXPECT_THROW(eer_user({}), ProtocolError);
  EXPECT_THROW(eer_user({{{0.1}, {}}}), ProtocolError);
}

TEST(Det, SeparatedPair) {
  const auto pts = det_points({0.2}, {0.8});
  ASSERT_EQ(pts.size(), 3u);
  EXPECT_EQ(pts[0].far, 0.0);
  EXPECT_EQ(pts[0].frr, 100.0);
  EXPECT_EQ(pts[1].far, 0.0);
  EXPECT_EQ(pts[1].frr, 0.0);
  EXPECT_EQ(pts[2].far, 100.0);
  EXPECT_EQ(pts[2].frr, 0.0);
  EXPECT_TRUE(std::isinf(pts[2].threshold));
}

TEST(Det, IdenticalListsCrossDiagonal) {
  const std::vector<double> s{0.3, 0.1, 0.3, 0.7};
  const auto pts = det_points(s, s);
  bool crossed = false;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i > 0) {
      crossed = crossed || (pts[i - 1].far <= pts[i - 1].frr && pts[i].far >= pts[i].frr);
      EXPECT_LT(pts[i - 1].threshold, pts[i].threshold);
      EXPECT_LE(pts[i - 1].far, pts[i].far);
      EXPECT_GE(pts[i - 1].frr, pts[i].frr);
    }
  }
  EXPECT_TRUE(crossed);
  ASSERT_EQ(pts.size(), 4u);
  EXPECT_EQ(pts[1].far, 25.0);
  EXPECT_EQ(pts[1].frr, 75.0);
}

TEST(Report, ColumnsAndThresholdIndependence) {
  SyntheticRng rng(41);
  TrialSet set(3);
  for (auto& u : set) {
    u.user = "u";
    for (int i = 0; i < 5; ++i) u.positive.push_back(rng.uniform(0, 1));
    for (int i = 0; i < 5; ++i) u.skilled.push_back(rng.uniform(0.4, 1.4));
    for (int i = 0; i < 2; ++i) u.random.push_back(rng.uniform(0.8, 2));
  }
  const auto a = fixed_threshold_report(set, 0.5, "X");
  const auto b = fixed_threshold_report(set, 0.9, "X");
  EXPECT_EQ(a.eer_global_sf, b.eer_global_sf);
  EXPECT_EQ(a.eer_user_rf, b.eer_user_rf);
  EXPECT_LE(a.frr, 100.0);
  EXPECT_GE(a.frr, b.frr);
  EXPECT_LE(a.far_sf, b.far_sf);
  EXPECT_DOUBLE_EQ(a.aer_sf, (a.frr + a.far_sf) / 2);
  const auto vals = report_values(a);
  ASSERT_EQ(vals.size(), 8u);
  EXPECT_EQ(vals[0], a.frr);
  EXPECT_EQ(vals[1], a.far_rf);
  EXPECT_EQ(vals[7], a.eer_global_sf);

  std::ostringstream csv;
  write_report_csv(csv, {a});
  EXPECT_NE(csv.str().find(kReportColumns), std::string::npos);
  std::ostringstream table;
  write_report_table(table, {a, b});
  EXPECT_NE(table.str().find("EER_global_SF"), std::string::npos);
}

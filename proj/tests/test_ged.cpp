#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sigverify/ged.hpp"
#include "sigverify/lsap.hpp"
#include "sigverify/testing/oracles.hpp"

using namespace sigverify;

namespace {

KeypointGraph make_graph(std::vector<Point2d> nodes, std::vector<std::pair<int, int>> edges = {}) {
  KeypointGraph g;
  g.nodes = std::move(nodes);
  g.set_edges(edges);
  return g;
}

const CostParams kDefaultCosts{12.5, 200.0};

}  // namespace

TEST(NodeCost, Examples) {
  EXPECT_EQ(node_sub_cost({0, 0}, {0, 0}), 0.0);
  EXPECT_EQ(node_sub_cost({0, 0}, {3, 4}), 5.0);
  SyntheticRng rng(4);
  for (int i = 0; i < 100; ++i) {
    const Point2d a{rng.uniform() * 100, rng.uniform() * 100}, b{rng.uniform() * 100, rng.uniform() * 100};
    EXPECT_NEAR(node_sub_cost(a, b), std::sqrt(std::pow(a.x - b.x, 2) + std::pow(a.y - b.y, 2)), 1e-12);
  }
}

TEST(Hed, SingleNodes) {
  const auto u = make_graph({{0, 0}}), v = make_graph({{3, 4}});
  EXPECT_DOUBLE_EQ(hed(u, v, kDefaultCosts).raw_cost, 5.0);
  EXPECT_DOUBLE_EQ(hed(u, u, kDefaultCosts).raw_cost, 0.0);
  EXPECT_DOUBLE_EQ(hed(u, u, kDefaultCosts).normalized, 0.0);
}

TEST(Hed, AgainstEmpty) {
  const auto g = make_graph({{0, 0}, {10, 0}, {20, 5}}, {{0, 1}, {1, 2}});
  const auto r = hed(g, KeypointGraph{}, kDefaultCosts);
  EXPECT_DOUBLE_EQ(r.raw_cost, 3 * 12.5 + 2 * 200.0);
  EXPECT_DOUBLE_EQ(r.raw_cost, ged_max(g, KeypointGraph{}, kDefaultCosts));
  EXPECT_DOUBLE_EQ(r.normalized, 1.0);
  EXPECT_DOUBLE_EQ(d_ged(g, KeypointGraph{}, kDefaultCosts), 1.0);
  EXPECT_DOUBLE_EQ(d_ged(KeypointGraph{}, g, kDefaultCosts), 1.0);
  EXPECT_EQ(hed(KeypointGraph{}, KeypointGraph{}, kDefaultCosts).raw_cost, 0.0);
  EXPECT_THROW(d_ged(KeypointGraph{}, KeypointGraph{}, kDefaultCosts), DomainError);
}

TEST(Hed, MatchesFormulaByHand) {
  // Path a-b vs single node c at a; degrees 1,1 vs 0.
  const auto g1 = make_graph({{0, 0}, {6, 8}}, {{0, 1}});
  const auto g2 = make_graph({{0, 0}});
  // a: min(12.5+100, (0+100)/2) = 50; b: min(112.5, (10+100)/2) = 55; c: min(12.5, 50, 55) = 12.5
  EXPECT_DOUBLE_EQ(hed(g1, g2, kDefaultCosts).raw_cost, 117.5);
}

TEST(Bp, SingleNodes) {
  const auto u = make_graph({{0, 0}}), v = make_graph({{3, 4}});
  EXPECT_DOUBLE_EQ(bp(u, v, kDefaultCosts).raw_cost, 5.0);
  EXPECT_DOUBLE_EQ(bp(u, u, kDefaultCosts).raw_cost, 0.0);
  const auto far = make_graph({{300, 400}});
  EXPECT_DOUBLE_EQ(bp(u, far, kDefaultCosts).raw_cost, 25.0);
}

TEST(Exact, Examples) {
  const auto single = make_graph({{0, 0}});
  EXPECT_DOUBLE_EQ(exact_ged_small(single, single, kDefaultCosts).raw_cost, 0.0);
  EXPECT_DOUBLE_EQ(exact_ged_small(single, KeypointGraph{}, kDefaultCosts).raw_cost, 12.5);
  const auto path = make_graph({{0, 0}, {5, 0}}, {{0, 1}});
  EXPECT_DOUBLE_EQ(exact_ged_small(path, single, kDefaultCosts).raw_cost, 212.5);
  EXPECT_DOUBLE_EQ(exact_ged_small(KeypointGraph{}, KeypointGraph{}, kDefaultCosts).raw_cost, 0.0);

  KeypointGraph big;
  big.nodes.assign(7, {0, 0});
  EXPECT_THROW(exact_ged_small(big, big, kDefaultCosts), ParameterError);
}

TEST(GedMax, Example) {
  KeypointGraph a, b;
  a.nodes.assign(5, {0, 0});
  a.set_edges({{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  b.nodes.assign(3, {0, 0});
  b.set_edges({{0, 1}, {1, 2}});
  EXPECT_DOUBLE_EQ(ged_max(a, b, kDefaultCosts), 1300.0);
  EXPECT_EQ(ged_max(KeypointGraph{}, KeypointGraph{}, kDefaultCosts), 0.0);
}

TEST(Ged, BoundChainAgainstEnumeration) {
  SyntheticRng rng(77);
  for (int trial = 0; trial < 150; ++trial) {
    const auto g1 = oracle::random_graph(rng, 5), g2 = oracle::random_graph(rng, 5);
    const double exact = exact_ged_small(g1, g2, kDefaultCosts).raw_cost;
    const double brute = oracle::brute_force_ged(g1, g2, kDefaultCosts);
    ASSERT_NEAR(exact, brute, 1e-9);
    EXPECT_LE(hed(g1, g2, kDefaultCosts).raw_cost, exact + 1e-9);
    EXPECT_GE(bp(g1, g2, kDefaultCosts).raw_cost, exact - 1e-9);
    EXPECT_GE(bp(g1, g2, kDefaultCosts).raw_cost, hed(g1, g2, kDefaultCosts).raw_cost - 1e-9);
  }
}

TEST(Ged, SymmetryAndRange) {
  SyntheticRng rng(78);
  for (int trial = 0; trial < 200; ++trial) {
    const auto g1 = oracle::random_graph(rng, 8), g2 = oracle::random_graph(rng, 8);
    if (g1.empty() && g2.empty()) continue;
    const double a = d_ged(g1, g2, kDefaultCosts), b = d_ged(g2, g1, kDefaultCosts);
    EXPECT_NEAR(a, b, 1e-12);
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, 1.0);
    EXPECT_NEAR(hed(g1, g2, kDefaultCosts).raw_cost, hed(g2, g1, kDefaultCosts).raw_cost, 1e-9);
    if (!g1.empty()) {
      EXPECT_EQ(hed(g1, g1, kDefaultCosts).raw_cost, 0.0);
    }
  }
}

TEST(Ged, InducedCostOfIdentityMapIsZero) {
  SyntheticRng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = oracle::random_graph(rng, 7);
    std::vector<int> identity(g.nodes.size());
    std::iota(identity.begin(), identity.end(), 0);
    EXPECT_EQ(induced_edit_cost(g, g, identity, kDefaultCosts), 0.0);
    std::vector<int> none(g.nodes.size(), -1);
    EXPECT_DOUBLE_EQ(induced_edit_cost(g, g, none, kDefaultCosts), 2 * ged_max(g, KeypointGraph{}, kDefaultCosts));
  }
}

TEST(Ged, NegativeCostsRejected) {
  EXPECT_THROW(hed(KeypointGraph{}, KeypointGraph{}, CostParams{-1, 2}), ParameterError);
}

TEST(Lsap, MatchesPermutationEnumeration) {
  SyntheticRng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + int(rng.uniform_int(0, 5));
    Grid<double> cost(n, n);
    for (auto& c : cost) c = std::floor(rng.uniform() * 50);
    if (trial % 3 == 0) cost(0, n - 1) = std::numeric_limits<double>::infinity();
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
      double c = 0;
      for (int i = 0; i < n; ++i) c += cost(perm[std::size_t(i)], i);
      best = std::min(best, c);
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (std::isinf(best)) {
      EXPECT_THROW(solve_lsap(cost), DomainError);
      continue;
    }
    const auto a = solve_lsap(cost);
    EXPECT_DOUBLE_EQ(a.cost, best);
    double check = 0;
    std::vector<int> cols = a.row_to_col;
    for (int i = 0; i < n; ++i) check += cost(cols[std::size_t(i)], i);
    EXPECT_DOUBLE_EQ(check, best);
    std::sort(cols.begin(), cols.end());
    for (int i = 0; i < n; ++i) EXPECT_EQ(cols[std::size_t(i)], i);
  }
}

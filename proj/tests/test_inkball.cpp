#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sigverify/inkball.hpp"
#include "sigverify/testing/oracles.hpp"
#include "test_support.hpp"

using namespace sigverify;

namespace {

constexpr double kPi = std::numbers::pi;

double tree_length(const InkballModel& m) {
  double total = 0;
  for (int i = 1; i < m.size(); ++i) total += norm(to_double(m.offsets[std::size_t(i)]));
  return total;
}

// Prim's algorithm on the complete Euclidean graph.
double mst_length(const std::vector<Point2i>& pts) {
  const std::size_t n = pts.size();
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<char> in(n, 0);
  best[0] = 0;
  double total = 0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t u = n;
    for (std::size_t i = 0; i < n; ++i)
      if (!in[i] && (u == n || best[i] < best[u])) u = i;
    in[u] = 1;
    total += best[u];
    for (std::size_t i = 0; i < n; ++i)
      if (!in[i]) best[i] = std::min(best[i], norm(to_double(pts[i] - pts[u])));
  }
  return total;
}

SkeletonImage embed(const BinaryImage& img, int w, int h, int dx, int dy) {
  BinaryImage out(w, h);
  for (auto p : img.points()) out.set(p.x + dx, p.y + dy, true);
  return SkeletonImage(out);
}

}  // namespace

TEST(Angles, Difference) {
  EXPECT_EQ(angle_diff(0.3, 0.3), 0.0);
  EXPECT_NEAR(angle_diff(0.1, kPi - 0.1), 0.2, 1e-12);
  EXPECT_NEAR(angle_diff(0.0, kPi / 2), kPi / 2, 1e-12);
  EXPECT_NEAR(angle_diff(0.2, 0.2 + kPi), 0.0, 1e-12);
  SyntheticRng rng(3);
  for (int i = 0; i < 200; ++i) {
    const double a = rng.uniform(-10, 10), b = rng.uniform(-10, 10);
    const double d = angle_diff(a, b);
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, kPi / 2 + 1e-12);
    EXPECT_NEAR(d, angle_diff(b, a), 1e-12);
    // Direct evaluation: distance to the nearest multiple of pi.
    const double r = (a - b) / kPi;
    EXPECT_NEAR(d, std::abs(r - std::round(r)) * kPi, 1e-9);
  }
}

TEST(Angles, Bins) {
  EXPECT_EQ(angle_bin(0.0), 0);
  EXPECT_EQ(angle_bin(kPi - 1e-9), kAngleBins - 1);
  EXPECT_EQ(angle_bin(kPi), 0);
  EXPECT_EQ(angle_bin(-0.01), kAngleBins - 1);
  for (int b = 0; b < kAngleBins; ++b) EXPECT_EQ(angle_bin(angle_bin_center(b)), b);
  EXPECT_EQ(placement_factor(3, 3, 64.0), 1.0);
  EXPECT_NEAR(placement_factor(0, 8, 64.0), 1.0 + kPi / 2, 1e-12);
  EXPECT_EQ(placement_factor(0, 8, 0.0), 1.0);
}

TEST(Tangents, Lines) {
  const auto h = compute_tangents(testsupport::horizontal_line(2, 30, 5, 40, 10));
  for (int x = 2; x <= 30; ++x) EXPECT_NEAR(h.angle(x, 5), 0.0, 1e-9);
  EXPECT_TRUE(std::isnan(h.angle(0, 0)));
  const auto v = compute_tangents(testsupport::vertical_line(4, 1, 25, 10, 30));
  for (int y = 1; y <= 25; ++y) EXPECT_NEAR(v.angle(4, y), kPi / 2, 1e-9);
}

TEST(Tangents, QuarterCircle) {
  const double cx = 3, cy = 3, r = 30;
  BinaryImage img(40, 40);
  const auto circle = testsupport::thin_circle(70, 70, cx + 30, cy + 30, r);
  for (auto p : circle.points()) {
    const int x = p.x - 30, y = p.y - 30;
    if (x >= int(cx) && y >= int(cy) && x < 40 && y < 40) img.set(x, y, true);
  }
  const SkeletonImage arc(img);
  const auto t = compute_tangents(arc);
  int checked = 0;
  for (auto p : arc.points()) {
    const double theta = std::atan2(p.y - cy, p.x - cx);
    if (theta < 0.25 || theta > kPi / 2 - 0.25) continue;  // away from the ends
    const double analytic = theta + kPi / 2;
    EXPECT_LT(angle_diff(t.angle(p), analytic), 0.2) << p.x << "," << p.y;
    ++checked;
  }
  EXPECT_GT(checked, 20);
}

TEST(Tangents, EveryInkPixelHasAnAngle) {
  for (const auto& s : testsupport::synthetic_skeletons(2, 2, 71)) {
    const auto t = compute_tangents(s);
    for (int y = 0; y < s.height(); ++y)
      for (int x = 0; x < s.width(); ++x) {
        if (s.ink(x, y)) {
          ASSERT_FALSE(std::isnan(t.angle(x, y)));
          EXPECT_GE(t.angle(x, y), 0.0);
          EXPECT_LT(t.angle(x, y), kPi);
        } else {
          EXPECT_TRUE(std::isnan(t.angle(x, y)));
        }
      }
  }
}

TEST(Model, StraightLine) {
  const auto line = testsupport::horizontal_line(0, 100, 3, 101, 7);
  const auto m = build_model(line, 50.0, false);
  ASSERT_EQ(m.size(), 3);
  EXPECT_EQ(m.nodes[0], (Point2i{50, 3}));
  EXPECT_EQ(m.parent, (std::vector<int>{-1, 0, 0}));
  std::vector<int> xs{m.nodes[1].x, m.nodes[2].x};
  std::sort(xs.begin(), xs.end());
  EXPECT_EQ(xs, (std::vector<int>{0, 100}));
  EXPECT_FALSE(m.augmented());
}

TEST(Model, StructuralInvariants) {
  for (const auto& s : testsupport::synthetic_skeletons(3, 2, 81)) {
    for (double d : {4.0, 8.0}) {
      const auto m = build_model(s, d, true);
      EXPECT_NO_THROW(m.validate());
      ASSERT_TRUE(m.augmented());
      for (auto p : m.nodes) EXPECT_TRUE(s.ink(p));
      for (int i = 1; i < m.size(); ++i) {
        const auto p = std::size_t(m.parent[std::size_t(i)]);
        EXPECT_EQ(m.nodes[p] - m.nodes[std::size_t(i)], m.offsets[std::size_t(i)]);
      }
      EXPECT_EQ(m.subtree_size[0], m.size());
      EXPECT_NEAR(tree_length(m), mst_length(m.nodes), 1e-6);

      // Coverage: every ink pixel is closer than D to some node.
      for (auto p : s.points()) {
        double nearest = std::numeric_limits<double>::infinity();
        for (auto n : m.nodes) nearest = std::min(nearest, norm(to_double(p - n)));
        EXPECT_LT(nearest, d);
      }

      // The root is the node nearest the centroid.
      Point2d c{0, 0};
      for (auto n : m.nodes) c = c + to_double(n);
      c = {c.x / m.size(), c.y / m.size()};
      for (auto n : m.nodes) EXPECT_LE(norm(to_double(m.nodes[0]) - c), norm(to_double(n) - c) + 1e-12);
    }
  }
}

TEST(Model, MoreNodesForSmallerD) {
  for (const auto& s : testsupport::synthetic_skeletons(2, 2, 91)) {
    EXPECT_GE(build_model(s, 4.0, false).size(), build_model(s, 12.0, false).size());
  }
}

TEST(Model, Errors) {
  EXPECT_THROW(build_model(SkeletonImage(5, 5), 6.0, false), DomainError);
  EXPECT_THROW(build_model(testsupport::horizontal_line(0, 4, 0, 5, 1), 0.5, false), ParameterError);
  InkballModel bad;
  EXPECT_THROW(bad.validate(), FormatError);
}

TEST(Placement, SinglePixel) {
  BinaryImage img(6, 5);
  img.set(0, 0, true);
  MatchParams p;
  p.augmented = false;
  const auto f = placement_field(SkeletonImage(img), std::nullopt, p);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 6; ++x) EXPECT_EQ(f(x, y), double(x * x + y * y));
}

TEST(Placement, FullRow) {
  MatchParams p;
  p.augmented = false;
  const auto f = placement_field(testsupport::horizontal_line(0, 9, 2, 10, 6), std::nullopt, p);
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 10; ++x) EXPECT_EQ(f(x, y), double((y - 2) * (y - 2)));
}

TEST(Placement, AugmentedMatchesBruteForce) {
  SyntheticRng rng(101);
  MatchParams p;
  for (int trial = 0; trial < 20; ++trial) {
    const auto obs = oracle::random_skeleton(rng, 16, 16, 0.1);
    const double tangent = rng.uniform(0, kPi);
    p.w_alpha = trial % 4 == 0 ? 0.0 : rng.uniform(1, 200);
    ASSERT_EQ(placement_field(obs, tangent, p), oracle::brute_force_placement(obs, tangent, p));
  }
}

TEST(Placement, MarginPadsTheGrid) {
  MatchParams p;
  p.augmented = false;
  BinaryImage img(3, 3);
  img.set(1, 1, true);
  const auto f = placement_field(SkeletonImage(img), std::nullopt, p, {2, 1});
  ASSERT_EQ(f.width(), 7);
  ASSERT_EQ(f.height(), 5);
  EXPECT_EQ(f(3, 2), 0.0);
  EXPECT_EQ(f(0, 0), 13.0);
}

TEST(Match, SelfMatchIsZero) {
  for (const auto& s : testsupport::synthetic_skeletons(2, 2, 111)) {
    for (bool augmented : {false, true}) {
      MatchParams p;
      p.augmented = augmented;
      const auto m = build_model(s, 6.0, augmented);
      const auto r = match(m, s, p);
      EXPECT_EQ(r.energy, 0.0);
      EXPECT_EQ(r.root_position, m.nodes[0]);
      EXPECT_EQ(d_inkball(s, s, 6.0, p), 0.0);
    }
  }
}

TEST(Match, TwoNodesExhaustive) {
  SyntheticRng rng(121);
  for (int trial = 0; trial < 40; ++trial) {
    const bool augmented = trial % 2 == 1;
    const auto model = oracle::random_model(rng, 2, 8, 8, augmented);
    const auto obs = oracle::random_skeleton(rng, 8, 8, 0.15);
    MatchParams p;
    p.augmented = augmented;
    p.margin = 0;
    p.tau = trial % 3 == 0 ? 5.0 : 64.0;
    p.lambda = trial % 5 == 0 ? 2.5 : 1.0;
    EXPECT_NEAR(match(model, obs, p).energy, oracle::brute_force_match_energy(model, obs, p), 1e-6);
  }
}

TEST(Match, ThreeNodesExhaustive) {
  SyntheticRng rng(122);
  for (int trial = 0; trial < 15; ++trial) {
    const auto model = oracle::random_model(rng, 3, 6, 6, true);
    const auto obs = oracle::random_skeleton(rng, 6, 6, 0.2);
    MatchParams p;
    p.margin = 0;
    p.tau = 20.0;
    EXPECT_NEAR(match(model, obs, p).energy, oracle::brute_force_match_energy(model, obs, p), 1e-6);
  }
}

TEST(Match, TruncationBound) {
  const auto skels = testsupport::synthetic_skeletons(2, 2, 131);
  MatchParams p;
  p.tau = 10.0;
  for (const auto& a : skels) {
    const auto m = build_model(a, 8.0, true);
    for (const auto& b : skels) {
      const double e = match(m, b, p).energy;
      EXPECT_GE(e, 0.0);
      EXPECT_LE(e, m.size() * p.tau + 1e-9);
    }
  }
}

TEST(Match, TranslationInvariant) {
  const auto skels = testsupport::synthetic_skeletons(1, 2, 141);
  const auto m = build_model(skels[0], 8.0, true);
  MatchParams p;
  p.margin = 40;
  const int w = skels[1].width() + 20, h = skels[1].height() + 20;
  const auto r1 = match(m, embed(skels[1], w, h, 5, 6), p);
  const auto r2 = match(m, embed(skels[1], w, h, 12, 9), p);
  EXPECT_NEAR(r1.energy, r2.energy, 1e-9);
  EXPECT_EQ(r2.root_position - r1.root_position, (Point2i{7, 3}));
}

TEST(Match, ZeroAngleWeightEqualsPlainMatching) {
  const auto skels = testsupport::synthetic_skeletons(2, 1, 151);
  MatchParams aug, plain;
  aug.w_alpha = 0.0;
  plain.augmented = false;
  for (const auto& a : skels) {
    const auto m = build_model(a, 6.0, true);
    for (const auto& b : skels) EXPECT_EQ(match(m, b, aug).energy, match(m, b, plain).energy);
  }
}

TEST(Match, Errors) {
  const auto line = testsupport::horizontal_line(0, 20, 2, 21, 5);
  const auto m = build_model(line, 5.0, false);
  MatchParams p;
  EXPECT_THROW(match(m, line, p), ParameterError);  // augmented needs tangents
  p.augmented = false;
  EXPECT_THROW(match(m, SkeletonImage(10, 10), p), DomainError);
  EXPECT_THROW(d_inkball(SkeletonImage(10, 10), line, 5.0, p), DomainError);
  p.tau = 0.0;
  EXPECT_THROW(match(m, line, p), ParameterError);
}

TEST(Model, SerializationRoundTrip) {
  const auto s = testsupport::synthetic_skeletons(1, 1, 161).front();
  for (bool augmented : {false, true}) {
    auto m = build_model(s, 6.0, augmented, "u01:g001");
    const auto back = model_from_string(model_to_string(m));
    ASSERT_EQ(back.nodes, m.nodes);
    ASSERT_EQ(back.parent, m.parent);
    EXPECT_EQ(back.source_id, m.source_id);
    EXPECT_EQ(back.augmented(), augmented);
    if (augmented) {
      for (int i = 0; i < m.size(); ++i)
        EXPECT_NEAR((*back.tangents)[std::size_t(i)], (*m.tangents)[std::size_t(i)], 1e-12);
    }
  }
  EXPECT_THROW(model_from_string("sigverify-inkball-model 2\n"), FormatError);
}

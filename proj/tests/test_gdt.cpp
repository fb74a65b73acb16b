#include <gtest/gtest.h>

#include "sigverify/gdt.hpp"
#include "sigverify/testing/oracles.hpp"

using namespace sigverify;

TEST(Gdt, SingleSource) {
  EnergyField in(9, 7, kInfinity);
  in(3, 2) = 0.0;
  const auto out = gdt_quadratic(in);
  for (int y = 0; y < 7; ++y)
    for (int x = 0; x < 9; ++x) EXPECT_EQ(out(x, y), double((x - 3) * (x - 3) + (y - 2) * (y - 2)));
}

TEST(Gdt, OffsetShiftsTheBowl) {
  EnergyField in(9, 7, kInfinity);
  in(3, 2) = 5.0;
  const Point2i o{2, -1};
  const auto out = gdt_quadratic(in, o);
  for (int y = 0; y < 7; ++y)
    for (int x = 0; x < 9; ++x) {
      const int dx = x - 3 - o.x, dy = y - 2 - o.y;
      EXPECT_EQ(out(x, y), 5.0 + dx * dx + dy * dy);
    }
}

TEST(Gdt, Relaxation) {
  SyntheticRng rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const auto in = oracle::random_field(rng, 1 + rng.uniform_int(0, 11), 1 + rng.uniform_int(0, 11));
    const auto out = gdt_quadratic(in);
    for (std::size_t i = 0; i < in.size(); ++i) EXPECT_LE(out.values()[i], in.values()[i]);
  }
}

TEST(Gdt, RandomFieldsMatchBruteForce) {
  SyntheticRng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const int w = 1 + rng.uniform_int(0, 11), h = 1 + rng.uniform_int(0, 11);
    const auto in = oracle::random_field(rng, w, h);
    const Point2i o{rng.uniform_int(-15, 15), rng.uniform_int(-15, 15)};
    ASSERT_EQ(gdt_quadratic(in, o), oracle::brute_force_gdt(in, o)) << "trial " << trial;
  }
}

TEST(Gdt, AllInfinite) {
  const EnergyField in(5, 4, kInfinity);
  for (double v : gdt_quadratic(in, {1, 1})) EXPECT_TRUE(std::isinf(v));
}

TEST(Gdt, DistanceTransformOfRow) {
  std::vector<Point2i> row;
  for (int x = 0; x < 10; ++x) row.push_back({x, 3});
  const auto dt = squared_distance_transform(10, 8, row);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 10; ++x) EXPECT_EQ(dt(x, y), double((y - 3) * (y - 3)));
}

TEST(Gdt, EmptyField) {
  EXPECT_TRUE(gdt_quadratic(EnergyField(0, 0)).empty());
}

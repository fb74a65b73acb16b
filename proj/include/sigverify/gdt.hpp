#pragma once

// Generalized distance transform under a quadratic cost (lower envelope of
// parabolas, separable, linear in the number of cells).

#include <cmath>
#include <limits>
#include <vector>

#include "sigverify/grid.hpp"

namespace sigverify {

using EnergyField = Grid<double>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

namespace detail {

struct EnvelopeScratch {
  std::vector<int> v;
  std::vector<double> z;
  std::vector<double> f;
  std::vector<double> out;
};

/// out[q] = min_u (q - shift - u)^2 + f[u] over finite samples u in [0, n).
/// Query positions may fall outside [0, n); they are evaluated on the same
/// envelope. All-infinite input gives an all-infinite output.
inline void envelope_1d(EnvelopeScratch& s, int n, int shift) {
  s.v.resize(std::size_t(n));
  s.z.resize(std::size_t(n) + 1);
  s.out.assign(std::size_t(n), kInfinity);
  const auto& f = s.f;
  int k = -1;
  for (int q = 0; q < n; ++q) {
    const double fq = f[std::size_t(q)];
    if (std::isinf(fq)) continue;
    if (k < 0) {
      k = 0;
      s.v[0] = q;
      s.z[0] = -kInfinity;
      s.z[1] = kInfinity;
      continue;
    }
    auto intersect = [&](int p) {
      return ((fq + double(q) * q) - (f[std::size_t(p)] + double(p) * p)) / (2.0 * q - 2.0 * p);
    };
    double x = intersect(s.v[std::size_t(k)]);
    while (x <= s.z[std::size_t(k)]) {
      --k;
      x = intersect(s.v[std::size_t(k)]);
    }
    ++k;
    s.v[std::size_t(k)] = q;
    s.z[std::size_t(k)] = x;
    s.z[std::size_t(k) + 1] = kInfinity;
  }
  if (k < 0) return;
  int j = 0;
  for (int q = 0; q < n; ++q) {
    const double pos = double(q - shift);
    while (s.z[std::size_t(j) + 1] < pos) ++j;
    const double d = pos - s.v[std::size_t(j)];
    s.out[std::size_t(q)] = d * d + f[std::size_t(s.v[std::size_t(j)])];
  }
}

}  // namespace detail

/// out(v) = min_u ||(v - u) - offset||^2 + in(u), u ranging over the grid.
/// Exact for every v, including when v - offset lies outside the grid.
inline EnergyField gdt_quadratic(const EnergyField& in, Point2i offset = {0, 0}) {
  const int w = in.width(), h = in.height();
  EnergyField tmp(w, h), out(w, h);
  detail::EnvelopeScratch s;
  s.f.resize(std::size_t(h));
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) s.f[std::size_t(y)] = in(x, y);
    detail::envelope_1d(s, h, offset.y);
    for (int y = 0; y < h; ++y) tmp(x, y) = s.out[std::size_t(y)];
  }
  s.f.resize(std::size_t(w));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) s.f[std::size_t(x)] = tmp(x, y);
    detail::envelope_1d(s, w, offset.x);
    for (int x = 0; x < w; ++x) out(x, y) = s.out[std::size_t(x)];
  }
  return out;
}

/// Squared Euclidean distance to the nearest source cell.
inline EnergyField squared_distance_transform(int width, int height,
                                              const std::vector<Point2i>& sources) {
  EnergyField seed(width, height, kInfinity);
  for (auto p : sources)
    if (seed.contains(p)) seed(p) = 0.0;
  return gdt_quadratic(seed);
}

}  // namespace sigverify

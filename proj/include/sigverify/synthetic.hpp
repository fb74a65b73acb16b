#pragma once

// Deterministic synthetic signature-like rasters: each user owns a template
// of smooth pen strokes (chains of cubic Bezier segments); genuine samples
// perturb the control points slightly, skilled forgeries perturb them more.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "sigverify/errors.hpp"
#include "sigverify/grid.hpp"
#include "sigverify/imaging.hpp"

namespace sigverify {

/// Platform-independent variates on top of mt19937_64 raw output.
class SyntheticRng {
 public:
  explicit SyntheticRng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int uniform_int(int lo, int hi) { return lo + int(uniform() * double(hi - lo + 1)) % (hi - lo + 1); }
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  std::mt19937_64 engine_;
};

using Stroke = std::vector<Point2d>;  // 3k + 1 Bezier control points

struct SignatureTemplate {
  std::vector<Stroke> strokes;
};

struct SyntheticParams {
  int width = 120;
  int height = 64;
  double pen_radius = 1.6;
  double genuine_jitter = 1.2;
  double forgery_jitter = 4.0;
  double genuine_shift = 1.0;
};

inline SignatureTemplate random_template(SyntheticRng& rng, const SyntheticParams& p) {
  SignatureTemplate t;
  const int strokes = rng.uniform_int(1, 3);
  const double margin = 8.0;
  double x = rng.uniform(margin, p.width * 0.3);
  for (int s = 0; s < strokes; ++s) {
    const int segments = rng.uniform_int(2, 4);
    Stroke stroke;
    stroke.push_back({x, rng.uniform(margin, p.height - margin)});
    for (int k = 0; k < segments * 3; ++k) {
      x = std::min(p.width - margin, x + rng.uniform(2.0, 10.0));
      stroke.push_back({x, rng.uniform(margin, p.height - margin)});
    }
    t.strokes.push_back(std::move(stroke));
    x = std::min(p.width - margin, x + rng.uniform(3.0, 8.0)) * 0.8;
  }
  return t;
}

inline SignatureTemplate perturb(const SignatureTemplate& t, SyntheticRng& rng, double jitter, double shift) {
  const Point2d offset{shift * rng.normal(), shift * rng.normal()};
  SignatureTemplate out = t;
  for (auto& stroke : out.strokes)
    for (auto& c : stroke) c = c + offset + Point2d{jitter * rng.normal(), jitter * rng.normal()};
  return out;
}

/// Renders strokes with a round pen; ink is dark, background 255.
inline GrayImage render_signature(const SignatureTemplate& t, const SyntheticParams& p) {
  Grid<double> dist(p.width, p.height, std::numeric_limits<double>::infinity());
  const int reach = int(std::ceil(p.pen_radius)) + 1;
  auto stamp = [&](Point2d c) {
    const int x0 = int(std::floor(c.x)) - reach, x1 = int(std::ceil(c.x)) + reach;
    const int y0 = int(std::floor(c.y)) - reach, y1 = int(std::ceil(c.y)) + reach;
    for (int y = std::max(0, y0); y <= std::min(p.height - 1, y1); ++y)
      for (int x = std::max(0, x0); x <= std::min(p.width - 1, x1); ++x)
        dist(x, y) = std::min(dist(x, y), std::hypot(x - c.x, y - c.y));
  };
  for (const auto& stroke : t.strokes) {
    for (std::size_t k = 0; k + 3 < stroke.size(); k += 3) {
      const auto &a = stroke[k], &b = stroke[k + 1], &c = stroke[k + 2], &d = stroke[k + 3];
      const double length = norm(b - a) + norm(c - b) + norm(d - c);
      const int steps = std::max(4, int(length * 4.0));
      for (int i = 0; i <= steps; ++i) {
        const double s = double(i) / steps, r = 1.0 - s;
        const double w0 = r * r * r, w1 = 3 * r * r * s, w2 = 3 * r * s * s, w3 = s * s * s;
        stamp({w0 * a.x + w1 * b.x + w2 * c.x + w3 * d.x, w0 * a.y + w1 * b.y + w2 * c.y + w3 * d.y});
      }
    }
  }
  GrayImage img(p.width, p.height, 255);
  for (std::size_t i = 0; i < img.size(); ++i) {
    const double coverage = std::clamp(p.pen_radius + 0.5 - dist.values()[i], 0.0, 1.0);
    img.values()[i] = std::uint8_t(std::lround(255.0 * (1.0 - coverage) + 20.0 * coverage));
  }
  return img;
}

struct SyntheticUser {
  std::string id;
  std::vector<GrayImage> genuine;
  std::vector<GrayImage> forgeries;
};

inline std::vector<SyntheticUser> synthetic_dataset(int users, int genuine, int forgeries, std::uint64_t seed,
                                                    const SyntheticParams& p = {}) {
  if (users < 1 || genuine < 1 || forgeries < 0) throw ParameterError("bad synthetic dataset size");
  SyntheticRng rng(seed);
  std::vector<SyntheticUser> out;
  for (int u = 0; u < users; ++u) {
    SyntheticUser user;
    char id[16];
    std::snprintf(id, sizeof id, "u%02d", u + 1);
    user.id = id;
    const auto base = random_template(rng, p);
    for (int g = 0; g < genuine; ++g)
      user.genuine.push_back(render_signature(perturb(base, rng, p.genuine_jitter, p.genuine_shift), p));
    for (int f = 0; f < forgeries; ++f)
      user.forgeries.push_back(render_signature(perturb(base, rng, p.forgery_jitter, p.genuine_shift), p));
    out.push_back(std::move(user));
  }
  return out;
}

}  // namespace sigverify

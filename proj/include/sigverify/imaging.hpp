#pragma once

// Preprocessing from grayscale scans to single-pixel-wide skeletons:
// difference-of-Gaussian enhancement, global binarization and Zhang-Suen
// thinning. Ink is dark: a pixel is ink iff its intensity is below the
// threshold.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "sigverify/errors.hpp"
#include "sigverify/grid.hpp"

namespace sigverify {

using GrayImage = Grid<std::uint8_t>;

class BinaryImage {
 public:
  BinaryImage() = default;
  BinaryImage(int width, int height) : mask_(width, height, 0) {}
  explicit BinaryImage(Grid<std::uint8_t> mask) : mask_(std::move(mask)) {
    for (auto& v : mask_) v = v ? 1 : 0;
  }

  int width() const { return mask_.width(); }
  int height() const { return mask_.height(); }
  bool contains(int x, int y) const { return mask_.contains(x, y); }

  /// Out-of-frame pixels read as background.
  bool ink(int x, int y) const { return mask_.contains(x, y) && mask_(x, y) != 0; }
  bool ink(Point2i p) const { return ink(p.x, p.y); }
  void set(int x, int y, bool value) { mask_(x, y) = value ? 1 : 0; }
  void set(Point2i p, bool value) { set(p.x, p.y, value); }

  std::size_t ink_count() const {
    return std::size_t(std::count(mask_.begin(), mask_.end(), std::uint8_t{1}));
  }

  /// Ink pixel coordinates in raster order.
  std::vector<Point2i> points() const {
    std::vector<Point2i> pts;
    for (int y = 0; y < height(); ++y)
      for (int x = 0; x < width(); ++x)
        if (mask_(x, y)) pts.push_back({x, y});
    return pts;
  }

  const Grid<std::uint8_t>& mask() const { return mask_; }

  friend bool operator==(const BinaryImage&, const BinaryImage&) = default;

 private:
  Grid<std::uint8_t> mask_;
};

/// A thinned binary raster. Construction from an arbitrary BinaryImage is
/// allowed (fixtures, cached files); thin_zhang_suen is the normal producer.
class SkeletonImage : public BinaryImage {
 public:
  SkeletonImage() = default;
  SkeletonImage(int width, int height) : BinaryImage(width, height) {}
  explicit SkeletonImage(BinaryImage image) : BinaryImage(std::move(image)) {}
};

// ---------------------------------------------------------------------------
// Difference of Gaussians

namespace detail {

// Symmetric reflection (abc|cba), repeated for kernels wider than the image.
inline int reflect_index(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * n;
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

}  // namespace detail

/// Normalized 1-D Gaussian with radius ceil(3 sigma).
inline std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) throw ParameterError("gaussian sigma must be positive");
  const int radius = int(std::ceil(3.0 * sigma));
  std::vector<double> k(std::size_t(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[std::size_t(i + radius)] = std::exp(-0.5 * double(i * i) / (sigma * sigma));
    sum += k[std::size_t(i + radius)];
  }
  for (auto& v : k) v /= sum;
  return k;
}

inline Grid<double> convolve_rows(const Grid<double>& in, const std::vector<double>& kernel) {
  const int radius = int(kernel.size() / 2);
  Grid<double> out(in.width(), in.height(), 0.0);
  for (int y = 0; y < in.height(); ++y)
    for (int x = 0; x < in.width(); ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k)
        acc += kernel[std::size_t(k + radius)] * in(detail::reflect_index(x + k, in.width()), y);
      out(x, y) = acc;
    }
  return out;
}

inline Grid<double> convolve_cols(const Grid<double>& in, const std::vector<double>& kernel) {
  const int radius = int(kernel.size() / 2);
  Grid<double> out(in.width(), in.height(), 0.0);
  for (int y = 0; y < in.height(); ++y)
    for (int x = 0; x < in.width(); ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k)
        acc += kernel[std::size_t(k + radius)] * in(x, detail::reflect_index(y + k, in.height()));
      out(x, y) = acc;
    }
  return out;
}

enum class PassOrder { kRowsFirst, kColumnsFirst };

inline Grid<double> gaussian_blur(const Grid<double>& in, double sigma,
                                  PassOrder order = PassOrder::kRowsFirst) {
  const auto kernel = gaussian_kernel(sigma);
  if (order == PassOrder::kRowsFirst) return convolve_cols(convolve_rows(in, kernel), kernel);
  return convolve_rows(convolve_cols(in, kernel), kernel);
}

inline Grid<double> to_real(const GrayImage& img) {
  Grid<double> out(img.width(), img.height());
  std::transform(img.begin(), img.end(), out.begin(), [](std::uint8_t v) { return double(v); });
  return out;
}

/// Raw DoG response G_narrow*img - G_wide*img, before rescaling.
inline Grid<double> dog_response(const GrayImage& img, double sigma_narrow, double sigma_wide,
                                 PassOrder order = PassOrder::kRowsFirst) {
  if (!(sigma_narrow > 0.0) || !(sigma_narrow < sigma_wide)) {
    throw ParameterError("DoG requires 0 < sigma_narrow < sigma_wide");
  }
  const auto real = to_real(img);
  auto narrow = gaussian_blur(real, sigma_narrow, order);
  const auto wide = gaussian_blur(real, sigma_wide, order);
  for (std::size_t i = 0; i < narrow.size(); ++i) narrow.values()[i] -= wide.values()[i];
  return narrow;
}

/// Linear min-max mapping to [0,255]; a flat response maps to background.
inline GrayImage rescale_to_gray(const Grid<double>& response) {
  GrayImage out(response.width(), response.height(), 255);
  if (response.empty()) return out;
  const auto [lo, hi] = std::minmax_element(response.begin(), response.end());
  const double range = *hi - *lo;
  if (range <= 1e-6) return out;
  for (std::size_t i = 0; i < response.size(); ++i) {
    const double v = 255.0 * (response.values()[i] - *lo) / range;
    out.values()[i] = std::uint8_t(std::clamp(std::lround(v), 0L, 255L));
  }
  return out;
}

inline GrayImage dog_enhance(const GrayImage& img, double sigma_narrow = 1.0,
                             double sigma_wide = 2.0) {
  return rescale_to_gray(dog_response(img, sigma_narrow, sigma_wide));
}

// ---------------------------------------------------------------------------
// Binarization

/// Otsu threshold t, meaning ink iff value < t. A plateau of equally good
/// thresholds resolves to its midpoint. Uniform images yield their value
/// (no ink).
inline int otsu_threshold(const GrayImage& img) {
  std::array<double, 256> hist{};
  for (auto v : img) hist[v] += 1.0;
  const double total = double(img.size());
  if (total == 0.0) return 0;

  double sum_all = 0.0;
  for (int i = 0; i < 256; ++i) sum_all += i * hist[std::size_t(i)];

  std::array<double, 257> score{};
  double w0 = 0.0, sum0 = 0.0;
  double best = 0.0;
  for (int t = 1; t <= 255; ++t) {
    w0 += hist[std::size_t(t - 1)];
    sum0 += (t - 1) * hist[std::size_t(t - 1)];
    const double w1 = total - w0;
    if (w0 == 0.0 || w1 == 0.0) continue;
    const double mu0 = sum0 / w0;
    const double mu1 = (sum_all - sum0) / w1;
    score[std::size_t(t)] = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    best = std::max(best, score[std::size_t(t)]);
  }
  if (best == 0.0) return img.values().front();

  const double tol = best * 1e-12;
  int first = 1;
  while (score[std::size_t(first)] < best - tol) ++first;
  int last = first;
  while (last + 1 <= 255 && score[std::size_t(last + 1)] >= best - tol) ++last;
  return (first + last) / 2;
}

inline BinaryImage binarize_global(const GrayImage& img, std::optional<int> threshold = {}) {
  if (threshold && (*threshold < 0 || *threshold > 255)) {
    throw ParameterError("binarization threshold must lie in [0,255]");
  }
  const int t = threshold ? *threshold : otsu_threshold(img);
  BinaryImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) out.set(x, y, img(x, y) < t);
  return out;
}

// ---------------------------------------------------------------------------
// Zhang-Suen thinning

/// Neighbors P2..P9 in the classic order: N, NE, E, SE, S, SW, W, NW.
inline constexpr std::array<Point2i, 8> kClockwiseNeighbors{
    {{0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}}};

/// Deletion test of one Zhang-Suen subiteration (0 or 1) for an ink pixel.
inline bool zhang_suen_deletable(const BinaryImage& img, int x, int y, int subiteration) {
  if (!img.ink(x, y)) return false;
  std::array<int, 8> p{};
  for (std::size_t i = 0; i < 8; ++i)
    p[i] = img.ink(x + kClockwiseNeighbors[i].x, y + kClockwiseNeighbors[i].y) ? 1 : 0;
  int b = 0, a = 0;
  for (std::size_t i = 0; i < 8; ++i) {
    b += p[i];
    if (p[i] == 0 && p[(i + 1) % 8] == 1) ++a;
  }
  if (b < 2 || b > 6 || a != 1) return false;
  // p[0]=P2, p[2]=P4, p[4]=P6, p[6]=P8
  if (subiteration == 0) return p[0] * p[2] * p[4] == 0 && p[2] * p[4] * p[6] == 0;
  return p[0] * p[2] * p[6] == 0 && p[0] * p[4] * p[6] == 0;
}

inline SkeletonImage thin_zhang_suen(const BinaryImage& input) {
  BinaryImage img = input;
  std::vector<Point2i> marked;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int sub = 0; sub < 2; ++sub) {
      marked.clear();
      for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
          if (zhang_suen_deletable(img, x, y, sub)) marked.push_back({x, y});
      for (auto p : marked) img.set(p, false);
      changed = changed || !marked.empty();
    }
  }
  return SkeletonImage(std::move(img));
}

/// Full preprocessing chain used by the pipeline.
struct PreprocessParams {
  double sigma_narrow = 1.0;
  double sigma_wide = 2.0;
  std::optional<int> threshold;  // Otsu when empty
};

inline SkeletonImage skeletonize(const GrayImage& img, const PreprocessParams& params = {}) {
  return thin_zhang_suen(
      binarize_global(dog_enhance(img, params.sigma_narrow, params.sigma_wide), params.threshold));
}

/// Area-averaging downscale by factor in (0,1]; factor 1 returns the input.
inline GrayImage downscale(const GrayImage& img, double factor) {
  if (!(factor > 0.0) || factor > 1.0) throw ParameterError("scale factor must lie in (0,1]");
  if (factor == 1.0) return img;
  const int w = std::max(1, int(std::lround(img.width() * factor)));
  const int h = std::max(1, int(std::lround(img.height() * factor)));
  GrayImage out(w, h);
  const double sx = double(img.width()) / w, sy = double(img.height()) / h;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const int x0 = int(std::floor(x * sx)), x1 = std::max(x0 + 1, int(std::floor((x + 1) * sx)));
      const int y0 = int(std::floor(y * sy)), y1 = std::max(y0 + 1, int(std::floor((y + 1) * sy)));
      double acc = 0.0;
      int n = 0;
      for (int yy = y0; yy < std::min(y1, img.height()); ++yy)
        for (int xx = x0; xx < std::min(x1, img.width()); ++xx) {
          acc += img(xx, yy);
          ++n;
        }
      out(x, y) = std::uint8_t(std::lround(acc / std::max(n, 1)));
    }
  return out;
}

}  // namespace sigverify

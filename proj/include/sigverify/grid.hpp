#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

#include "sigverify/errors.hpp"

namespace sigverify {

struct Point2i {
  int x = 0;
  int y = 0;

  friend bool operator==(const Point2i&, const Point2i&) = default;
  friend Point2i operator+(Point2i a, Point2i b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2i operator-(Point2i a, Point2i b) { return {a.x - b.x, a.y - b.y}; }
};

struct Point2d {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2d&, const Point2d&) = default;
  friend Point2d operator+(Point2d a, Point2d b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2d operator-(Point2d a, Point2d b) { return {a.x - b.x, a.y - b.y}; }
};

inline double squared_norm(Point2d p) { return p.x * p.x + p.y * p.y; }
inline double norm(Point2d p) { return std::sqrt(squared_norm(p)); }
inline Point2d to_double(Point2i p) { return {double(p.x), double(p.y)}; }

/// Dense row-major 2-D raster.
template <class T>
class Grid {
 public:
  using value_type = T;

  Grid() = default;

  Grid(int width, int height, T fill = T{}) : width_(width), height_(height) {
    if (width < 0 || height < 0) throw FormatError("grid dimensions must be non-negative");
    data_.assign(std::size_t(width) * std::size_t(height), fill);
  }

  Grid(int width, int height, std::vector<T> values)
      : width_(width), height_(height), data_(std::move(values)) {
    if (width < 0 || height < 0 || data_.size() != std::size_t(width) * std::size_t(height)) {
      throw FormatError("grid value count does not match dimensions");
    }
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }
  bool contains(Point2i p) const { return contains(p.x, p.y); }

  T& operator()(int x, int y) {
    assert(contains(x, y));
    return data_[std::size_t(y) * std::size_t(width_) + std::size_t(x)];
  }
  const T& operator()(int x, int y) const {
    assert(contains(x, y));
    return data_[std::size_t(y) * std::size_t(width_) + std::size_t(x)];
  }
  T& operator()(Point2i p) { return (*this)(p.x, p.y); }
  const T& operator()(Point2i p) const { return (*this)(p.x, p.y); }

  std::vector<T>& values() { return data_; }
  const std::vector<T>& values() const { return data_; }

  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

}  // namespace sigverify

#pragma once

// Local topology of skeleton rasters shared by keypoint-graph extraction and
// inkball model construction.
//
// Zhang-Suen output keeps 4-connected staircase corners, so a raw 8-neighbor
// count would report a junction at every corner of a diagonal stroke. Branch
// adjacency drops a diagonal link whenever one of the two pixels bridging it
// is ink; the bridged path still connects the pair, so 8-connectivity is
// unchanged while stroke pixels see exactly two neighbors.

#include <queue>
#include <vector>

#include "sigverify/imaging.hpp"

namespace sigverify {

inline bool diagonal_bridged(const BinaryImage& img, Point2i p, Point2i d) {
  return img.ink(p.x + d.x, p.y) || img.ink(p.x, p.y + d.y);
}

/// Ink neighbors under branch adjacency, clockwise from north.
inline std::vector<Point2i> branch_neighbors(const BinaryImage& img, Point2i p) {
  std::vector<Point2i> out;
  out.reserve(4);
  for (auto d : kClockwiseNeighbors) {
    const Point2i q = p + d;
    if (!img.ink(q)) continue;
    if (d.x != 0 && d.y != 0 && diagonal_bridged(img, p, d)) continue;
    out.push_back(q);
  }
  return out;
}

inline int branch_degree(const BinaryImage& img, Point2i p) {
  int n = 0;
  for (auto d : kClockwiseNeighbors) {
    if (!img.ink(p + d)) continue;
    if (d.x != 0 && d.y != 0 && diagonal_bridged(img, p, d)) continue;
    ++n;
  }
  return n;
}

/// Step length of a move between 8-neighbors.
inline double step_length(Point2i from, Point2i to) {
  return (from.x != to.x && from.y != to.y) ? 1.4142135623730951 : 1.0;
}

struct SkeletonTopology {
  Grid<int> degree;     // branch degree, -1 on background
  Grid<int> component;  // 8-connected component id, -1 on background
  int component_count = 0;
  std::vector<Point2i> endpoints;  // degree 1, raster order
  /// Junction pixels (degree >= 3) grouped into 8-connected clusters; each
  /// cluster is raster ordered and clusters are ordered by first pixel.
  std::vector<std::vector<Point2i>> junction_clusters;
};

inline SkeletonTopology analyze_skeleton(const BinaryImage& skel) {
  SkeletonTopology topo;
  const int w = skel.width(), h = skel.height();
  topo.degree = Grid<int>(w, h, -1);
  topo.component = Grid<int>(w, h, -1);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (skel.ink(x, y)) topo.degree(x, y) = branch_degree(skel, {x, y});

  std::queue<Point2i> queue;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!skel.ink(x, y) || topo.component(x, y) >= 0) continue;
      const int id = topo.component_count++;
      topo.component(x, y) = id;
      queue.push({x, y});
      while (!queue.empty()) {
        const Point2i p = queue.front();
        queue.pop();
        for (auto d : kClockwiseNeighbors) {
          const Point2i q = p + d;
          if (skel.ink(q) && topo.component(q) < 0) {
            topo.component(q) = id;
            queue.push(q);
          }
        }
      }
    }

  Grid<int> cluster(w, h, -1);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const int deg = topo.degree(x, y);
      if (deg == 1) topo.endpoints.push_back({x, y});
      if (deg < 3 || cluster(x, y) >= 0) continue;
      const int id = int(topo.junction_clusters.size());
      topo.junction_clusters.emplace_back();
      cluster(x, y) = id;
      queue.push({x, y});
      while (!queue.empty()) {
        const Point2i p = queue.front();
        queue.pop();
        topo.junction_clusters.back().push_back(p);
        for (auto d : kClockwiseNeighbors) {
          const Point2i q = p + d;
          if (skel.ink(q) && topo.degree(q) >= 3 && cluster(q) < 0) {
            cluster(q) = id;
            queue.push(q);
          }
        }
      }
      auto& c = topo.junction_clusters.back();
      std::sort(c.begin(), c.end(),
                [](Point2i a, Point2i b) { return a.y != b.y ? a.y < b.y : a.x < b.x; });
    }
  return topo;
}

/// Cluster pixel closest to the cluster centroid (ties: raster order).
inline Point2i cluster_representative(const std::vector<Point2i>& cluster) {
  Point2d c;
  for (auto p : cluster) c = c + to_double(p);
  c = {c.x / double(cluster.size()), c.y / double(cluster.size())};
  Point2i best = cluster.front();
  double best_d = squared_norm(to_double(best) - c);
  for (auto p : cluster) {
    const double d = squared_norm(to_double(p) - c);
    if (d < best_d) {
      best = p;
      best_d = d;
    }
  }
  return best;
}

}  // namespace sigverify

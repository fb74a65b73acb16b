#pragma once

// Inkball models: a rooted tree of skeleton points with rest offsets, matched
// to an observation skeleton by minimizing deformation plus placement energy
// with tree dynamic programming. Each node's energy functional lives on a
// pixel grid covering the observation plus a margin, and the per-edge
// minimization is one generalized distance transform.
//
// The augmented variant carries the local skeleton tangent at each node and
// scales the placement distance to ink of angle beta by
//   delta = 1 + (w_alpha / 64) * angle_diff(alpha, beta),
// which reduces to the plain model when w_alpha = 0 or the angles agree.
// Angles are quantized to 16 bins of width pi/16, node and ink alike.

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "sigverify/errors.hpp"
#include "sigverify/gdt.hpp"
#include "sigverify/graph.hpp"
#include "sigverify/imaging.hpp"
#include "sigverify/skeleton_topology.hpp"
#include "sigverify/text_format.hpp"

namespace sigverify {

inline constexpr int kAngleBins = 16;
inline constexpr double kAngleWeightScale = 64.0;

/// Undirected line-angle difference, in [0, pi/2].
inline double angle_diff(double a, double b) {
  constexpr double pi = std::numbers::pi;
  auto mod_pi = [](double v) {
    double m = std::fmod(v, pi);
    return m < 0.0 ? m + pi : m;
  };
  return std::min(mod_pi(a - b), mod_pi(b - a));
}

inline int angle_bin(double angle) {
  constexpr double pi = std::numbers::pi;
  double a = std::fmod(angle, pi);
  if (a < 0.0) a += pi;
  return std::clamp(int(a / (pi / kAngleBins)), 0, kAngleBins - 1);
}

inline double angle_bin_center(int bin) { return (bin + 0.5) * std::numbers::pi / kAngleBins; }

struct MatchParams {
  double lambda = 1.0;
  double tau = 64.0;
  double w_alpha = 64.0;
  bool augmented = true;
  /// Grid margin on each side of the observation; unset means one model
  /// bounding box per axis.
  std::optional<int> margin;

  void validate() const {
    if (!(lambda >= 0.0)) throw ParameterError("lambda must be >= 0");
    if (!(tau > 0.0)) throw ParameterError("tau must be > 0");
    if (!(w_alpha >= 0.0)) throw ParameterError("w_alpha must be >= 0");
    if (margin && *margin < 0) throw ParameterError("margin must be >= 0");
  }
};

/// Placement factor for a node tangent bin against ink of another bin.
inline double placement_factor(int node_bin, int ink_bin, double w_alpha) {
  return 1.0 + (w_alpha / kAngleWeightScale) *
                   angle_diff(angle_bin_center(node_bin), angle_bin_center(ink_bin));
}

// ---------------------------------------------------------------------------
// Tangents

struct TangentMap {
  Grid<double> angle;  // [0, pi) on skeleton pixels, NaN elsewhere
  Grid<int> arc_id;    // arc index, -1 on junctions and background
  std::vector<std::vector<Point2i>> arcs;
};

/// Splits the skeleton into arcs at junctions and assigns every skeleton
/// pixel a tangent angle in [0, pi): pixel-to-pixel directions along each
/// arc, smoothed with a Gaussian (sigma 2) on the doubled-angle unit vector
/// so that 0 and pi are treated as the same direction. Junction pixels take
/// the angle of the adjacent arc with the lowest id.
inline TangentMap compute_tangents(const SkeletonImage& skel, double sigma = 2.0) {
  constexpr double pi = std::numbers::pi;
  const int w = skel.width(), h = skel.height();
  TangentMap map{Grid<double>(w, h, std::nan("")), Grid<int>(w, h, -1), {}};
  const auto topo = analyze_skeleton(skel);
  auto is_junction = [&](Point2i p) { return topo.degree(p) >= 3; };
  auto arc_neighbors = [&](Point2i p) {
    std::vector<Point2i> out;
    for (auto q : branch_neighbors(skel, p))
      if (!is_junction(q)) out.push_back(q);
    return out;
  };

  struct ArcWalk {
    std::vector<Point2i> pixels;
    bool closed = false;
    std::optional<Point2i> before, after;  // junction context at open ends
  };
  std::vector<ArcWalk> walks;
  auto walk_from = [&](Point2i start, bool closed) {
    ArcWalk walk;
    walk.closed = closed;
    Point2i prev{-1, -1}, cur = start;
    for (;;) {
      map.arc_id(cur) = int(walks.size());
      walk.pixels.push_back(cur);
      std::optional<Point2i> next;
      for (auto q : arc_neighbors(cur))
        if (!(q == prev) && map.arc_id(q) < 0) {
          next = q;
          break;
        }
      if (!next) break;
      prev = cur;
      cur = *next;
    }
    if (!closed) {
      auto junction_next_to = [&](Point2i p, std::optional<Point2i> skip) -> std::optional<Point2i> {
        for (auto q : branch_neighbors(skel, p))
          if (is_junction(q) && !(skip && q == *skip)) return q;
        return std::nullopt;
      };
      walk.before = junction_next_to(walk.pixels.front(), std::nullopt);
      walk.after = junction_next_to(walk.pixels.back(),
                                    walk.pixels.size() == 1 ? walk.before : std::nullopt);
    }
    walks.push_back(std::move(walk));
  };

  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const Point2i p{x, y};
      if (!skel.ink(p) || is_junction(p) || map.arc_id(p) >= 0) continue;
      if (arc_neighbors(p).size() <= 1) walk_from(p, false);
    }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const Point2i p{x, y};
      if (skel.ink(p) && !is_junction(p) && map.arc_id(p) < 0) walk_from(p, true);
    }

  const auto kernel = gaussian_kernel(sigma);
  const int radius = int(kernel.size() / 2);
  for (const auto& walk : walks) {
    const int n = int(walk.pixels.size());
    std::vector<double> c(static_cast<std::size_t>(n)), s(static_cast<std::size_t>(n));
    auto at = [&](int i) -> std::optional<Point2i> {
      if (walk.closed) return walk.pixels[std::size_t(((i % n) + n) % n)];
      if (i < 0) return i == -1 ? walk.before : std::nullopt;
      if (i >= n) return i == n ? walk.after : std::nullopt;
      return walk.pixels[std::size_t(i)];
    };
    for (int i = 0; i < n; ++i) {
      auto a = at(i - 1), b = at(i + 1);
      if (!a) a = at(i);
      if (!b) b = at(i);
      const double dx = b->x - a->x, dy = b->y - a->y;
      const double theta = (dx == 0.0 && dy == 0.0) ? 0.0 : std::atan2(dy, dx);
      c[std::size_t(i)] = std::cos(2.0 * theta);
      s[std::size_t(i)] = std::sin(2.0 * theta);
    }
    for (int i = 0; i < n; ++i) {
      double sc = 0.0, ss = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        int j = i + k;
        if (walk.closed) {
          j = ((j % n) + n) % n;
        } else if (j < 0 || j >= n) {
          continue;
        }
        sc += kernel[std::size_t(k + radius)] * c[std::size_t(j)];
        ss += kernel[std::size_t(k + radius)] * s[std::size_t(j)];
      }
      if (std::hypot(sc, ss) < 1e-12) {
        sc = c[std::size_t(i)];
        ss = s[std::size_t(i)];
      }
      double theta = 0.5 * std::atan2(ss, sc);
      if (theta < 0.0) theta += pi;
      if (theta >= pi) theta -= pi;
      map.angle(walk.pixels[std::size_t(i)]) = theta;
    }
  }
  map.arcs.reserve(walks.size());
  for (auto& walk : walks) map.arcs.push_back(std::move(walk.pixels));

  for (const auto& cluster : topo.junction_clusters) {
    int best_arc = -1;
    Point2i best_pixel{};
    for (auto p : cluster)
      for (auto q : branch_neighbors(skel, p)) {
        const int id = map.arc_id(q);
        if (id >= 0 && (best_arc < 0 || id < best_arc)) {
          best_arc = id;
          best_pixel = q;
        }
      }
    const double angle = best_arc >= 0 ? map.angle(best_pixel) : 0.0;
    for (auto p : cluster) map.angle(p) = angle;
  }
  return map;
}

// ---------------------------------------------------------------------------
// Model

struct InkballModel {
  /// Rest positions; index 0 is the root and parents precede children.
  std::vector<Point2i> nodes;
  std::vector<int> parent;  // -1 for the root
  std::vector<std::vector<int>> children;
  /// offsets[i] = nodes[parent[i]] - nodes[i]; (0,0) for the root.
  std::vector<Point2i> offsets;
  std::vector<int> subtree_size;
  /// Per-node tangent angles, present iff the model is augmented.
  std::optional<std::vector<double>> tangents;
  double d_inkball = 0.0;
  std::string source_id;

  int size() const { return int(nodes.size()); }
  bool augmented() const { return tangents.has_value(); }

  /// Recomputes children, offsets and subtree sizes from nodes and parent.
  void finalize() {
    const int n = size();
    children.assign(std::size_t(n), {});
    offsets.assign(std::size_t(n), Point2i{0, 0});
    subtree_size.assign(std::size_t(n), 1);
    for (int i = 1; i < n; ++i) {
      const int p = parent[std::size_t(i)];
      children[std::size_t(p)].push_back(i);
      offsets[std::size_t(i)] = nodes[std::size_t(p)] - nodes[std::size_t(i)];
    }
    for (int i = n - 1; i > 0; --i) subtree_size[std::size_t(parent[std::size_t(i)])] += subtree_size[std::size_t(i)];
  }

  void validate() const {
    const int n = size();
    if (n == 0) throw FormatError("inkball model has no nodes");
    if (int(parent.size()) != n || parent[0] != -1) throw FormatError("bad root");
    for (int i = 1; i < n; ++i) {
      const int p = parent[std::size_t(i)];
      if (p < 0 || p >= i) throw FormatError("parents must precede children");
    }
    if (tangents && int(tangents->size()) != n) throw FormatError("tangent count mismatch");
  }

  friend bool operator==(const InkballModel&, const InkballModel&) = default;
};

namespace detail {

struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(int n) : parent(std::size_t(n)) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[std::size_t(x)] != x) {
      parent[std::size_t(x)] = parent[std::size_t(parent[std::size_t(x)])];
      x = parent[std::size_t(x)];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::size_t(std::max(a, b))] = std::min(a, b);
    return true;
  }
};

inline long long squared_dist(Point2i a, Point2i b) {
  const long long dx = a.x - b.x, dy = a.y - b.y;
  return dx * dx + dy * dy;
}

}  // namespace detail

/// Places inkballs on the skeleton and links them into a tree.
///
/// Nodes go first on every endpoint and junction. Then, repeatedly, the
/// skeleton point whose distance to the nearest node is smallest among those
/// at distance >= D becomes a node, until every point is closer than D.
/// Remaining gaps are filled at the point farthest from all nodes while that
/// distance is at least D * sqrt(2) / 2. Nodes are linked by Kruskal's
/// algorithm on Euclidean distance and rooted at the node nearest the
/// centroid.
inline InkballModel build_model(const SkeletonImage& skel, double d_inkball, bool augmented,
                                std::string source_id = {}) {
  if (!(d_inkball >= 1.0)) throw ParameterError("D_inkball must be >= 1");
  const auto points = skel.points();
  if (points.empty()) throw DomainError("cannot build an inkball model from an empty skeleton");

  const auto topo = analyze_skeleton(skel);
  std::vector<Point2i> placed;
  for (auto p : topo.endpoints) placed.push_back(p);
  for (const auto& cluster : topo.junction_clusters) placed.push_back(cluster_representative(cluster));
  std::sort(placed.begin(), placed.end(),
            [](Point2i a, Point2i b) { return a.y != b.y ? a.y < b.y : a.x < b.x; });

  constexpr long long kFar = std::numeric_limits<long long>::max();
  std::vector<long long> nearest(points.size(), kFar);
  auto update = [&](Point2i node) {
    for (std::size_t k = 0; k < points.size(); ++k)
      nearest[k] = std::min(nearest[k], detail::squared_dist(points[k], node));
  };
  for (auto p : placed) update(p);

  const double d2 = d_inkball * d_inkball;
  for (;;) {
    std::size_t best = points.size();
    for (std::size_t k = 0; k < points.size(); ++k) {
      if (double(nearest[k]) < d2) continue;
      if (best == points.size() || nearest[k] < nearest[best]) best = k;
    }
    if (best == points.size()) break;
    placed.push_back(points[best]);
    update(points[best]);
  }
  const double gap2 = d2 / 2.0;
  for (;;) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < points.size(); ++k)
      if (nearest[k] > nearest[best]) best = k;
    if (double(nearest[best]) < gap2) break;
    placed.push_back(points[best]);
    update(points[best]);
  }

  const int n = int(placed.size());
  struct Link {
    long long d2;
    int a, b;
  };
  std::vector<Link> links;
  links.reserve(std::size_t(n) * std::size_t(n - 1) / 2);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      links.push_back({detail::squared_dist(placed[std::size_t(a)], placed[std::size_t(b)]), a, b});
  std::sort(links.begin(), links.end(), [](const Link& x, const Link& y) {
    if (x.d2 != y.d2) return x.d2 < y.d2;
    return x.a != y.a ? x.a < y.a : x.b < y.b;
  });
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  detail::DisjointSet sets(n);
  int linked = 0;
  for (const auto& l : links) {
    if (linked == n - 1) break;
    if (sets.unite(l.a, l.b)) {
      adj[std::size_t(l.a)].push_back(l.b);
      adj[std::size_t(l.b)].push_back(l.a);
      ++linked;
    }
  }

  Point2d centroid;
  for (auto p : placed) centroid = centroid + to_double(p);
  centroid = {centroid.x / n, centroid.y / n};
  int root = 0;
  for (int i = 1; i < n; ++i)
    if (squared_norm(to_double(placed[std::size_t(i)]) - centroid) <
        squared_norm(to_double(placed[std::size_t(root)]) - centroid))
      root = i;

  // Breadth-first renumbering so the root is 0 and parents precede children.
  InkballModel model;
  model.d_inkball = d_inkball;
  model.source_id = std::move(source_id);
  std::vector<int> new_index(std::size_t(n), -1);
  std::vector<int> order{root};
  new_index[std::size_t(root)] = 0;
  model.parent.push_back(-1);
  for (std::size_t head = 0; head < order.size(); ++head) {
    const int cur = order[head];
    auto next = adj[std::size_t(cur)];
    std::sort(next.begin(), next.end());
    for (int nb : next) {
      if (new_index[std::size_t(nb)] >= 0) continue;
      new_index[std::size_t(nb)] = int(order.size());
      order.push_back(nb);
      model.parent.push_back(new_index[std::size_t(cur)]);
    }
  }
  for (int old : order) model.nodes.push_back(placed[std::size_t(old)]);
  model.finalize();

  if (augmented) {
    const auto tangents = compute_tangents(skel);
    std::vector<double> angles;
    angles.reserve(model.nodes.size());
    for (auto p : model.nodes) angles.push_back(tangents.angle(p));
    model.tangents = std::move(angles);
  }
  return model;
}

// ---------------------------------------------------------------------------
// Placement fields and matching

struct PlacementFields {
  Point2i margin;
  EnergyField plain;                 // squared distance to any ink
  std::vector<EnergyField> by_bin;   // augmented: one field per node angle bin
  double w_alpha = 0.0;

  int width() const { return plain.width(); }
  int height() const { return plain.height(); }
  const EnergyField& for_node(std::optional<double> tangent) const {
    return (tangent && !by_bin.empty()) ? by_bin[std::size_t(angle_bin(*tangent))] : plain;
  }
};

/// Squared placement cost fields over the observation padded by margin.
/// The plain field is the exact squared Euclidean distance transform of the
/// skeleton. For augmented matching the field of node bin b is
///   min_j placement_factor(b, bin(beta_j))^2 * ||t_j - v||^2,
/// obtained from one distance transform per ink angle bin.
inline PlacementFields prepare_observation(const SkeletonImage& obs, Point2i margin,
                                           const MatchParams& params) {
  params.validate();
  if (obs.ink_count() == 0) throw DomainError("observation skeleton is empty");
  PlacementFields fields;
  fields.margin = margin;
  fields.w_alpha = params.w_alpha;
  const int w = obs.width() + 2 * margin.x, h = obs.height() + 2 * margin.y;
  std::vector<Point2i> ink;
  for (auto p : obs.points()) ink.push_back(p + margin);
  fields.plain = squared_distance_transform(w, h, ink);
  if (!params.augmented) return fields;

  const auto tangents = compute_tangents(obs);
  std::vector<std::vector<Point2i>> ink_by_bin(kAngleBins);
  for (auto p : obs.points()) ink_by_bin[std::size_t(angle_bin(tangents.angle(p)))].push_back(p + margin);
  std::vector<std::optional<EnergyField>> per_ink_bin(kAngleBins);
  for (int k = 0; k < kAngleBins; ++k)
    if (!ink_by_bin[std::size_t(k)].empty())
      per_ink_bin[std::size_t(k)] = squared_distance_transform(w, h, ink_by_bin[std::size_t(k)]);

  fields.by_bin.assign(kAngleBins, EnergyField(w, h, kInfinity));
  for (int b = 0; b < kAngleBins; ++b) {
    auto& field = fields.by_bin[std::size_t(b)];
    for (int k = 0; k < kAngleBins; ++k) {
      if (!per_ink_bin[std::size_t(k)]) continue;
      const double f = placement_factor(b, k, params.w_alpha);
      const double f2 = f * f;
      const auto& src = *per_ink_bin[std::size_t(k)];
      for (std::size_t i = 0; i < field.size(); ++i)
        field.values()[i] = std::min(field.values()[i], f2 * src.values()[i]);
    }
  }
  return fields;
}

/// Squared placement field of one node (plain when node_tangent is empty).
inline EnergyField placement_field(const SkeletonImage& obs, std::optional<double> node_tangent,
                                   const MatchParams& params, Point2i margin = {0, 0}) {
  MatchParams p = params;
  p.augmented = params.augmented && node_tangent.has_value();
  auto fields = prepare_observation(obs, margin, p);
  if (!p.augmented) return std::move(fields.plain);
  return std::move(fields.by_bin[std::size_t(angle_bin(*node_tangent))]);
}

inline Point2i model_margin(const InkballModel& model, const MatchParams& params) {
  if (params.margin) return {*params.margin, *params.margin};
  int min_x = model.nodes[0].x, max_x = min_x, min_y = model.nodes[0].y, max_y = min_y;
  for (auto p : model.nodes) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  return {max_x - min_x + 1, max_y - min_y + 1};
}

struct MatchResult {
  double energy = 0.0;
  Point2i root_position;  // observation coordinates, may lie in the margin
};

namespace detail {

// Truncated subtree energy E*'_i over the grid. The largest child subtree is
// solved before this node allocates its accumulator, which keeps the number
// of live fields logarithmic in the model size.
inline EnergyField subtree_energy(const InkballModel& model, const PlacementFields& fields,
                                  const MatchParams& params, int node) {
  auto kids = model.children[std::size_t(node)];
  std::stable_sort(kids.begin(), kids.end(), [&](int a, int b) {
    return model.subtree_size[std::size_t(a)] > model.subtree_size[std::size_t(b)];
  });
  std::optional<EnergyField> acc;
  for (int child : kids) {
    auto contribution = gdt_quadratic(subtree_energy(model, fields, params, child),
                                      model.offsets[std::size_t(child)]);
    if (!acc) {
      acc = std::move(contribution);
    } else {
      for (std::size_t i = 0; i < acc->size(); ++i) acc->values()[i] += contribution.values()[i];
    }
  }
  std::optional<double> tangent;
  if (params.augmented && model.tangents) tangent = (*model.tangents)[std::size_t(node)];
  const auto& data = fields.for_node(tangent);
  if (!acc) acc = EnergyField(data.width(), data.height(), 0.0);
  const double cap = model.subtree_size[std::size_t(node)] * params.tau;
  for (std::size_t i = 0; i < acc->size(); ++i) {
    acc->values()[i] = std::min(acc->values()[i] + params.lambda * data.values()[i], cap);
  }
  return std::move(*acc);
}

}  // namespace detail

/// Minimal truncated energy over all placements of the model and the root
/// position attaining it (first in raster order).
inline MatchResult match(const InkballModel& model, const PlacementFields& fields,
                         const MatchParams& params) {
  params.validate();
  model.validate();
  if (params.augmented && !model.augmented()) {
    throw ParameterError("augmented matching requires a model with tangents");
  }
  const auto root = detail::subtree_energy(model, fields, params, 0);
  std::size_t best = 0;
  for (std::size_t i = 1; i < root.size(); ++i)
    if (root.values()[i] < root.values()[best]) best = i;
  const int x = int(best % std::size_t(root.width())), y = int(best / std::size_t(root.width()));
  return {root.values()[best], Point2i{x, y} - fields.margin};
}

inline MatchResult match(const InkballModel& model, const SkeletonImage& obs,
                         const MatchParams& params) {
  return match(model, prepare_observation(obs, model_margin(model, params), params), params);
}

/// Minimal energy per inkball of the model built from the reference matched
/// against the test skeleton. Not symmetric.
inline double inkball_dissimilarity(const InkballModel& model, const SkeletonImage& test,
                                    const MatchParams& params) {
  return match(model, test, params).energy / model.size();
}

inline double d_inkball(const SkeletonImage& reference, const SkeletonImage& test,
                        double d_inkball_spacing, const MatchParams& params) {
  if (reference.ink_count() == 0 || test.ink_count() == 0) {
    throw DomainError("d_inkball requires non-empty skeletons");
  }
  const auto model = build_model(reference, d_inkball_spacing, params.augmented);
  return inkball_dissimilarity(model, test, params);
}

// ---------------------------------------------------------------------------
// Text serialization
//
//   sigverify-inkball-model 1
//   source <id>
//   d_inkball <value>
//   augmented 0|1
//   nodes <n>
//   <id> <x> <y> [alpha]     (alpha present iff augmented)
//   parents
//   <id> <parent>            (ids 1..n-1)
//   root 0

inline constexpr const char* kModelMagic = "sigverify-inkball-model";
inline constexpr int kModelFormatVersion = 1;

inline void write_model(std::ostream& out, const InkballModel& m) {
  out << kModelMagic << ' ' << kModelFormatVersion << '\n';
  out << "source " << m.source_id << '\n';
  out << "d_inkball " << format_double(m.d_inkball) << '\n';
  out << "augmented " << (m.augmented() ? 1 : 0) << '\n';
  out << "nodes " << m.nodes.size() << '\n';
  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    out << i << ' ' << m.nodes[i].x << ' ' << m.nodes[i].y;
    if (m.tangents) out << ' ' << format_double((*m.tangents)[i]);
    out << '\n';
  }
  out << "parents\n";
  for (std::size_t i = 1; i < m.nodes.size(); ++i) out << i << ' ' << m.parent[i] << '\n';
  out << "root 0\n";
}

inline InkballModel read_model(std::istream& in) {
  const auto version = detail::expect_line(in, kModelMagic);
  if (parse_int(trim(version)) != kModelFormatVersion) {
    throw FormatError("unsupported model format version " + version);
  }
  InkballModel m;
  m.source_id = detail::expect_line(in, "source");
  m.d_inkball = parse_double(trim(detail::expect_line(in, "d_inkball")));
  const bool augmented = parse_int(trim(detail::expect_line(in, "augmented"))) != 0;
  const auto n = parse_int(trim(detail::expect_line(in, "nodes")));
  if (n <= 0) throw FormatError("model must have nodes");
  if (augmented) m.tangents.emplace();
  std::string line;
  for (long long i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw FormatError("truncated node list");
    const auto parts = detail::split_ws(line);
    if (parts.size() != (augmented ? 4u : 3u) || parse_int(parts[0]) != i) {
      throw FormatError("bad node line: " + line);
    }
    m.nodes.push_back({int(parse_int(parts[1])), int(parse_int(parts[2]))});
    if (augmented) m.tangents->push_back(parse_double(parts[3]));
  }
  detail::expect_line(in, "parents");
  m.parent.assign(std::size_t(n), -1);
  for (long long i = 1; i < n; ++i) {
    if (!std::getline(in, line)) throw FormatError("truncated parent list");
    const auto parts = detail::split_ws(line);
    if (parts.size() != 2 || parse_int(parts[0]) != i) throw FormatError("bad parent line: " + line);
    m.parent[std::size_t(i)] = int(parse_int(parts[1]));
  }
  if (parse_int(trim(detail::expect_line(in, "root"))) != 0) throw FormatError("root must be node 0");
  m.validate();
  m.finalize();
  return m;
}

inline std::string model_to_string(const InkballModel& m) {
  std::ostringstream ss;
  write_model(ss, m);
  return ss.str();
}

inline InkballModel model_from_string(const std::string& text) {
  std::istringstream ss(text);
  return read_model(ss);
}

}  // namespace sigverify

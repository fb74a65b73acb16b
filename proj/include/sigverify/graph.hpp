#pragma once

// Keypoint graphs: nodes are skeleton keypoints labeled with their (x, y)
// coordinates, edges are unlabeled and undirected and follow the skeleton.

#include <algorithm>
#include <iosfwd>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sigverify/errors.hpp"
#include "sigverify/grid.hpp"
#include "sigverify/skeleton_topology.hpp"
#include "sigverify/text_format.hpp"

namespace sigverify {

struct KeypointGraph {
  std::vector<Point2d> nodes;
  /// Each undirected edge stored once as (u, v) with u < v, sorted.
  std::vector<std::pair<int, int>> edges;
  std::string source_id;
  double d_ged = 0.0;

  int node_count() const { return int(nodes.size()); }
  int edge_count() const { return int(edges.size()); }
  bool empty() const { return nodes.empty(); }

  std::vector<int> degrees() const {
    std::vector<int> deg(nodes.size(), 0);
    for (auto [u, v] : edges) {
      ++deg[std::size_t(u)];
      ++deg[std::size_t(v)];
    }
    return deg;
  }

  bool has_edge(int u, int v) const {
    if (u > v) std::swap(u, v);
    return std::binary_search(edges.begin(), edges.end(), std::pair{u, v});
  }

  /// Throws FormatError unless edges are in range, loop-free, unique and sorted.
  void validate() const {
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const auto [u, v] = edges[i];
      if (u < 0 || v >= node_count() || u >= v) throw FormatError("invalid graph edge");
      if (i > 0 && !(edges[i - 1] < edges[i])) throw FormatError("edges not unique and sorted");
    }
  }

  /// Builds the canonical edge list from arbitrary pairs; self-loops and
  /// duplicates (in either orientation) are dropped.
  void set_edges(const std::vector<std::pair<int, int>>& pairs) {
    std::set<std::pair<int, int>> unique;
    for (auto [u, v] : pairs) {
      if (u == v) continue;
      unique.insert({std::min(u, v), std::max(u, v)});
    }
    edges.assign(unique.begin(), unique.end());
  }

  friend bool operator==(const KeypointGraph&, const KeypointGraph&) = default;
};

/// Shifts labels by minus their mean.
inline KeypointGraph center_normalize(KeypointGraph g) {
  if (g.nodes.empty()) throw DomainError("cannot center an empty graph");
  Point2d mean;
  for (auto p : g.nodes) mean = mean + p;
  mean = {mean.x / double(g.nodes.size()), mean.y / double(g.nodes.size())};
  for (auto& p : g.nodes) p = p - mean;
  return g;
}

/// Extracts the keypoint graph of a skeleton.
///
/// Keypoints are endpoints and junctions (adjacent junction pixels form one
/// keypoint); a component without either, i.e. a closed loop, gets its
/// leftmost pixel (ties: topmost). The skeleton is then traced from the
/// keypoints in raster order, branches in clockwise order, and a keypoint is
/// inserted wherever the distance travelled since the last keypoint reaches
/// d_ged. Consecutive keypoints along a trace are joined by an edge. Labels
/// are centered unless the skeleton is empty.
inline KeypointGraph extract_keypoint_graph(const SkeletonImage& skel, double d_ged,
                                            std::string source_id = {}) {
  if (!(d_ged >= 1.0)) throw ParameterError("D_GED must be >= 1");
  KeypointGraph g;
  g.source_id = std::move(source_id);
  g.d_ged = d_ged;

  const auto topo = analyze_skeleton(skel);
  const int w = skel.width(), h = skel.height();

  struct Seed {
    Point2i label;
    std::vector<Point2i> pixels;
  };
  std::vector<Seed> seeds;
  std::vector<char> component_has_keypoint(std::size_t(topo.component_count), 0);
  for (auto p : topo.endpoints) {
    seeds.push_back({p, {p}});
    component_has_keypoint[std::size_t(topo.component(p))] = 1;
  }
  for (const auto& cluster : topo.junction_clusters) {
    seeds.push_back({cluster_representative(cluster), cluster});
    component_has_keypoint[std::size_t(topo.component(cluster.front()))] = 1;
  }
  {
    std::vector<Point2i> leftmost(std::size_t(topo.component_count), Point2i{w, h});
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const int c = topo.component(x, y);
        if (c < 0) continue;
        auto& best = leftmost[std::size_t(c)];
        if (x < best.x || (x == best.x && y < best.y)) best = {x, y};
      }
    for (int c = 0; c < topo.component_count; ++c)
      if (!component_has_keypoint[std::size_t(c)]) {
        seeds.push_back({leftmost[std::size_t(c)], {leftmost[std::size_t(c)]}});
      }
  }
  std::sort(seeds.begin(), seeds.end(), [](const Seed& a, const Seed& b) {
    return a.label.y != b.label.y ? a.label.y < b.label.y : a.label.x < b.label.x;
  });

  Grid<int> node_of(w, h, -1);
  Grid<std::uint8_t> visited(w, h, 0);
  std::vector<Point2i> labels;
  for (const auto& s : seeds) {
    const int id = int(labels.size());
    labels.push_back(s.label);
    for (auto p : s.pixels) node_of(p) = id;
  }

  std::vector<std::pair<int, int>> edge_list;
  const int seed_count = int(seeds.size());
  for (int id = 0; id < seed_count; ++id) {
    for (auto start : seeds[std::size_t(id)].pixels) {
      for (auto first : branch_neighbors(skel, start)) {
        if (node_of(first) == id) continue;
        if (node_of(first) >= 0) {
          edge_list.push_back({id, node_of(first)});
          continue;
        }
        if (visited(first)) continue;

        int last = id;
        Point2i prev = start, cur = first;
        double travelled = step_length(start, first);
        for (;;) {
          if (node_of(cur) >= 0) {
            edge_list.push_back({last, node_of(cur)});
            break;
          }
          if (visited(cur)) break;
          visited(cur) = 1;
          if (travelled >= d_ged) {
            const int added = int(labels.size());
            labels.push_back(cur);
            node_of(cur) = added;
            edge_list.push_back({last, added});
            last = added;
            travelled = 0.0;
          }
          Point2i next = cur;
          for (auto q : branch_neighbors(skel, cur))
            if (!(q == prev)) {
              next = q;
              break;
            }
          if (next == cur) break;  // unreachable for degree-2 pixels
          travelled += step_length(cur, next);
          prev = cur;
          cur = next;
        }
      }
    }
  }

  g.nodes.reserve(labels.size());
  for (auto p : labels) g.nodes.push_back(to_double(p));
  g.set_edges(edge_list);
  if (!g.nodes.empty()) g = center_normalize(std::move(g));
  return g;
}

// ---------------------------------------------------------------------------
// Text serialization
//
//   sigverify-keypoint-graph 1
//   source <id>
//   d_ged <value>
//   nodes <n>
//   <id> <x> <y>        (n lines, ids 0..n-1 in order)
//   edges <m>
//   <u> <v>             (m lines)

inline constexpr const char* kGraphMagic = "sigverify-keypoint-graph";
inline constexpr int kGraphFormatVersion = 1;

inline void write_graph(std::ostream& out, const KeypointGraph& g) {
  out << kGraphMagic << ' ' << kGraphFormatVersion << '\n';
  out << "source " << g.source_id << '\n';
  out << "d_ged " << format_double(g.d_ged) << '\n';
  out << "nodes " << g.nodes.size() << '\n';
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    out << i << ' ' << format_double(g.nodes[i].x) << ' ' << format_double(g.nodes[i].y) << '\n';
  out << "edges " << g.edges.size() << '\n';
  for (auto [u, v] : g.edges) out << u << ' ' << v << '\n';
}

namespace detail {

inline std::string expect_line(std::istream& in, std::string_view key) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("unexpected end of file, wanted " + std::string(key));
  std::string_view sv = line;
  if (sv.substr(0, key.size()) != key || (sv.size() > key.size() && sv[key.size()] != ' ')) {
    throw FormatError("expected '" + std::string(key) + "', got '" + line + "'");
  }
  return std::string(sv.size() > key.size() ? sv.substr(key.size() + 1) : std::string_view{});
}

inline std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> parts;
  for (std::string p; ss >> p;) parts.push_back(p);
  return parts;
}

}  // namespace detail

inline KeypointGraph read_graph(std::istream& in) {
  const auto version = detail::expect_line(in, kGraphMagic);
  if (parse_int(trim(version)) != kGraphFormatVersion) {
    throw FormatError("unsupported graph format version " + version);
  }
  KeypointGraph g;
  g.source_id = detail::expect_line(in, "source");
  g.d_ged = parse_double(trim(detail::expect_line(in, "d_ged")));
  const auto n = parse_int(trim(detail::expect_line(in, "nodes")));
  if (n < 0) throw FormatError("negative node count");
  std::string line;
  for (long long i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw FormatError("truncated node list");
    const auto parts = detail::split_ws(line);
    if (parts.size() != 3 || parse_int(parts[0]) != i) throw FormatError("bad node line: " + line);
    g.nodes.push_back({parse_double(parts[1]), parse_double(parts[2])});
  }
  const auto m = parse_int(trim(detail::expect_line(in, "edges")));
  if (m < 0) throw FormatError("negative edge count");
  for (long long i = 0; i < m; ++i) {
    if (!std::getline(in, line)) throw FormatError("truncated edge list");
    const auto parts = detail::split_ws(line);
    if (parts.size() != 2) throw FormatError("bad edge line: " + line);
    g.edges.push_back({int(parse_int(parts[0])), int(parse_int(parts[1]))});
  }
  g.validate();
  return g;
}

inline std::string graph_to_string(const KeypointGraph& g) {
  std::ostringstream ss;
  write_graph(ss, g);
  return ss.str();
}

inline KeypointGraph graph_from_string(const std::string& text) {
  std::istringstream ss(text);
  return read_graph(ss);
}

}  // namespace sigverify

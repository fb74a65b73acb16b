#pragma once

// Graph edit distance between keypoint graphs.
//
// Cost model: node substitution is the Euclidean label distance, node
// deletion/insertion costs c_node, edge substitution is free and edge
// deletion/insertion costs c_edge.
//
// HED (Hausdorff edit distance) assigns every node of either graph to its
// cheapest counterpart or to epsilon independently, in O(n m). With free edge
// substitution the adjacent-edge matching of a node pair reduces to the
// degree difference, and each edge cost is split between its two endpoints:
//
//   c*(u -> eps) = c_node + deg(u) c_edge / 2
//   c*(eps -> v) = c_node + deg(v) c_edge / 2
//   c*(u -> v)   = (|mu(u) - mu(v)| + |deg(u) - deg(v)| c_edge / 2) / 2
//
// which keeps HED a lower bound of the exact GED. BP solves one assignment
// problem on local costs and returns the cost of the induced edit path, an
// upper bound.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "sigverify/errors.hpp"
#include "sigverify/graph.hpp"
#include "sigverify/lsap.hpp"

namespace sigverify {

struct CostParams {
  double c_node = 12.5;
  double c_edge = 200.0;

  void validate() const {
    if (!(c_node >= 0.0) || !(c_edge >= 0.0)) throw ParameterError("edit costs must be >= 0");
  }
};

enum class GedMethod { kHed, kBp, kExact };

inline const char* to_string(GedMethod m) {
  switch (m) {
    case GedMethod::kHed: return "hed";
    case GedMethod::kBp: return "bp";
    case GedMethod::kExact: return "exact";
  }
  return "?";
}

struct GedResult {
  double raw_cost = 0.0;
  double normalizer = 0.0;  // GED_max
  double normalized = 0.0;  // raw / normalizer, 0 when both graphs are empty
  GedMethod method = GedMethod::kHed;
};

inline double node_sub_cost(Point2d u, Point2d v) {
  return std::sqrt((u.x - v.x) * (u.x - v.x) + (u.y - v.y) * (u.y - v.y));
}

/// Cost of deleting g1 entirely and inserting g2.
inline double ged_max(const KeypointGraph& g1, const KeypointGraph& g2, const CostParams& params) {
  return double(g1.node_count() + g2.node_count()) * params.c_node +
         double(g1.edge_count() + g2.edge_count()) * params.c_edge;
}

namespace detail {

inline GedResult make_result(double raw, double normalizer, GedMethod method) {
  return {raw, normalizer, normalizer > 0.0 ? raw / normalizer : 0.0, method};
}

inline std::vector<std::vector<char>> adjacency_matrix(const KeypointGraph& g) {
  std::vector<std::vector<char>> adj(g.nodes.size(), std::vector<char>(g.nodes.size(), 0));
  for (auto [u, v] : g.edges) adj[std::size_t(u)][std::size_t(v)] = adj[std::size_t(v)][std::size_t(u)] = 1;
  return adj;
}

}  // namespace detail

inline double hed_cost(const KeypointGraph& g1, const KeypointGraph& g2, const CostParams& params) {
  const auto deg1 = g1.degrees();
  const auto deg2 = g2.degrees();
  const double half_edge = params.c_edge / 2.0;
  double total = 0.0;
  for (std::size_t i = 0; i < g1.nodes.size(); ++i) {
    double best = params.c_node + deg1[i] * half_edge;
    for (std::size_t j = 0; j < g2.nodes.size(); ++j) {
      const double sub =
          (node_sub_cost(g1.nodes[i], g2.nodes[j]) + std::abs(deg1[i] - deg2[j]) * half_edge) / 2.0;
      best = std::min(best, sub);
    }
    total += best;
  }
  for (std::size_t j = 0; j < g2.nodes.size(); ++j) {
    double best = params.c_node + deg2[j] * half_edge;
    for (std::size_t i = 0; i < g1.nodes.size(); ++i) {
      const double sub =
          (node_sub_cost(g1.nodes[i], g2.nodes[j]) + std::abs(deg1[i] - deg2[j]) * half_edge) / 2.0;
      best = std::min(best, sub);
    }
    total += best;
  }
  return total;
}

inline GedResult hed(const KeypointGraph& g1, const KeypointGraph& g2, const CostParams& params) {
  params.validate();
  return detail::make_result(hed_cost(g1, g2, params), ged_max(g1, g2, params), GedMethod::kHed);
}

/// Exact cost of the edit path defined by a node map; mapping[i] is the g2
/// node substituting g1 node i, or -1 for deletion. Unmapped g2 nodes are
/// inserted.
inline double induced_edit_cost(const KeypointGraph& g1, const KeypointGraph& g2,
                                const std::vector<int>& mapping, const CostParams& params) {
  std::vector<int> inverse(g2.nodes.size(), -1);
  double cost = 0.0;
  for (std::size_t i = 0; i < mapping.size(); ++i) {
    const int j = mapping[i];
    if (j < 0) {
      cost += params.c_node;
    } else {
      if (inverse[std::size_t(j)] >= 0) throw ParameterError("node map is not injective");
      inverse[std::size_t(j)] = int(i);
      cost += node_sub_cost(g1.nodes[i], g2.nodes[std::size_t(j)]);
    }
  }
  for (int j : inverse)
    if (j < 0) cost += params.c_node;
  for (auto [a, b] : g1.edges) {
    const int ma = mapping[std::size_t(a)], mb = mapping[std::size_t(b)];
    if (ma < 0 || mb < 0 || !g2.has_edge(ma, mb)) cost += params.c_edge;
  }
  for (auto [a, b] : g2.edges) {
    const int ia = inverse[std::size_t(a)], ib = inverse[std::size_t(b)];
    if (ia < 0 || ib < 0 || !g1.has_edge(ia, ib)) cost += params.c_edge;
  }
  return cost;
}

/// Bipartite (assignment-based) GED approximation.
inline GedResult bp(const KeypointGraph& g1, const KeypointGraph& g2, const CostParams& params) {
  params.validate();
  const int n = g1.node_count(), m = g2.node_count();
  const int size = n + m;
  if (size == 0) return detail::make_result(0.0, 0.0, GedMethod::kBp);
  const auto deg1 = g1.degrees();
  const auto deg2 = g2.degrees();
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // Rows: g1 nodes then epsilon; columns: g2 nodes then epsilon.
  Grid<double> cost(size, size, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      cost(j, i) = node_sub_cost(g1.nodes[std::size_t(i)], g2.nodes[std::size_t(j)]) +
                   std::abs(deg1[std::size_t(i)] - deg2[std::size_t(j)]) * params.c_edge;
    }
    for (int k = 0; k < n; ++k)
      cost(m + k, i) = k == i ? params.c_node + deg1[std::size_t(i)] * params.c_edge : kInf;
  }
  for (int k = 0; k < m; ++k)
    for (int j = 0; j < m; ++j)
      cost(j, n + k) = k == j ? params.c_node + deg2[std::size_t(j)] * params.c_edge : kInf;

  const auto assignment = solve_lsap(cost);
  std::vector<int> mapping(std::size_t(n), -1);
  for (int i = 0; i < n; ++i) {
    const int col = assignment.row_to_col[std::size_t(i)];
    mapping[std::size_t(i)] = col < m ? col : -1;
  }
  return detail::make_result(induced_edit_cost(g1, g2, mapping, params), ged_max(g1, g2, params),
                             GedMethod::kBp);
}

inline constexpr int kExactGedMaxNodes = 12;

/// Exact GED by depth-first enumeration of node maps with cost-bound pruning.
/// Refuses inputs with more than 12 nodes in total.
inline GedResult exact_ged_small(const KeypointGraph& g1, const KeypointGraph& g2,
                                 const CostParams& params) {
  params.validate();
  const int n = g1.node_count(), m = g2.node_count();
  if (n + m > kExactGedMaxNodes) {
    throw ParameterError("exact GED is limited to " + std::to_string(kExactGedMaxNodes) + " nodes in total");
  }
  const auto adj1 = detail::adjacency_matrix(g1);
  const auto adj2 = detail::adjacency_matrix(g2);

  std::vector<int> mapping(std::size_t(n), -1);
  std::vector<int> inverse(std::size_t(m), -1);
  double best = ged_max(g1, g2, params);  // delete-all/insert-all path

  // Cost of inserting the g2 nodes left unmapped, plus their edges.
  auto completion = [&]() {
    double c = 0.0;
    for (int j = 0; j < m; ++j)
      if (inverse[std::size_t(j)] < 0) c += params.c_node;
    for (auto [a, b] : g2.edges)
      if (inverse[std::size_t(a)] < 0 || inverse[std::size_t(b)] < 0) c += params.c_edge;
    return c;
  };

  auto step_cost = [&](int i, int target) {
    double c = target < 0 ? params.c_node
                          : node_sub_cost(g1.nodes[std::size_t(i)], g2.nodes[std::size_t(target)]);
    for (int k = 0; k < i; ++k) {
      const int tk = mapping[std::size_t(k)];
      const bool e1 = adj1[std::size_t(k)][std::size_t(i)] != 0;
      const bool e2 = target >= 0 && tk >= 0 && adj2[std::size_t(tk)][std::size_t(target)] != 0;
      if (e1 && !e2) c += params.c_edge;  // deleted
      if (e2 && !e1) c += params.c_edge;  // inserted
    }
    return c;
  };

  auto search = [&](auto&& self, int i, double partial) -> void {
    if (partial >= best) return;
    if (i == n) {
      best = std::min(best, partial + completion());
      return;
    }
    for (int target = -1; target < m; ++target) {
      if (target >= 0 && inverse[std::size_t(target)] >= 0) continue;
      const double c = step_cost(i, target);
      mapping[std::size_t(i)] = target;
      if (target >= 0) inverse[std::size_t(target)] = i;
      self(self, i + 1, partial + c);
      if (target >= 0) inverse[std::size_t(target)] = -1;
      mapping[std::size_t(i)] = -1;
    }
  };
  search(search, 0, 0.0);
  return detail::make_result(best, ged_max(g1, g2, params), GedMethod::kExact);
}

inline GedResult compute_ged(const KeypointGraph& g1, const KeypointGraph& g2,
                             const CostParams& params, GedMethod method) {
  switch (method) {
    case GedMethod::kHed: return hed(g1, g2, params);
    case GedMethod::kBp: return bp(g1, g2, params);
    case GedMethod::kExact: return exact_ged_small(g1, g2, params);
  }
  throw ParameterError("unknown GED method");
}

/// Normalized dissimilarity GED(g_R, g_T) / GED_max(g_R, g_T). A graph
/// against the empty graph scores 1 under HED; two empty graphs are an error.
inline double d_ged(const KeypointGraph& reference, const KeypointGraph& test,
                    const CostParams& params, GedMethod method = GedMethod::kHed) {
  if (reference.empty() && test.empty()) throw DomainError("d_GED undefined for two empty graphs");
  if (!(params.c_node > 0.0)) throw ParameterError("c_node must be > 0 for normalization");
  return compute_ged(reference, test, params, method).normalized;
}

}  // namespace sigverify

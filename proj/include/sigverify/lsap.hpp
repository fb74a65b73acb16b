#pragma once

// Linear sum assignment by shortest augmenting paths with potentials
// (Hungarian method, O(n^3)). Entries may be +infinity for forbidden pairs as
// long as a finite perfect assignment exists.

#include <cmath>
#include <limits>
#include <vector>

#include "sigverify/errors.hpp"
#include "sigverify/grid.hpp"

namespace sigverify {

struct Assignment {
  std::vector<int> row_to_col;
  double cost = 0.0;
};

/// cost(col, row): Grid is indexed (x = column, y = row).
inline Assignment solve_lsap(const Grid<double>& cost) {
  const int n = cost.height();
  if (cost.width() != n) throw ParameterError("LSAP cost matrix must be square");
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(std::size_t(n) + 1, 0.0), v(std::size_t(n) + 1, 0.0);
  std::vector<int> match(std::size_t(n) + 1, 0), way(std::size_t(n) + 1, 0);
  std::vector<double> minv(std::size_t(n) + 1);
  std::vector<char> used(std::size_t(n) + 1);

  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[std::size_t(j0)] = 1;
      const int i0 = match[std::size_t(j0)];
      double delta = kInf;
      int j1 = -1;
      for (int j = 1; j <= n; ++j) {
        if (used[std::size_t(j)]) continue;
        const double cur = cost(j - 1, i0 - 1) - u[std::size_t(i0)] - v[std::size_t(j)];
        if (cur < minv[std::size_t(j)]) {
          minv[std::size_t(j)] = cur;
          way[std::size_t(j)] = j0;
        }
        if (minv[std::size_t(j)] < delta) {
          delta = minv[std::size_t(j)];
          j1 = j;
        }
      }
      if (j1 < 0 || std::isinf(delta)) throw DomainError("assignment problem has no finite solution");
      for (int j = 0; j <= n; ++j) {
        if (used[std::size_t(j)]) {
          u[std::size_t(match[std::size_t(j)])] += delta;
          v[std::size_t(j)] -= delta;
        } else {
          minv[std::size_t(j)] -= delta;
        }
      }
      j0 = j1;
    } while (match[std::size_t(j0)] != 0);
    do {
      const int j1 = way[std::size_t(j0)];
      match[std::size_t(j0)] = match[std::size_t(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  Assignment result;
  result.row_to_col.assign(std::size_t(n), -1);
  for (int j = 1; j <= n; ++j) result.row_to_col[std::size_t(match[std::size_t(j)] - 1)] = j - 1;
  for (int i = 0; i < n; ++i) result.cost += cost(result.row_to_col[std::size_t(i)], i);
  return result;
}

}  // namespace sigverify

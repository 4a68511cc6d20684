#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gsw/types.hpp"

namespace gsw::detail {

struct TransportSolution {
  Matrix flow;                 // m x n
  double cost = 0.0;           // sum flow .* cost
  Vector row_potential;        // u_i
  Vector col_potential;        // v_j; cost(i, j) - u_i - v_j >= 0 at optimum
  std::size_t iterations = 0;
};

/// Balanced transportation problem solved by the primal network simplex
/// method with block-search pivoting on a strongly feasible spanning tree.
/// `supply` and `demand` must be nonnegative with equal totals (up to
/// rounding); `cost` is m x n.
TransportSolution solve_transport(std::span<const double> supply, std::span<const double> demand,
                                  const Matrix& cost, std::size_t max_iterations = 0);

}  // namespace gsw::detail

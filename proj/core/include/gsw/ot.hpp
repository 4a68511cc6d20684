#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "gsw/measures.hpp"
#include "gsw/types.hpp"

namespace gsw {

/// Coupling between two discrete measures. `cost` is the p-th power
/// transport cost sum_ij plan(i,j) |x_i - y_j|^p.
struct TransportPlan {
  Matrix plan;
  double cost = 0.0;
  double p = 2.0;

  /// cost^(1/p), with negative rounding residue clamped to zero.
  double distance() const;
};

/// Exact W_p through sorted quantile functions. One-dimensional inputs only.
struct QuantileMethod {};

/// Network simplex on the dense cost matrix. Refuses problems with more
/// than max_entries cost entries.
struct ExactLp {
  std::size_t max_entries = 1'000'000;
};

/// Log-domain Sinkhorn. epsilon <= 0 selects 0.01 * median pairwise cost.
/// Converged when the row-marginal L1 error is <= tol; the returned plan is
/// then rounded onto the feasible set.
struct Sinkhorn {
  double epsilon = 0.0;
  std::size_t max_iter = 10000;
  double tol = 1e-6;
};

using OTMethod = std::variant<QuantileMethod, ExactLp, Sinkhorn>;

struct OTConfig {
  double p = 2.0;
  OTMethod method = ExactLp{};
};

/// Whether the two sides of smooth_wasserstein draw the same noise offsets.
enum class NoiseCoupling {
  /// Replica l of point i gets the same offset in both measures.
  common,
  independent,
};

/// |x_i - y_j|^p for all pairs.
Matrix cost_matrix(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double p);

/// Sorted support of a one-dimensional measure (stable in the input order).
struct SortedLine {
  std::vector<double> values;
  std::vector<double> weights;
  std::vector<std::size_t> order;  // input index of each sorted entry
};

SortedLine sort_line(const EmpiricalMeasure& m);

/// p-th power cost between two sorted lines by merging their cumulative
/// weights. Exactly symmetric in its arguments.
double quantile_cost(const SortedLine& a, const SortedLine& b, double p);

/// Exact one-dimensional W_p (not its p-th power).
double wasserstein_1d(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double p);

TransportPlan wasserstein_discrete(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                                   const OTConfig& cfg);

/// W_p between the inputs. Uses the quantile formula for one-dimensional
/// inputs under QuantileMethod or ExactLp (same optimum, no plan needed).
double transport_distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b, const OTConfig& cfg);

/// Noise-augmentation estimate of the Gaussian-smoothed distance
/// W_p(a * N_sigma, b * N_sigma): both inputs are augmented with k replicas
/// and then compared with transport_distance. sigma == 0 skips augmentation.
double smooth_wasserstein(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double sigma,
                          const OTConfig& cfg, std::size_t k, SeedSpec seed,
                          NoiseCoupling coupling = NoiseCoupling::common);

}  // namespace gsw

#pragma once

#include <cstddef>

#include "gsw/measures.hpp"
#include "gsw/specialfn.hpp"
#include "gsw/types.hpp"

namespace gsw {

enum class Estimator { v_statistic, u_statistic };

struct MMDResult {
  double d2_squared = 0.0;  // can be slightly negative for the U-statistic
  double d2 = 0.0;          // sqrt(max(d2_squared, 0))
  Estimator kind = Estimator::v_statistic;
};

MMDResult make_mmd_result(double d2_squared, Estimator kind);

/// Squared smooth Sobolev IPM d_2^(sigma)(a, b)^2 in its MMD form:
/// sum w_i w_j k(x_i, x_j) + sum v_i v_j k(y_i, y_j) - 2 sum w_i v_j k(x_i, y_j).
/// The U-statistic drops the diagonal terms and needs uniform weights and at
/// least two points per measure.
MMDResult d2_squared(const EmpiricalMeasure& a, const EmpiricalMeasure& b, const KernelParams& params,
                     Estimator kind = Estimator::v_statistic, unsigned threads = 1);

/// Gram matrix of a fixed point set, evaluated once and then reused for any
/// number of signed weight vectors (bootstrap replicates reweight it).
class PooledGram {
 public:
  PooledGram(const PointMatrix& points, const KernelParams& params, unsigned threads = 1);

  /// w^T G w.
  double quadratic_form(const Vector& w) const;
  const Matrix& matrix() const { return gram_; }
  std::size_t size() const { return static_cast<std::size_t>(gram_.rows()); }

 private:
  Matrix gram_;
};

/// A large reference sample standing in for a population measure. The
/// reference self-term is computed once; each query costs n^2 + n M kernel
/// evaluations.
class ReferenceEmbedding {
 public:
  ReferenceEmbedding(EmpiricalMeasure reference, const KernelParams& params, unsigned threads = 1);

  /// V-statistic d_2(sample, reference)^2.
  MMDResult d2_squared(const EmpiricalMeasure& sample) const;
  const EmpiricalMeasure& reference() const { return reference_; }

 private:
  EmpiricalMeasure reference_;
  KernelParams params_;
  unsigned threads_;
  double self_term_;
};

/// Monte Carlo estimates of E k(X, X) and E k(X, X') for X, X' iid from a
/// distribution, with the standard error of their difference (paired draws).
struct KernelExpectations {
  double self_mean = 0.0;
  double cross_mean = 0.0;
  double gap_std_error = 0.0;
  std::size_t samples = 0;

  double gap() const { return self_mean - cross_mean; }
};

KernelExpectations kernel_expectations(const DistributionSpec& spec, const KernelParams& params,
                                       std::size_t mc, SeedSpec seed);

/// E[d_2(mu_n, mu)^2] = (E k(X, X) - E k(X, X')) / n, estimated by Monte Carlo.
struct OneSampleIdentity {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  KernelExpectations expectations;
};

OneSampleIdentity one_sample_identity(const KernelExpectations& expectations, std::size_t n);
OneSampleIdentity one_sample_identity(const DistributionSpec& spec, const KernelParams& params,
                                      std::size_t n, std::size_t mc, SeedSpec seed);

/// Comparison bound GW_p <= p exp(E|X|^2 / (2 q sigma^2)) d_p, q = p / (p - 1),
/// for a centered measure with second moment `second_moment`.
double gw_upper_bound(double d_value, double second_moment, double p, double sigma);

}  // namespace gsw

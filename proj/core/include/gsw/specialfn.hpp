#pragma once

#include <span>

#include "gsw/types.hpp"

namespace gsw {

inline constexpr double euler_gamma = 0.57721566490153286061;

/// Ein(z) is evaluated for z >= -ein_overflow_threshold; below that the
/// kernel magnitude leaves the double range and Overflow is raised.
inline constexpr double ein_overflow_threshold = 690.0;

/// ein() switches from the power series to the exponential-integral
/// identities at z > ein_branch_switch and z < -ein_negative_branch_switch.
/// The negative side switches later because the truncated asymptotic Ei
/// series is only good to about 1e-12 at |z| = 30 and 1e-16 from |z| = 40.
inline constexpr double ein_branch_switch = 30.0;
inline constexpr double ein_negative_branch_switch = 40.0;

/// Entire exponential integral Ein(z) = sum_{k>=1} (-1)^{k+1} z^k / (k k!).
///
/// Throws Error{non_finite} for NaN/inf input and Error{overflow} for
/// z < -ein_overflow_threshold.
double ein(double z);

/// Power-series branch. For z <= 2 this is the Taylor series directly; for
/// z > 2 it uses the positive-term form e^{-z} sum_k H_k z^k / k! (H_k the
/// harmonic numbers), which has no cancellation. Accurate for |z| <= 40.
double ein_series(double z);

/// Large-|z| branch: gamma + ln z + E1(z) for z > 0 (continued fraction) and
/// gamma + ln|z| - Ei(|z|) for z < 0 (asymptotic series). Needs |z| >= 20.
double ein_large(double z);

struct KernelParams {
  double sigma;

  explicit KernelParams(double sigma_);
};

/// kappa(x, y) as a function of s = <x, y>: -sigma^2 Ein(-s / sigma^2).
double kernel_from_inner(double inner, const KernelParams& params);

/// Smooth Sobolev reproducing kernel kappa^(sigma)(x, y).
double kernel(std::span<const double> x, std::span<const double> y, const KernelParams& params);

/// G(i, j) = kernel(points.row(i), points.row(j)). Exactly symmetric.
/// Rows are distributed over `threads` workers; the result does not depend
/// on the worker count.
Matrix gram(const PointMatrix& points, const KernelParams& params, unsigned threads = 1);

/// C(i, j) = kernel(a.row(i), b.row(j)).
Matrix cross_gram(const PointMatrix& a, const PointMatrix& b, const KernelParams& params,
                  unsigned threads = 1);

}  // namespace gsw

#include "gsw/specialfn.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gsw/error.hpp"
#include "gsw/parallel.hpp"
#include "linalg.hpp"

namespace gsw {
namespace {

constexpr double kSeriesTol = 1e-16;
constexpr int kMaxTerms = 1000;

// Taylor series; every term has the same sign when z < 0.
double ein_taylor(double z) {
  double term = z;  // (-1)^{k+1} z^k / k!
  double sum = z;
  for (int k = 2; k < kMaxTerms; ++k) {
    term *= -z / k;
    const double contrib = term / k;
    sum += contrib;
    if (k > std::abs(z) && std::abs(contrib) <= kSeriesTol * std::abs(sum)) break;
  }
  return sum;
}

// Ein(z) = e^{-z} sum_{k>=1} H_k z^k / k!, all terms positive for z > 0.
double ein_harmonic(double z) {
  double power = 1.0;  // z^k / k!
  double harmonic = 0.0;
  double sum = 0.0;
  for (int k = 1; k < kMaxTerms; ++k) {
    power *= z / k;
    harmonic += 1.0 / k;
    const double contrib = power * harmonic;
    sum += contrib;
    if (k > z && contrib <= kSeriesTol * sum) break;
  }
  return std::exp(-z) * sum;
}

// E1(x) for x > 1, modified Lentz evaluation of the continued fraction.
double expint_e1(double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxTerms; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) <= kSeriesTol) break;
  }
  return h * std::exp(-x);
}

// Ei(x) for large x: e^x / x * sum_k k! / x^k, truncated at the smallest term.
double expint_ei_asymptotic(double x) {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < kMaxTerms; ++k) {
    const double next = term * k / x;
    if (next >= term) break;
    term = next;
    sum += term;
    if (term <= kSeriesTol * sum) break;
  }
  return std::exp(x) / x * sum;
}

}  // namespace

double ein_series(double z) { return z <= 2.0 ? ein_taylor(z) : ein_harmonic(z); }

double ein_large(double z) {
  if (z > 0.0) return euler_gamma + std::log(z) + expint_e1(z);
  const double x = -z;
  return euler_gamma + std::log(x) - expint_ei_asymptotic(x);
}

double ein(double z) {
  if (!std::isfinite(z)) throw Error(ErrorKind::non_finite, "ein argument is not finite");
  if (z < -ein_overflow_threshold) {
    throw Error(ErrorKind::overflow,
                "ein argument " + std::to_string(z) + " below -" +
                    std::to_string(ein_overflow_threshold));
  }
  if (z <= ein_branch_switch && z >= -ein_negative_branch_switch) return ein_series(z);
  return ein_large(z);
}

KernelParams::KernelParams(double sigma_) : sigma(sigma_) {
  if (!(sigma_ > 0.0) || !std::isfinite(sigma_)) {
    throw Error(ErrorKind::invalid_spec, "kernel sigma must be positive and finite");
  }
}

double kernel_from_inner(double inner, const KernelParams& params) {
  const double s2 = params.sigma * params.sigma;
  return -s2 * ein(-inner / s2);
}

double kernel(std::span<const double> x, std::span<const double> y, const KernelParams& params) {
  if (x.size() != y.size()) {
    throw Error(ErrorKind::dimension_mismatch, "kernel arguments differ in dimension");
  }
  return kernel_from_inner(detail::dot(x, y), params);
}

Matrix gram(const PointMatrix& points, const KernelParams& params, unsigned threads) {
  const Eigen::Index n = points.rows();
  Matrix g(n, n);
  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t ui) {
    const auto i = static_cast<Eigen::Index>(ui);
    const auto xi = detail::row(points, i);
    for (Eigen::Index j = i; j < n; ++j) {
      g(i, j) = kernel_from_inner(detail::dot(xi, detail::row(points, j)), params);
    }
  });
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) g(i, j) = g(j, i);
  }
  return g;
}

Matrix cross_gram(const PointMatrix& a, const PointMatrix& b, const KernelParams& params,
                  unsigned threads) {
  if (a.cols() != b.cols()) {
    throw Error(ErrorKind::dimension_mismatch, "cross_gram point sets differ in dimension");
  }
  Matrix g(a.rows(), b.rows());
  parallel_for(static_cast<std::size_t>(a.rows()), threads, [&](std::size_t ui) {
    const auto i = static_cast<Eigen::Index>(ui);
    const auto xi = detail::row(a, i);
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      g(i, j) = kernel_from_inner(detail::dot(xi, detail::row(b, j)), params);
    }
  });
  return g;
}

}  // namespace gsw

#include "gsw/mmd.hpp"

#include <cmath>
#include <string>

#include "gsw/error.hpp"
#include "gsw/parallel.hpp"
#include "linalg.hpp"

namespace gsw {
namespace {

// sum_ij wa_i wb_j k(a_i, b_j) with k evaluated on the fly.
double weighted_cross_sum(const EmpiricalMeasure& a, const EmpiricalMeasure& b, const KernelParams& params,
                          unsigned threads) {
  const Matrix k = cross_gram(a.points(), b.points(), params, threads);
  return a.weights().dot(k * b.weights());
}

}  // namespace

MMDResult make_mmd_result(double d2_squared, Estimator kind) {
  return {d2_squared, std::sqrt(std::max(d2_squared, 0.0)), kind};
}

MMDResult d2_squared(const EmpiricalMeasure& a, const EmpiricalMeasure& b, const KernelParams& params,
                     Estimator kind, unsigned threads) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::dimension_mismatch, "d2: measures differ in dimension");

  const Matrix kaa = gram(a.points(), params, threads);
  const Matrix kbb = gram(b.points(), params, threads);
  const Matrix kab = cross_gram(a.points(), b.points(), params, threads);

  if (kind == Estimator::v_statistic) {
    const Vector& wa = a.weights();
    const Vector& wb = b.weights();
    const double value = wa.dot(kaa * wa) + wb.dot(kbb * wb) - 2.0 * wa.dot(kab * wb);
    return make_mmd_result(value, kind);
  }

  if (a.size() < 2 || b.size() < 2 || !a.has_uniform_weights() || !b.has_uniform_weights()) {
    throw Error(ErrorKind::config, "u_statistic needs >= 2 uniformly weighted points per measure");
  }
  const auto m = static_cast<double>(a.size());
  const auto n = static_cast<double>(b.size());
  const double off_a = kaa.sum() - kaa.trace();
  const double off_b = kbb.sum() - kbb.trace();
  const double value = off_a / (m * (m - 1.0)) + off_b / (n * (n - 1.0)) - 2.0 * kab.sum() / (m * n);
  return make_mmd_result(value, kind);
}

PooledGram::PooledGram(const PointMatrix& points, const KernelParams& params, unsigned threads)
    : gram_(gram(points, params, threads)) {}

double PooledGram::quadratic_form(const Vector& w) const {
  if (w.size() != gram_.rows()) {
    throw Error(ErrorKind::dimension_mismatch, "weight vector does not match pooled Gram size");
  }
  return w.dot(gram_ * w);
}

ReferenceEmbedding::ReferenceEmbedding(EmpiricalMeasure reference, const KernelParams& params, unsigned threads)
    : reference_(std::move(reference)), params_(params), threads_(threads), self_term_(0.0) {
  // Row-wise accumulation keeps memory at O(M) for large references.
  const auto& pts = reference_.points();
  const auto m = static_cast<std::size_t>(pts.rows());
  Vector row_sums(pts.rows());
  parallel_for(m, threads_, [&](std::size_t ui) {
    const auto i = static_cast<Eigen::Index>(ui);
    const auto xi = detail::row(pts, i);
    double s = 0.0;
    for (Eigen::Index j = 0; j < pts.rows(); ++j) {
      s += reference_.weights()(j) * kernel_from_inner(detail::dot(xi, detail::row(pts, j)), params_);
    }
    row_sums(i) = s;
  });
  self_term_ = reference_.weights().dot(row_sums);
}

MMDResult ReferenceEmbedding::d2_squared(const EmpiricalMeasure& sample) const {
  if (sample.dim() != reference_.dim()) {
    throw Error(ErrorKind::dimension_mismatch, "sample and reference differ in dimension");
  }
  const Matrix kss = gram(sample.points(), params_, threads_);
  const double self = sample.weights().dot(kss * sample.weights());
  const double cross = weighted_cross_sum(sample, reference_, params_, threads_);
  return make_mmd_result(self + self_term_ - 2.0 * cross, Estimator::v_statistic);
}

KernelExpectations kernel_expectations(const DistributionSpec& spec, const KernelParams& params,
                                       std::size_t mc, SeedSpec seed) {
  if (mc < 2) throw Error(ErrorKind::config, "kernel_expectations needs mc >= 2");
  const EmpiricalMeasure x = sample(spec, mc, seed.child(0));
  const EmpiricalMeasure y = sample(spec, mc, seed.child(1));
  double sum_self = 0.0;
  double sum_cross = 0.0;
  double sum_gap = 0.0;
  double sum_gap2 = 0.0;
  for (std::size_t i = 0; i < mc; ++i) {
    const auto xi = x.point(i);
    const double self = kernel_from_inner(detail::dot(xi, xi), params);
    const double cross = kernel_from_inner(detail::dot(xi, y.point(i)), params);
    sum_self += self;
    sum_cross += cross;
    sum_gap += self - cross;
    sum_gap2 += (self - cross) * (self - cross);
  }
  const auto n = static_cast<double>(mc);
  KernelExpectations out;
  out.self_mean = sum_self / n;
  out.cross_mean = sum_cross / n;
  const double mean_gap = sum_gap / n;
  const double var_gap = std::max(0.0, (sum_gap2 - n * mean_gap * mean_gap) / (n - 1.0));
  out.gap_std_error = std::sqrt(var_gap / n);
  out.samples = mc;
  return out;
}

OneSampleIdentity one_sample_identity(const KernelExpectations& expectations, std::size_t n) {
  if (n < 1) throw Error(ErrorKind::config, "one_sample_identity needs n >= 1");
  const auto nn = static_cast<double>(n);
  return {expectations.gap() / nn, expectations.gap_std_error / nn, n, expectations};
}

OneSampleIdentity one_sample_identity(const DistributionSpec& spec, const KernelParams& params,
                                      std::size_t n, std::size_t mc, SeedSpec seed) {
  return one_sample_identity(kernel_expectations(spec, params, mc, seed), n);
}

double gw_upper_bound(double d_value, double second_moment, double p, double sigma) {
  if (!(p > 1.0)) throw Error(ErrorKind::config, "gw_upper_bound needs p > 1");
  if (!(sigma > 0.0)) throw Error(ErrorKind::config, "gw_upper_bound needs sigma > 0");
  if (!(second_moment >= 0.0)) throw Error(ErrorKind::config, "second moment must be nonnegative");
  const double q = p / (p - 1.0);
  const double exponent = second_moment / (2.0 * q * sigma * sigma);
  if (exponent > 709.0) {
    throw Error(ErrorKind::overflow, "gw_upper_bound exponent " + std::to_string(exponent) + " overflows");
  }
  return p * std::exp(exponent) * d_value;
}

}  // namespace gsw

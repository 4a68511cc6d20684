#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "gsw/rng.hpp"
#include "gsw/types.hpp"

namespace gsw {

/// Weighted finite point set in R^d. Weights are nonnegative and sum to one
/// (within 1e-12); there is at least one point. Immutable once built.
class EmpiricalMeasure {
 public:
  EmpiricalMeasure(PointMatrix points, Vector weights);

  /// Uniform weights 1/n.
  static EmpiricalMeasure uniform(PointMatrix points);

  std::size_t size() const { return static_cast<std::size_t>(points_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(points_.cols()); }
  const PointMatrix& points() const { return points_; }
  const Vector& weights() const { return weights_; }
  std::span<const double> point(std::size_t i) const;
  bool has_uniform_weights() const;

 private:
  PointMatrix points_;
  Vector weights_;
};

struct UniformCube {
  double half_width = 1.0;
  std::vector<double> center;  // empty means the origin
};

struct Gaussian {
  std::vector<double> mean;  // empty means the origin
  double scale = 1.0;
};

struct GaussianMixture {
  std::vector<std::vector<double>> means;
  std::vector<double> scales;
  std::vector<double> weights;
};

/// How mixture component labels are assigned when sampling.
enum class MixtureSampling {
  iid,
  /// floor(w_c n) points per component, remainder to the first component;
  /// the r-th point of every component reuses the same standard normal
  /// draw, so permuting components only permutes the output rows.
  stratified,
};

struct DistributionSpec {
  std::variant<UniformCube, Gaussian, GaussianMixture> kind;
  std::size_t dim = 1;

  /// Throws Error{invalid_spec} on malformed input.
  void validate() const;

  Vector mean() const;
  /// E|X - E X|^2, in closed form.
  double central_second_moment() const;
  /// Same law shifted to mean zero.
  DistributionSpec centered() const;
};

EmpiricalMeasure sample(const DistributionSpec& spec, std::size_t n, SeedSpec seed,
                        MixtureSampling mixture = MixtureSampling::iid);

/// Replicates every point k times with independent N(0, sigma^2 I) offsets;
/// replica weights are w_i / k. The offset of replica l of point i depends
/// only on (seed, i, l), so two measures augmented with the same seed share
/// offsets index by index.
EmpiricalMeasure augment(const EmpiricalMeasure& m, double sigma, std::size_t k, SeedSpec seed);

/// Shifts every point by -a.
EmpiricalMeasure center(const EmpiricalMeasure& m, std::span<const double> a);

Vector mean(const EmpiricalMeasure& m);
/// sum_i w_i |x_i - mean|^2 (trace of the weighted covariance).
double cov_trace(const EmpiricalMeasure& m);
/// sum_i w_i |x_i|^2.
double second_moment(const EmpiricalMeasure& m);
/// Concatenation with masses proportional to the input sizes.
/// 64-node Gauss-Legendre measure reproducing Unif([-h, h]) in one
/// dimension; integrates smooth functions to near machine precision.
/// Only one-dimensional uniform_cube specs are supported.
EmpiricalMeasure quadrature_measure(const DistributionSpec& spec);

EmpiricalMeasure pool(const EmpiricalMeasure& a, const EmpiricalMeasure& b);
/// Rows sorted lexicographically, weights carried along.
EmpiricalMeasure sorted_rows(const EmpiricalMeasure& m);

// CSV with header x1,...,xd,w.
EmpiricalMeasure read_csv(std::istream& in);
EmpiricalMeasure read_csv_file(const std::string& path);
void write_csv(std::ostream& out, const EmpiricalMeasure& m);

void to_json(nlohmann::json& j, const DistributionSpec& spec);
void from_json(const nlohmann::json& j, DistributionSpec& spec);
DistributionSpec read_spec_file(const std::string& path);

}  // namespace gsw

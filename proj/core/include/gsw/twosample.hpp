#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gsw/measures.hpp"
#include "gsw/ot.hpp"

namespace gsw {

/// Which quantity the p = 2 test puts on each side of the comparison.
enum class TestMode {
  /// Statistic sqrt(mn/N) GW_2 (noise augmentation + OT); critical value
  /// from the centered, rescaled d_2 bootstrap.
  transport,
  /// Centered, rescaled d_2 on both sides.
  mmd,
};

struct TestConfig {
  double p = 1.0;  // 1, or 2 for the d_2-calibrated test
  double sigma = 0.1;
  double alpha = 0.05;
  std::size_t replicates = 500;  // bootstrap size B
  std::size_t k = 16;            // noise replicas per point
  OTConfig ot{1.0, QuantileMethod{}};
  TestMode mode = TestMode::transport;
  unsigned threads = 1;

  void validate() const;
};

struct TestResult {
  double statistic = 0.0;
  double critical_value = 0.0;
  bool reject = false;
  std::vector<double> bootstrap_values;  // sorted ascending
};

struct BootstrapDistribution {
  double critical_value = 0.0;
  std::vector<double> values;  // sorted ascending
};

/// ceil((1 - alpha) B)-th order statistic of sorted bootstrap values, i.e.
/// inf{t : P_B(W <= t) >= 1 - alpha}.
double bootstrap_quantile(std::span<const double> sorted_values, double alpha);

/// p exp(tr Sigma_Z / (2 q sigma^2)) for the pooled sample Z.
double bootstrap_scale_factor(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double p, double sigma);

/// W_{m,n} = sqrt(mn / N) GW_p(a, b) (or its d_2 surrogate in TestMode::mmd).
/// Both inputs are augmented from the common stream seed.child(0).
double statistic(const EmpiricalMeasure& a, const EmpiricalMeasure& b, const TestConfig& cfg, SeedSpec seed);

/// Resamples both inputs from the pooled measure, B times.
BootstrapDistribution bootstrap_critical_value(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                                               const TestConfig& cfg, SeedSpec seed);

TestResult test(const EmpiricalMeasure& a, const EmpiricalMeasure& b, const TestConfig& cfg, SeedSpec seed);

struct RejectionRate {
  double alpha = 0.0;
  double rate = 0.0;
};

/// Repeats the test on fresh samples (sizes n and m) and reports the
/// rejection frequency at every alpha. One bootstrap per repetition serves
/// all alphas.
std::vector<RejectionRate> rejection_curve(const DistributionSpec& spec_a, const DistributionSpec& spec_b,
                                           std::size_t n, std::size_t m, const TestConfig& cfg,
                                           std::span<const double> alphas, std::size_t repetitions,
                                           SeedSpec seed);

}  // namespace gsw

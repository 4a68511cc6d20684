#pragma once

#include <span>
#include <vector>

namespace gsw {

struct Summary {
  double mean = 0.0;
  double std_dev = 0.0;    // sample standard deviation (n - 1)
  double std_error = 0.0;  // std_dev / sqrt(n)
  std::size_t count = 0;
};

/// Ignores NaN entries.
Summary summarize(std::span<const double> values);
double median(std::vector<double> values);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_std_error = 0.0;
};

/// Least-squares fit of log(y) = a + b log(x). With std errors given, each
/// point is weighted by (y / se)^2, the inverse delta-method variance of log y.
SlopeFit loglog_slope(std::span<const double> x, std::span<const double> y,
                      std::span<const double> std_errors = {});

/// Rule-of-thumb bandwidth 0.9 min(sd, IQR/1.34) n^(-1/5).
double silverman_bandwidth(std::span<const double> values);

/// Gaussian kernel density estimate evaluated on `grid`.
std::vector<double> kde(std::span<const double> values, std::span<const double> grid, double bandwidth = 0.0);

}  // namespace gsw

#pragma once

#include <cmath>
#include <cstddef>
#include <span>

#include "gsw/types.hpp"

namespace gsw::detail {

inline std::span<const double> row(const PointMatrix& m, Eigen::Index i) {
  return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

// Fixed left-to-right order so that dot(x, y) == dot(y, x) bitwise.
inline double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
  return s;
}

inline double squared_distance(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double diff = x[k] - y[k];
    s += diff * diff;
  }
  return s;
}

// Compensated sum; naive summation of 1e5 weights drifts past 1e-12.
inline double total(const Vector& v) {
  long double sum = 0.0L;
  long double comp = 0.0L;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const long double x = v(i);
    const long double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return static_cast<double>(sum + comp);
}

}  // namespace gsw::detail

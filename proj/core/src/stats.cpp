#include "gsw/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gsw/error.hpp"

namespace gsw {

Summary summarize(std::span<const double> values) {
  Summary s;
  double sum = 0.0;
  for (double v : values) {
    if (std::isnan(v)) continue;
    sum += v;
    ++s.count;
  }
  if (s.count == 0) {
    s.mean = s.std_dev = s.std_error = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  s.mean = sum / static_cast<double>(s.count);
  if (s.count < 2) return s;
  double ss = 0.0;
  for (double v : values) {
    if (!std::isnan(v)) ss += (v - s.mean) * (v - s.mean);
  }
  s.std_dev = std::sqrt(ss / static_cast<double>(s.count - 1));
  s.std_error = s.std_dev / std::sqrt(static_cast<double>(s.count));
  return s;
}

double median(std::vector<double> values) {
  std::erase_if(values, [](double v) { return std::isnan(v); });
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

SlopeFit loglog_slope(std::span<const double> x, std::span<const double> y, std::span<const double> std_errors) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorKind::config, "slope fit needs >= 2 matching points");
  if (!std_errors.empty() && std_errors.size() != x.size()) {
    throw Error(ErrorKind::dimension_mismatch, "std_errors must match the number of points");
  }
  double sw = 0.0, sx = 0.0, sy = 0.0;
  std::vector<double> lx(x.size()), ly(x.size()), w(x.size(), 1.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw Error(ErrorKind::config, "log-log fit needs positive values");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
    if (!std_errors.empty() && std_errors[i] > 0.0) w[i] = (y[i] / std_errors[i]) * (y[i] / std_errors[i]);
    sw += w[i];
    sx += w[i] * lx[i];
    sy += w[i] * ly[i];
  }
  const double mx = sx / sw;
  const double my = sy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (lx[i] - mx) * (lx[i] - mx);
    sxy += w[i] * (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) throw Error(ErrorKind::config, "slope fit needs distinct x values");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (x.size() > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = ly[i] - fit.intercept - fit.slope * lx[i];
      rss += w[i] * r * r;
    }
    fit.slope_std_error = std::sqrt(rss / static_cast<double>(x.size() - 2) / sxx);
  }
  return fit;
}

double silverman_bandwidth(std::span<const double> values) {
  std::vector<double> v(values.begin(), values.end());
  if (v.size() < 2) return 1.0;
  std::sort(v.begin(), v.end());
  const Summary s = summarize(v);
  auto quantile = [&v](double q) {
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  const double iqr = quantile(0.75) - quantile(0.25);
  double spread = s.std_dev;
  if (iqr > 0.0) spread = std::min(spread, iqr / 1.34);
  if (!(spread > 0.0)) spread = 1.0;
  return 0.9 * spread * std::pow(static_cast<double>(v.size()), -0.2);
}

std::vector<double> kde(std::span<const double> values, std::span<const double> grid, double bandwidth) {
  if (values.empty()) throw Error(ErrorKind::config, "kde needs at least one value");
  const double h = bandwidth > 0.0 ? bandwidth : silverman_bandwidth(values);
  const double norm = 1.0 / (static_cast<double>(values.size()) * h * std::sqrt(2.0 * std::numbers::pi));
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double acc = 0.0;
    for (double v : values) {
      const double u = (grid[g] - v) / h;
      acc += std::exp(-0.5 * u * u);
    }
    out[g] = acc * norm;
  }
  return out;
}

}  // namespace gsw

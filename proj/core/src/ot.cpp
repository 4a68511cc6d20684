#include "gsw/ot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "gsw/detail/network_simplex.hpp"
#include "gsw/error.hpp"
#include "linalg.hpp"

namespace gsw {
namespace {

double ground_cost(double squared_distance, double p) {
  if (p == 2.0) return squared_distance;
  const double dist = std::sqrt(squared_distance);
  return p == 1.0 ? dist : std::pow(dist, p);
}

double line_cost(double x, double y, double p) {
  const double d = std::abs(x - y);
  if (p == 1.0) return d;
  if (p == 2.0) return d * d;
  return std::pow(d, p);
}

void require_p(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw Error(ErrorKind::config, "transport order p must be >= 1");
}

void require_same_dim(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorKind::dimension_mismatch, "measures have dimensions " + std::to_string(a.dim()) +
                                                   " and " + std::to_string(b.dim()));
  }
}

// Walks the merged cumulative weights; visit(i, j, mass) for each cell.
template <typename Visit>
void merge_lines(const SortedLine& a, const SortedLine& b, Visit&& visit) {
  const std::size_t na = a.values.size();
  const std::size_t nb = b.values.size();
  std::size_t i = 0;
  std::size_t j = 0;
  double ra = a.weights[0];
  double rb = b.weights[0];
  while (i < na && j < nb) {
    const double mass = std::min(ra, rb);
    visit(i, j, mass);
    if (ra < rb) {
      rb -= ra;
      ++i;
      ra = i < na ? a.weights[i] : 0.0;
    } else if (rb < ra) {
      ra -= rb;
      ++j;
      rb = j < nb ? b.weights[j] : 0.0;
    } else {
      ++i;
      ++j;
      ra = i < na ? a.weights[i] : 0.0;
      rb = j < nb ? b.weights[j] : 0.0;
    }
  }
}

double median_entry(const Matrix& c) {
  std::vector<double> v(c.data(), c.data() + c.size());
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

double log_sum_exp(const double* values, std::size_t count, std::size_t stride) {
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < count; ++t) hi = std::max(hi, values[t * stride]);
  if (!std::isfinite(hi)) return hi;
  double s = 0.0;
  for (std::size_t t = 0; t < count; ++t) s += std::exp(values[t * stride] - hi);
  return hi + std::log(s);
}

TransportPlan solve_sinkhorn(const EmpiricalMeasure& a, const EmpiricalMeasure& b, const Matrix& cost,
                             double p, const Sinkhorn& opts) {
  const auto m = cost.rows();
  const auto n = cost.cols();
  TransportPlan out;
  out.p = p;
  if (cost.maxCoeff() <= 0.0) {
    // Every pairing is free; the independent coupling is optimal.
    out.plan = a.weights() * b.weights().transpose();
    out.cost = 0.0;
    return out;
  }
  double eps = opts.epsilon;
  if (!(eps > 0.0)) {
    eps = 0.01 * median_entry(cost);
    if (!(eps > 0.0)) eps = 0.01 * cost.maxCoeff();
  }

  const Vector log_a = a.weights().array().log();
  const Vector log_b = b.weights().array().log();
  Vector f = Vector::Zero(m);
  Vector g = Vector::Zero(n);
  // Row-major scratch for the row updates, column-major for the column ones.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> row_buf(m, n);
  Matrix col_buf(m, n);

  bool converged = false;
  for (std::size_t it = 0; it < opts.max_iter; ++it) {
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) row_buf(i, j) = (g(j) - cost(i, j)) / eps;
      f(i) = std::isfinite(log_a(i)) ? eps * (log_a(i) - log_sum_exp(&row_buf(i, 0), static_cast<std::size_t>(n), 1))
                                     : -std::numeric_limits<double>::infinity();
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < m; ++i) col_buf(i, j) = (f(i) - cost(i, j)) / eps;
      g(j) = std::isfinite(log_b(j)) ? eps * (log_b(j) - log_sum_exp(&col_buf(0, j), static_cast<std::size_t>(m), 1))
                                     : -std::numeric_limits<double>::infinity();
    }
    // Columns are exact after the g update; check the rows.
    double err = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      double r = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) r += std::exp((f(i) + g(j) - cost(i, j)) / eps);
      err += std::abs(r - a.weights()(i));
    }
    if (err <= opts.tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw Error(ErrorKind::non_convergence,
                "sinkhorn did not reach tol " + std::to_string(opts.tol) + " in " +
                    std::to_string(opts.max_iter) + " iterations (epsilon " + std::to_string(eps) + ")");
  }

  Matrix plan(m, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) plan(i, j) = std::exp((f(i) + g(j) - cost(i, j)) / eps);
  }
  // Round onto the transport polytope (scale down overfull rows/columns,
  // then spread the deficit with a rank-one correction).
  const Vector row_sum = plan.rowwise().sum();
  for (Eigen::Index i = 0; i < m; ++i) {
    if (row_sum(i) > a.weights()(i)) plan.row(i) *= a.weights()(i) / row_sum(i);
  }
  const Vector col_sum = plan.colwise().sum().transpose();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (col_sum(j) > b.weights()(j)) plan.col(j) *= b.weights()(j) / col_sum(j);
  }
  const Vector err_a = (a.weights() - plan.rowwise().sum()).cwiseMax(0.0);
  const Vector err_b = (b.weights() - plan.colwise().sum().transpose()).cwiseMax(0.0);
  const double deficit = err_a.sum();
  if (deficit > 0.0) plan += err_a * err_b.transpose() / deficit;

  out.plan = std::move(plan);
  out.cost = out.plan.cwiseProduct(cost).sum();
  return out;
}

}  // namespace

double TransportPlan::distance() const {
  const double c = std::max(cost, 0.0);
  if (p == 1.0) return c;
  if (p == 2.0) return std::sqrt(c);
  return std::pow(c, 1.0 / p);
}

Matrix cost_matrix(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double p) {
  require_same_dim(a, b);
  require_p(p);
  Matrix c(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
  for (Eigen::Index j = 0; j < c.cols(); ++j) {
    const auto y = b.point(static_cast<std::size_t>(j));
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      c(i, j) = ground_cost(detail::squared_distance(a.point(static_cast<std::size_t>(i)), y), p);
    }
  }
  return c;
}

SortedLine sort_line(const EmpiricalMeasure& m) {
  if (m.dim() != 1) {
    throw Error(ErrorKind::dimension_mismatch,
                "quantile transport needs one-dimensional measures, got d=" + std::to_string(m.dim()));
  }
  SortedLine line;
  const std::size_t n = m.size();
  line.order.resize(n);
  std::iota(line.order.begin(), line.order.end(), std::size_t{0});
  const double* x = m.points().data();
  std::stable_sort(line.order.begin(), line.order.end(),
                   [x](std::size_t i, std::size_t j) { return x[i] < x[j]; });
  line.values.resize(n);
  line.weights.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    line.values[r] = x[line.order[r]];
    line.weights[r] = m.weights()(static_cast<Eigen::Index>(line.order[r]));
  }
  return line;
}

double quantile_cost(const SortedLine& a, const SortedLine& b, double p) {
  double cost = 0.0;
  merge_lines(a, b, [&](std::size_t i, std::size_t j, double mass) {
    cost += mass * line_cost(a.values[i], b.values[j], p);
  });
  return cost;
}

double wasserstein_1d(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double p) {
  require_p(p);
  TransportPlan t;
  t.p = p;
  t.cost = quantile_cost(sort_line(a), sort_line(b), p);
  return t.distance();
}

TransportPlan wasserstein_discrete(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                                   const OTConfig& cfg) {
  require_same_dim(a, b);
  require_p(cfg.p);
  TransportPlan out;
  out.p = cfg.p;

  if (std::holds_alternative<QuantileMethod>(cfg.method)) {
    const SortedLine la = sort_line(a);
    const SortedLine lb = sort_line(b);
    out.plan = Matrix::Zero(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(b.size()));
    merge_lines(la, lb, [&](std::size_t i, std::size_t j, double mass) {
      out.plan(static_cast<Eigen::Index>(la.order[i]), static_cast<Eigen::Index>(lb.order[j])) += mass;
      out.cost += mass * line_cost(la.values[i], lb.values[j], cfg.p);
    });
    return out;
  }

  const Matrix cost = cost_matrix(a, b, cfg.p);
  if (const auto* lp = std::get_if<ExactLp>(&cfg.method)) {
    if (a.size() * b.size() > lp->max_entries) {
      throw Error(ErrorKind::config, "exact_lp limited to " + std::to_string(lp->max_entries) +
                                         " cost entries, problem has " +
                                         std::to_string(a.size() * b.size()));
    }
    auto sol = detail::solve_transport({a.weights().data(), a.size()}, {b.weights().data(), b.size()}, cost);
    out.plan = std::move(sol.flow);
    out.cost = sol.cost;
    return out;
  }
  return solve_sinkhorn(a, b, cost, cfg.p, std::get<Sinkhorn>(cfg.method));
}

double transport_distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b, const OTConfig& cfg) {
  require_same_dim(a, b);
  if (a.dim() == 1 && !std::holds_alternative<Sinkhorn>(cfg.method)) {
    return wasserstein_1d(a, b, cfg.p);
  }
  return wasserstein_discrete(a, b, cfg).distance();
}

double smooth_wasserstein(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double sigma,
                          const OTConfig& cfg, std::size_t k, SeedSpec seed, NoiseCoupling coupling) {
  if (!(sigma >= 0.0)) throw Error(ErrorKind::config, "sigma must be nonnegative");
  if (sigma == 0.0) return transport_distance(a, b, cfg);
  const SeedSpec seed_a = coupling == NoiseCoupling::common ? seed : seed.child(1);
  const SeedSpec seed_b = coupling == NoiseCoupling::common ? seed : seed.child(2);
  return transport_distance(augment(a, sigma, k, seed_a), augment(b, sigma, k, seed_b), cfg);
}

}  // namespace gsw

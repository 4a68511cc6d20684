#include "gsw/mswe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <variant>
#include <string>

#include "gsw/error.hpp"
#include "gsw/parallel.hpp"

namespace gsw {
namespace {

using Theta = std::vector<double>;

double norm(const Theta& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Grid values for one coordinate; scales are spaced logarithmically.
std::vector<double> grid_axis(double lo, double hi, std::size_t count, bool log_spaced) {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(count - 1);
    const double v = log_spaced ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))) : lo + t * (hi - lo);
    out[i] = std::clamp(v, lo, hi);  // exp/log rounding can step outside the box
  }
  return out;
}

}  // namespace

bool ParamFamily::feasible(const Theta& theta) const {
  if (theta.size() != dim()) return false;
  for (double v : theta) {
    if (!std::isfinite(v)) return false;
  }
  const auto lo = lower();
  const auto hi = upper();
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (theta[i] < lo[i] || theta[i] > hi[i]) return false;
  }
  return true;
}

void ParamFamily::check(const Theta& theta) const {
  if (!feasible(theta)) {
    std::string msg = "theta outside the parameter box of " + family_name(kind) + ":";
    for (double v : theta) msg += " " + std::to_string(v);
    throw Error(ErrorKind::infeasible_theta, msg);
  }
}

Theta ParamFamily::lower() const {
  if (kind == FamilyKind::two_mode_means) return {-mean_bound, -mean_bound};
  return {-mean_bound, scale_min};
}

Theta ParamFamily::upper() const {
  if (kind == FamilyKind::two_mode_means) return {mean_bound, mean_bound};
  return {mean_bound, scale_max};
}

Theta ParamFamily::project(Theta theta) const {
  const auto lo = lower();
  const auto hi = upper();
  for (std::size_t i = 0; i < theta.size(); ++i) theta[i] = std::clamp(theta[i], lo[i], hi[i]);
  return theta;
}

Theta ParamFamily::canonical(Theta theta) const {
  if (kind == FamilyKind::two_mode_means && theta[0] > theta[1]) std::swap(theta[0], theta[1]);
  return theta;
}

DistributionSpec ParamFamily::distribution(const Theta& theta) const {
  check(theta);
  DistributionSpec spec;
  spec.dim = 1;
  if (kind == FamilyKind::two_mode_means) {
    spec.kind = GaussianMixture{{{theta[0]}, {theta[1]}}, {1.0, 1.0}, {0.5, 0.5}};
  } else {
    spec.kind = Gaussian{{theta[0]}, theta[1]};
  }
  return spec;
}

Theta ParamFamily::parameters(const DistributionSpec& spec) const {
  spec.validate();
  const auto not_member = [&] {
    return Error(ErrorKind::invalid_spec, "spec is not a member of family " + family_name(kind));
  };
  if (spec.dim != 1) throw not_member();
  Theta theta;
  if (kind == FamilyKind::two_mode_means) {
    const auto* mix = std::get_if<GaussianMixture>(&spec.kind);
    if (mix == nullptr || mix->means.size() != 2 || mix->scales != std::vector<double>{1.0, 1.0} ||
        mix->weights[0] != mix->weights[1]) {
      throw not_member();
    }
    theta = {mix->means[0][0], mix->means[1][0]};
  } else {
    const auto* g = std::get_if<Gaussian>(&spec.kind);
    if (g == nullptr) throw not_member();
    theta = {g->mean.empty() ? 0.0 : g->mean[0], g->scale};
  }
  check(theta);
  return canonical(theta);
}

FamilyKind parse_family(const std::string& name) {
  if (name == "two_mode_means") return FamilyKind::two_mode_means;
  if (name == "gaussian_mean_scale") return FamilyKind::gaussian_mean_scale;
  throw Error(ErrorKind::config, "unknown family '" + name + "' (expected two_mode_means or gaussian_mean_scale)");
}

std::string family_name(FamilyKind kind) {
  return kind == FamilyKind::two_mode_means ? "two_mode_means" : "gaussian_mean_scale";
}

EmpiricalMeasure model_sample(const ParamFamily& family, const Theta& theta, std::size_t n, SeedSpec seed) {
  return sorted_rows(sample(family.distribution(theta), n, seed, MixtureSampling::stratified));
}

Objective::Objective(EmpiricalMeasure data, ParamFamily family, ObjectiveConfig cfg, SeedSpec seed)
    : data_(std::move(data)), family_(family), cfg_(cfg), seed_(seed) {
  if (data_.dim() != 1) throw Error(ErrorKind::dimension_mismatch, "M-SWE data must be one-dimensional");
  if (!(cfg_.p >= 1.0)) throw Error(ErrorKind::config, "p must be >= 1");
  if (!(cfg_.sigma >= 0.0)) throw Error(ErrorKind::config, "sigma must be nonnegative");
  if (cfg_.k < 1) throw Error(ErrorKind::config, "k must be >= 1");
  if (cfg_.model_n == 0) cfg_.model_n = data_.size();
  data_line_ = sort_line(cfg_.sigma == 0.0 ? data_ : augment(data_, cfg_.sigma, cfg_.k, seed_.child(1)));
}

double Objective::operator()(const Theta& theta) const {
  const EmpiricalMeasure model = model_sample(family_, theta, cfg_.model_n, seed_.child(0));
  const SortedLine line =
      sort_line(cfg_.sigma == 0.0 ? model : augment(model, cfg_.sigma, cfg_.k, seed_.child(1)));
  TransportPlan t;
  t.p = cfg_.p;
  t.cost = quantile_cost(data_line_, line, cfg_.p);
  return t.distance();
}

double objective(const Theta& theta, const EmpiricalMeasure& data, const ParamFamily& family,
                 const ObjectiveConfig& cfg, SeedSpec seed) {
  family.check(theta);
  return Objective(data, family, cfg, seed)(theta);
}

FitResult fit(const EmpiricalMeasure& data, const ParamFamily& family, const ObjectiveConfig& cfg,
              const OptimizerConfig& opt, SeedSpec seed) {
  if (data.dim() != 1) throw Error(ErrorKind::dimension_mismatch, "M-SWE data must be one-dimensional");
  if (opt.restarts < 1 || opt.grid_points < 1) throw Error(ErrorKind::config, "optimizer needs restarts and grid points");
  const Objective f(data, family, cfg, seed);
  const std::size_t dim = family.dim();
  const Theta lo = family.lower();
  const Theta hi = family.upper();

  // Coarse grid over the box; the best points seed the descents.
  std::vector<std::vector<double>> axes(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const bool log_axis = family.kind == FamilyKind::gaussian_mean_scale && i == 1;
    axes[i] = grid_axis(lo[i], hi[i], opt.grid_points, log_axis);
  }
  std::vector<std::pair<double, Theta>> grid;
  std::vector<std::size_t> idx(dim, 0);
  for (;;) {
    Theta t(dim);
    for (std::size_t i = 0; i < dim; ++i) t[i] = axes[i][idx[i]];
    // Label-swapped mixture points are duplicates.
    if (family.canonical(t) == t) grid.emplace_back(f(t), t);
    std::size_t c = 0;
    while (c < dim && ++idx[c] == opt.grid_points) idx[c++] = 0;
    if (c == dim) break;
  }
  std::stable_sort(grid.begin(), grid.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  FitResult result;
  result.objective_value = std::numeric_limits<double>::infinity();
  const std::size_t starts = std::min(opt.restarts, grid.size());
  bool any_converged = false;

  for (std::size_t r = 0; r < starts; ++r) {
    Theta x = grid[r].second;
    double fx = grid[r].first;
    double step = opt.initial_step;
    bool converged = false;
    result.trace.push_back({r, 0, x, fx});

    for (std::size_t it = 1; it <= opt.max_iterations && !converged; ++it) {
      Theta g(dim);
      for (std::size_t i = 0; i < dim; ++i) {
        const double h = 1e-3 * (1.0 + std::abs(x[i]));
        Theta xp = x;
        Theta xm = x;
        xp[i] = std::min(x[i] + h, hi[i]);
        xm[i] = std::max(x[i] - h, lo[i]);
        g[i] = (f(xp) - f(xm)) / (xp[i] - xm[i]);
      }
      const double gn = norm(g);
      if (gn == 0.0) {
        converged = true;
        break;
      }
      // Backtracking along the normalized negative gradient.
      bool accepted = false;
      while (step >= opt.step_tol) {
        Theta y(dim);
        for (std::size_t i = 0; i < dim; ++i) y[i] = x[i] - step * g[i] / gn;
        y = family.project(std::move(y));
        const double fy = f(y);
        if (fy < fx) {
          Theta dx(dim);
          for (std::size_t i = 0; i < dim; ++i) dx[i] = y[i] - x[i];
          const double decrease = fx - fy;
          x = std::move(y);
          fx = fy;
          result.trace.push_back({r, it, x, fx});
          accepted = true;
          if (norm(dx) < opt.step_tol && decrease < opt.objective_tol) converged = true;
          step *= 2.0;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) converged = true;
    }

    any_converged = any_converged || converged;
    if (fx < result.objective_value) {
      result.objective_value = fx;
      result.theta_hat = x;
      result.converged = converged;
    }
  }

  const Theta canon = family.canonical(result.theta_hat);
  if (canon != result.theta_hat) {
    result.theta_hat = canon;
    result.objective_value = f(canon);
  }
  return result;
}

ErrorTable error_experiment(const ParamFamily& family, const Theta& true_theta, const ObjectiveConfig& cfg,
                            const OptimizerConfig& opt, const std::vector<std::size_t>& n_grid, std::size_t trials,
                            SeedSpec seed, unsigned threads) {
  family.check(true_theta);
  if (trials < 1) throw Error(ErrorKind::config, "error_experiment needs at least one trial");
  const Theta truth = family.canonical(true_theta);
  const DistributionSpec spec = family.distribution(truth);
  const std::size_t dim = family.dim();
  const std::size_t cells = n_grid.size() * trials;

  std::vector<std::vector<ErrorRow>> rows(cells);
  std::vector<ObjectiveGapRow> gaps(cells);
  parallel_for(cells, threads, [&](std::size_t cell) {
    const std::size_t ni = cell / trials;
    const std::size_t trial = cell % trials;
    const std::size_t n = n_grid[ni];
    const SeedSpec s = seed.child(ni).child(trial);
    const double root_n = std::sqrt(static_cast<double>(n));
    auto& out = rows[cell];
    gaps[cell] = {n, trial, std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    try {
      const EmpiricalMeasure data = sample(spec, n, s.child(0));
      const FitResult r = fit(data, family, cfg, opt, s.child(1));
      for (std::size_t c = 0; c < dim; ++c) {
        out.push_back({n, trial, c, root_n * (r.theta_hat[c] - truth[c]), r.theta_hat[c], false});
      }
      gaps[cell].at_truth = Objective(data, family, cfg, s.child(1))(truth);
      gaps[cell].at_fit = r.objective_value;
    } catch (const Error&) {
      out.clear();
      for (std::size_t c = 0; c < dim; ++c) {
        out.push_back({n, trial, c, std::numeric_limits<double>::quiet_NaN(),
                       std::numeric_limits<double>::quiet_NaN(), true});
      }
    }
  });

  ErrorTable table;
  for (auto& cell : rows) table.rows.insert(table.rows.end(), cell.begin(), cell.end());
  table.gaps = std::move(gaps);
  return table;
}

}  // namespace gsw

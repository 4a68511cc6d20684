// Acceptance checks. One PASS/FAIL line per criterion; exit status is the
// number of failures. Pass criterion numbers as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "gsw/experiments.hpp"
#include "gsw/measures.hpp"
#include "gsw/mmd.hpp"
#include "gsw/mswe.hpp"
#include "gsw/ot.hpp"
#include "gsw/specialfn.hpp"
#include "gsw/stats.hpp"
#include "gsw/twosample.hpp"
#include "oracles.hpp"

namespace {

using gsw::EmpiricalMeasure;
using nlohmann::json;

struct Outcome {
  bool ok = false;
  std::string detail;
};

std::string printf_str(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

double rel_err(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

EmpiricalMeasure random_measure(std::mt19937_64& gen, std::size_t n, std::size_t d, bool weighted) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  gsw::PointMatrix p(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (Eigen::Index c = 0; c < p.cols(); ++c) p(i, c) = u(gen);
  }
  if (!weighted) return EmpiricalMeasure::uniform(p);
  gsw::Vector w(p.rows());
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = 0.1 + std::abs(u(gen));
  return EmpiricalMeasure(p, w / w.sum());
}

json unif(double half_width, std::size_t dim = 1) {
  return {{"kind", "uniform_cube"}, {"dim", dim}, {"half_width", half_width}};
}

gsw::SlopeFit full_grid_slope(const gsw::CurveTable& t, double sigma) {
  std::vector<double> x, y, se;
  for (const auto& r : t.rows) {
    if (r.sigma == sigma && r.trials > 0) {
      x.push_back(static_cast<double>(r.n));
      y.push_back(r.mean);
      se.push_back(r.std_error);
    }
  }
  return gsw::loglog_slope(x, y, se);
}

Outcome kernel_correctness() {
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double z = -50.0 + 100.0 * i / 999.0;
    const double want = oracle::ein(z);
    worst = std::max(worst, rel_err(gsw::ein(z), want));
    // Same argument through the kernel: x = (1), y = (-z) at sigma = 1.
    const std::vector<double> x{1.0}, y{-z};
    worst = std::max(worst, rel_err(gsw::kernel(x, y, gsw::KernelParams(1.0)), -want));
  }
  double seam = 0.0;
  for (double a = 25.0; a <= 35.0; a += 0.1) {
    for (double z : {a, -a}) seam = std::max(seam, rel_err(gsw::ein_series(z), gsw::ein_large(z)));
  }
  return {worst <= 1e-10 && seam <= 1e-9,
          printf_str("max rel err %.2e (<= 1e-10) on 1000 points, seam max %.2e (<= 1e-9)", worst, seam)};
}

Outcome psd_property() {
  double worst = INFINITY;
  bool ok = true;
  for (std::size_t d : {1, 3, 5}) {
    const auto pts = gsw::sample({gsw::Gaussian{{}, 1.0}, d}, 50, {2, d});
    for (double sigma : {0.5, 1.0, 2.0}) {
      const gsw::Matrix g = gsw::gram(pts.points(), gsw::KernelParams(sigma));
      const double min_eig = Eigen::SelfAdjointEigenSolver<gsw::Matrix>(g, Eigen::EigenvaluesOnly).eigenvalues()(0);
      const double ratio = min_eig / g.trace();
      worst = std::min(worst, ratio);
      ok = ok && ratio >= -1e-8;
    }
  }
  return {ok, printf_str("min over 9 Gram matrices of lambda_min/trace = %.2e (>= -1e-8)", worst)};
}

Outcome ot_oracle() {
  std::mt19937_64 gen(3);
  double perm_err = 0.0;
  for (int t = 0; t < 200; ++t) {
    const auto a = random_measure(gen, 4, 2, false);
    const auto b = random_measure(gen, 4, 2, false);
    for (double p : {1.0, 2.0}) {
      const double lp = gsw::wasserstein_discrete(a, b, {p, gsw::ExactLp{}}).cost;
      perm_err = std::max(perm_err, std::abs(lp - oracle::permutation_cost(a, b, p)));
    }
  }
  double line_err = 0.0;
  for (int t = 0; t < 200; ++t) {
    const auto a = random_measure(gen, 1 + t % 13, 1, t % 2 == 0);
    const auto b = random_measure(gen, 1 + (7 * t) % 11, 1, t % 3 == 0);
    for (double p : {1.0, 2.0}) {
      const double lp = gsw::wasserstein_discrete(a, b, {p, gsw::ExactLp{}}).cost;
      line_err = std::max(line_err, std::abs(lp - oracle::quantile_integral(a, b, p)));
    }
  }
  return {perm_err <= 1e-9 && line_err <= 1e-9,
          printf_str("LP vs permutations max |diff| %.2e, LP vs quantile formula %.2e (<= 1e-9)", perm_err,
                     line_err)};
}

Outcome fast_rate() {
  const auto cfg = gsw::parse_experiment_config({{"kind", "convergence_curve"},
                                                 {"spec", unif(1.0)},
                                                 {"sigmas", {1.0}},
                                                 {"n_grid", {16, 32, 64, 128, 256, 512, 1024}},
                                                 {"trials", 20},
                                                 {"metric", "mmd"},
                                                 {"reference", "quadrature"},
                                                 {"seed", 4}});
  const auto fit = full_grid_slope(gsw::convergence_curve(cfg), 1.0);
  return {fit.slope >= -0.60 && fit.slope <= -0.40,
          printf_str("d_2 slope %.3f +- %.3f (in [-0.60, -0.40])", fit.slope, fit.slope_std_error)};
}

Outcome curse_contrast() {
  const json grid = {16, 32, 64, 128, 256, 512};
  const auto plain = gsw::parse_experiment_config({{"kind", "convergence_curve"},
                                                   {"spec", unif(1.0, 5)},
                                                   {"sigmas", {0.0}},
                                                   {"n_grid", grid},
                                                   {"trials", 10},
                                                   {"ref_n", 5120},
                                                   {"ot", {{"method", "exact_lp"}, {"max_entries", 3'000'000}}},
                                                   {"seed", 5}});
  const auto smooth = gsw::parse_experiment_config({{"kind", "convergence_curve"},
                                                    {"spec", unif(1.0, 5)},
                                                    {"sigmas", {1.0}},
                                                    {"n_grid", grid},
                                                    {"trials", 10},
                                                    {"ref_n", 5120},
                                                    {"k", 4},
                                                    {"ref_k", 1},
                                                    {"ot", {{"method", "exact_lp"}, {"max_entries", 11'000'000}}},
                                                    {"seed", 5}});
  const auto p = full_grid_slope(gsw::convergence_curve(plain), 0.0);
  const auto s = full_grid_slope(gsw::convergence_curve(smooth), 1.0);
  const bool ok = p.slope >= -0.30 && p.slope <= -0.12 && s.slope <= -0.40;
  return {ok, printf_str("unsmoothed slope %.3f +- %.3f (in [-0.30, -0.12]), sigma=1 slope %.3f +- %.3f (<= -0.40)",
                         p.slope, p.slope_std_error, s.slope, s.slope_std_error)};
}

Outcome one_sample_identity() {
  const gsw::DistributionSpec spec{gsw::UniformCube{1.0, {}}, 1};
  const gsw::KernelParams params(0.5);
  const gsw::ReferenceEmbedding population(gsw::quadrature_measure(spec), params);
  std::vector<double> values(2000);
  for (std::size_t t = 0; t < values.size(); ++t) {
    values[t] = population.d2_squared(gsw::sample(spec, 100, {6, t + 1})).d2_squared;
  }
  const auto sim = gsw::summarize(values);
  const auto id = gsw::one_sample_identity(spec, params, 100, 1'000'000, {6, 0});
  const double se = std::hypot(sim.std_error, id.std_error);
  const double z = std::abs(sim.mean - id.value) / se;
  return {z <= 3.0, printf_str("simulated %.5e vs identity %.5e, |diff| = %.2f combined SE (<= 3)", sim.mean,
                               id.value, z)};
}

Outcome bound_dominance() {
  const json grid = {16, 32, 64, 128, 256, 512, 1024};
  const auto conv = gsw::convergence_curve(gsw::parse_experiment_config(
      {{"kind", "convergence_curve"}, {"spec", unif(1.0)}, {"sigmas", {0.5}}, {"n_grid", grid}, {"trials", 10},
       {"seed", 7}}));
  const auto bound = gsw::bound_curve(gsw::parse_experiment_config(
      {{"kind", "bound_curve"}, {"spec", unif(1.0)}, {"sigmas", {0.5}}, {"n_grid", grid}, {"seed", 7}}));
  bool ok = true;
  double min_ratio = INFINITY;
  for (const auto& b : bound.rows) {
    const auto* c = conv.find(0.5, b.n);
    if (c == nullptr || c->trials == 0) {
      ok = false;
      continue;
    }
    ok = ok && b.mean >= c->mean;
    min_ratio = std::min(min_ratio, b.mean / c->mean);
  }
  return {ok, printf_str("min bound / measured GW_2 over %zu n values = %.2f (>= 1)", bound.rows.size(), min_ratio)};
}

std::vector<gsw::RejectionRate> two_sample_rates(double shift_b) {
  gsw::TestConfig cfg;
  cfg.p = 1.0;
  cfg.sigma = 0.1;
  cfg.replicates = 500;
  cfg.ot = {1.0, gsw::QuantileMethod{}};
  const gsw::DistributionSpec a{gsw::UniformCube{0.5, {0.5}}, 1};
  const gsw::DistributionSpec b{gsw::UniformCube{0.5, {0.5 + shift_b}}, 1};
  const std::vector<double> alphas{0.05, 0.1, 0.2, 0.3};
  return gsw::rejection_curve(a, b, 256, 256, cfg, alphas, 200, {8, 0});
}

Outcome two_sample_level() {
  const auto rates = two_sample_rates(0.0);
  double at_01 = NAN, worst = 0.0;
  std::string all;
  for (const auto& r : rates) {
    if (r.alpha == 0.1) at_01 = r.rate;
    worst = std::max(worst, std::abs(r.rate - r.alpha));
    all += printf_str(" %.2f:%.3f", r.alpha, r.rate);
  }
  return {at_01 >= 0.04 && at_01 <= 0.18 && worst <= 0.08,
          printf_str("rate at 0.1 = %.3f (in [0.04, 0.18]), max |rate - alpha| = %.3f (<= 0.08); alpha:rate", at_01,
                     worst) +
              all};
}

Outcome two_sample_power() {
  const auto rates = two_sample_rates(0.5);
  double at_01 = NAN;
  for (const auto& r : rates) {
    if (r.alpha == 0.1) at_01 = r.rate;
  }
  return {at_01 >= 0.9, printf_str("rejection rate at alpha 0.1 under shift 0.5 = %.3f (>= 0.9)", at_01)};
}

Outcome limit_distribution() {
  auto cfg_for = [](double s) {
    return gsw::parse_experiment_config({{"kind", "limit_distribution"},
                                         {"spec", {{"kind", "gaussian"}, {"dim", 5}, {"scale", s}}},
                                         {"sigma", 1.0},
                                         {"n_grid", {32, 64, 128, 256, 512}},
                                         {"trials", 50},
                                         {"ref_n", 10000},
                                         {"seed", 10}});
  };
  const auto small = gsw::limit_distribution(cfg_for(0.1));
  const auto large = gsw::limit_distribution(cfg_for(1.0));
  const bool ok = small.relative_range < 0.25 && large.growth > 0.5;
  return {ok, printf_str("s=0.1 median drift (max-min)/min = %.3f (< 0.25); s=1.0 growth n=512 vs 32 = %.3f (> 0.5)",
                         small.relative_range, large.growth)};
}

Outcome mswe_spread() {
  const gsw::ParamFamily family{gsw::FamilyKind::two_mode_means};
  const std::vector<std::size_t> grid{64, 256, 1024};
  const std::vector<double> truth{-1.0, 1.0};
  const auto t = gsw::error_experiment(family, truth, gsw::ObjectiveConfig{2.0, 0.5, 16, 0}, gsw::OptimizerConfig{},
                                       grid, 40, {11, 0});
  bool ok = true;
  std::string detail;
  std::size_t failed = 0;
  for (std::size_t coord = 0; coord < 2; ++coord) {
    std::vector<double> sds;
    std::vector<double> hat_1024;
    for (std::size_t n : grid) {
      std::vector<double> e;
      for (const auto& r : t.rows) {
        if (r.n != n || r.coord != coord) continue;
        if (r.failed) {
          ++failed;
          continue;
        }
        e.push_back(r.scaled_error);
        if (n == 1024) hat_1024.push_back(r.theta_hat);
      }
      sds.push_back(gsw::summarize(e).std_dev);
    }
    const double ratio = *std::max_element(sds.begin(), sds.end()) / *std::min_element(sds.begin(), sds.end());
    const double bias = gsw::summarize(hat_1024).mean - truth[coord];
    ok = ok && ratio <= 2.0 && std::abs(bias) <= 0.15;
    detail += printf_str("coord %zu: sd %.2f/%.2f/%.2f ratio %.2f (<= 2), mean-theta* at 1024 %.3f (|.| <= 0.15); ",
                         coord, sds[0], sds[1], sds[2], ratio, bias);
  }
  detail += printf_str("failed fits %zu", failed);
  return {ok && failed == 0, detail};
}

Outcome stability() {
  std::mt19937_64 gen(12);
  std::normal_distribution<double> shift(0.0, 1.0);
  const double bound = 2.0 * std::sqrt((1.0 - 0.25) * (1 + 4 + 2));
  const gsw::OTConfig cfg{2.0, gsw::QuantileMethod{}};
  bool ok = true;
  double worst = 0.0;
  for (std::uint64_t t = 0; t < 20; ++t) {
    auto a = random_measure(gen, 50, 1, false);
    gsw::PointMatrix pb = random_measure(gen, 50, 1, false).points();
    pb.array() = 2.0 * pb.array() + shift(gen);
    const auto b = EmpiricalMeasure::uniform(pb);
    // Monte Carlo mean and standard error of the estimator over noise draws.
    auto mc = [&](double sigma) {
      std::vector<double> v;
      for (std::uint64_t r = 0; r < 10; ++r) v.push_back(gsw::smooth_wasserstein(a, b, sigma, cfg, 32, {12, 100 * t + r}));
      return gsw::summarize(v);
    };
    const auto lo = mc(0.5);
    const auto hi = mc(1.0);
    const double slack = bound + 3.0 * std::hypot(lo.std_error, hi.std_error) - std::abs(hi.mean - lo.mean);
    worst = std::max(worst, std::abs(hi.mean - lo.mean));
    ok = ok && slack >= 0.0;
  }
  return {ok, printf_str("max |W^(1) - W^(0.5)| = %.3f over 20 pairs, bound %.3f + 3 SE", worst, bound)};
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "kernel correctness", 1, kernel_correctness},
      {2, "PSD property", 5, psd_property},
      {3, "OT oracle equivalence", 30, ot_oracle},
      {4, "fast rate", 120, fast_rate},
      {5, "curse-of-dimensionality contrast", 600, curse_contrast},
      {6, "one-sample identity", 120, one_sample_identity},
      {7, "dominance of the bound", 300, bound_dominance},
      {8, "two-sample level", 900, two_sample_level},
      {9, "two-sample power", 900, two_sample_power},
      {10, "limit-distribution stabilization/divergence", 600, limit_distribution},
      {11, "M-SWE spread", 1200, mswe_spread},
      {12, "stability inequality", 120, stability},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.contains(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_seconds;
    const bool pass = out.ok && in_time;
    failures += pass ? 0 : 1;
    std::printf("%s criterion %d (%s): %s; runtime %.1f s (< %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                out.detail.c_str(), secs, c.budget_seconds, in_time ? "" : ", exceeded");
    std::fflush(stdout);
  }
  return failures;
}

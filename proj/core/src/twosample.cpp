#include "gsw/twosample.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gsw/error.hpp"
#include "gsw/mmd.hpp"
#include "gsw/parallel.hpp"

namespace gsw {
namespace {

double size_factor(std::size_t m, std::size_t n) {
  const auto mm = static_cast<double>(m);
  const auto nn = static_cast<double>(n);
  return std::sqrt(mm * nn / (mm + nn));
}

OTConfig ot_for(const TestConfig& cfg) {
  OTConfig ot = cfg.ot;
  ot.p = cfg.p;
  return ot;
}

// Draws indices into the pooled measure according to its weights.
class PoolSampler {
 public:
  explicit PoolSampler(const EmpiricalMeasure& pooled) : uniform_(pooled.has_uniform_weights()) {
    cumulative_.resize(pooled.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < pooled.size(); ++i) {
      acc += pooled.weights()(static_cast<Eigen::Index>(i));
      cumulative_[i] = acc;
    }
  }

  std::size_t draw(Rng& rng) const {
    if (uniform_) return rng.index(cumulative_.size());
    const double u = rng.uniform() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
  }

 private:
  bool uniform_;
  std::vector<double> cumulative_;
};

EmpiricalMeasure gather(const EmpiricalMeasure& pooled, const std::vector<std::size_t>& idx) {
  PointMatrix pts(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(pooled.dim()));
  for (std::size_t r = 0; r < idx.size(); ++r) {
    pts.row(static_cast<Eigen::Index>(r)) = pooled.points().row(static_cast<Eigen::Index>(idx[r]));
  }
  return EmpiricalMeasure::uniform(std::move(pts));
}

// Pooled data centered at the pooled mean, plus the Gram over it.
struct CenteredPool {
  EmpiricalMeasure pooled;
  PooledGram gram;
  double scale;  // p exp(tr Sigma / (2 q sigma^2))
};

CenteredPool make_centered_pool(const EmpiricalMeasure& a, const EmpiricalMeasure& b, const TestConfig& cfg) {
  const EmpiricalMeasure pooled = pool(a, b);
  const Vector z_bar = mean(pooled);
  EmpiricalMeasure centered = center(pooled, {z_bar.data(), static_cast<std::size_t>(z_bar.size())});
  PooledGram gram(centered.points(), KernelParams(cfg.sigma), cfg.threads);
  const double scale = gw_upper_bound(1.0, cov_trace(pooled), cfg.p, cfg.sigma);
  return {std::move(centered), std::move(gram), scale};
}

}  // namespace

void TestConfig::validate() const {
  if (p != 1.0 && p != 2.0) {
    throw Error(ErrorKind::config, "two-sample test supports p = 1 or p = 2 (only d_2 has a computable form)");
  }
  if (!(sigma > 0.0)) throw Error(ErrorKind::config, "two-sample test needs sigma > 0");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::config, "alpha must lie in (0, 1)");
  if (replicates < 100) throw Error(ErrorKind::config, "bootstrap needs at least 100 replicates");
  if (k < 1) throw Error(ErrorKind::config, "k must be >= 1");
}

double bootstrap_quantile(std::span<const double> sorted_values, double alpha) {
  if (sorted_values.empty()) throw Error(ErrorKind::config, "no bootstrap values");
  const auto b = static_cast<double>(sorted_values.size());
  // The 1e-9 slack keeps e.g. (1 - (1 - 1/B)) * B from rounding up past 1.
  auto rank = static_cast<std::size_t>(std::ceil((1.0 - alpha) * b - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted_values.size());
  return sorted_values[rank - 1];
}

double bootstrap_scale_factor(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double p, double sigma) {
  return gw_upper_bound(1.0, cov_trace(pool(a, b)), p, sigma);
}

double statistic(const EmpiricalMeasure& a, const EmpiricalMeasure& b, const TestConfig& cfg, SeedSpec seed) {
  cfg.validate();
  if (a.size() < 2 || b.size() < 2) throw Error(ErrorKind::config, "two-sample test needs m, n >= 2");
  const double scale = size_factor(a.size(), b.size());
  if (cfg.p == 2.0 && cfg.mode == TestMode::mmd) {
    const EmpiricalMeasure pooled = pool(a, b);
    const Vector z_bar = mean(pooled);
    const std::span<const double> shift{z_bar.data(), static_cast<std::size_t>(z_bar.size())};
    const double d2 = d2_squared(center(a, shift), center(b, shift), KernelParams(cfg.sigma),
                                 Estimator::v_statistic, cfg.threads)
                          .d2;
    return bootstrap_scale_factor(a, b, cfg.p, cfg.sigma) * scale * d2;
  }
  return scale * smooth_wasserstein(a, b, cfg.sigma, ot_for(cfg), cfg.k, seed.child(0));
}

BootstrapDistribution bootstrap_critical_value(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                                               const TestConfig& cfg, SeedSpec seed) {
  cfg.validate();
  if (a.dim() != b.dim()) throw Error(ErrorKind::dimension_mismatch, "two-sample inputs differ in dimension");
  const std::size_t m = a.size();
  const std::size_t n = b.size();
  const double scale = size_factor(m, n);
  const EmpiricalMeasure pooled = pool(a, b);
  const PoolSampler sampler(pooled);
  const SeedSpec boot_seed = seed.child(1);

  BootstrapDistribution out;
  out.values.assign(cfg.replicates, 0.0);

  if (cfg.p == 2.0) {
    const CenteredPool cp = make_centered_pool(a, b, cfg);
    const auto total = static_cast<Eigen::Index>(pooled.size());
    parallel_for(cfg.replicates, cfg.threads, [&](std::size_t r) {
      Rng rng(boot_seed.child(r));
      Vector w = Vector::Zero(total);
      for (std::size_t i = 0; i < m; ++i) w(static_cast<Eigen::Index>(sampler.draw(rng))) += 1.0 / static_cast<double>(m);
      for (std::size_t j = 0; j < n; ++j) w(static_cast<Eigen::Index>(sampler.draw(rng))) -= 1.0 / static_cast<double>(n);
      const double d2 = make_mmd_result(cp.gram.quadratic_form(w), Estimator::v_statistic).d2;
      out.values[r] = cp.scale * scale * d2;
    });
  } else {
    const OTConfig ot = ot_for(cfg);
    parallel_for(cfg.replicates, cfg.threads, [&](std::size_t r) {
      const SeedSpec rs = boot_seed.child(r);
      Rng rng(rs.child(0));
      std::vector<std::size_t> ia(m);
      std::vector<std::size_t> ib(n);
      for (auto& i : ia) i = sampler.draw(rng);
      for (auto& j : ib) j = sampler.draw(rng);
      out.values[r] = scale * smooth_wasserstein(gather(pooled, ia), gather(pooled, ib), cfg.sigma, ot, cfg.k,
                                                 rs.child(1));
    });
  }

  std::sort(out.values.begin(), out.values.end());
  out.critical_value = bootstrap_quantile(out.values, cfg.alpha);
  return out;
}

TestResult test(const EmpiricalMeasure& a, const EmpiricalMeasure& b, const TestConfig& cfg, SeedSpec seed) {
  TestResult result;
  result.statistic = statistic(a, b, cfg, seed);
  auto boot = bootstrap_critical_value(a, b, cfg, seed);
  result.critical_value = boot.critical_value;
  result.bootstrap_values = std::move(boot.values);
  result.reject = result.statistic > result.critical_value;
  return result;
}

std::vector<RejectionRate> rejection_curve(const DistributionSpec& spec_a, const DistributionSpec& spec_b,
                                           std::size_t n, std::size_t m, const TestConfig& cfg,
                                           std::span<const double> alphas, std::size_t repetitions,
                                           SeedSpec seed) {
  cfg.validate();
  if (repetitions < 1) throw Error(ErrorKind::config, "rejection_curve needs at least one repetition");
  for (double alpha : alphas) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::config, "alpha must lie in (0, 1)");
  }
  // Repetitions run in parallel; each test runs single-threaded inside.
  TestConfig inner = cfg;
  inner.threads = 1;
  std::vector<std::vector<char>> rejected(repetitions, std::vector<char>(alphas.size(), 0));
  parallel_for(repetitions, cfg.threads, [&](std::size_t r) {
    const SeedSpec rs = seed.child(r);
    const EmpiricalMeasure a = sample(spec_a, n, rs.child(0));
    const EmpiricalMeasure b = sample(spec_b, m, rs.child(1));
    const double stat = statistic(a, b, inner, rs.child(2));
    const auto boot = bootstrap_critical_value(a, b, inner, rs.child(2));
    for (std::size_t t = 0; t < alphas.size(); ++t) {
      rejected[r][t] = stat > bootstrap_quantile(boot.values, alphas[t]) ? 1 : 0;
    }
  });
  std::vector<RejectionRate> out;
  for (std::size_t t = 0; t < alphas.size(); ++t) {
    std::size_t count = 0;
    for (const auto& row : rejected) count += static_cast<std::size_t>(row[t]);
    out.push_back({alphas[t], static_cast<double>(count) / static_cast<double>(repetitions)});
  }
  return out;
}

}  // namespace gsw

#include "gsw/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "gsw/error.hpp"
#include "linalg.hpp"

namespace gsw {
namespace {

constexpr double kMassTol = 1e-12;

void require_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(ErrorKind::dimension_mismatch,
                std::string(what) + ": dimension " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

EmpiricalMeasure::EmpiricalMeasure(PointMatrix points, Vector weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.rows() < 1 || points_.cols() < 1) {
    throw Error(ErrorKind::invalid_spec, "empirical measure needs at least one point of dimension >= 1");
  }
  if (weights_.size() != points_.rows()) {
    throw Error(ErrorKind::dimension_mismatch, "weight count differs from point count");
  }
  if (!points_.allFinite() || !weights_.allFinite()) {
    throw Error(ErrorKind::non_finite, "empirical measure has non-finite entries");
  }
  if ((weights_.array() < 0.0).any()) {
    throw Error(ErrorKind::invalid_spec, "negative weight");
  }
  if (std::abs(detail::total(weights_) - 1.0) > kMassTol) {
    throw Error(ErrorKind::invalid_spec,
                "weights sum to " + std::to_string(detail::total(weights_)) + ", expected 1");
  }
}

EmpiricalMeasure EmpiricalMeasure::uniform(PointMatrix points) {
  const auto n = points.rows();
  if (n < 1) throw Error(ErrorKind::invalid_spec, "empirical measure needs at least one point");
  return EmpiricalMeasure(std::move(points), Vector::Constant(n, 1.0 / static_cast<double>(n)));
}

std::span<const double> EmpiricalMeasure::point(std::size_t i) const {
  return detail::row(points_, static_cast<Eigen::Index>(i));
}

bool EmpiricalMeasure::has_uniform_weights() const {
  const double w = 1.0 / static_cast<double>(size());
  return ((weights_.array() - w).abs() <= 1e-15).all();
}

void DistributionSpec::validate() const {
  if (dim < 1) throw Error(ErrorKind::invalid_spec, "dim must be positive");
  std::visit(
      overloaded{
          [this](const UniformCube& u) {
            if (!(u.half_width > 0.0)) throw Error(ErrorKind::invalid_spec, "half_width must be positive");
            if (!u.center.empty() && u.center.size() != dim) {
              throw Error(ErrorKind::invalid_spec, "uniform_cube center has wrong dimension");
            }
          },
          [this](const Gaussian& g) {
            if (!g.mean.empty() && g.mean.size() != dim) {
              throw Error(ErrorKind::invalid_spec, "gaussian mean has wrong dimension");
            }
            if (!(g.scale > 0.0)) throw Error(ErrorKind::invalid_spec, "gaussian scale must be positive");
          },
          [this](const GaussianMixture& g) {
            const std::size_t c = g.means.size();
            if (c == 0 || g.scales.size() != c || g.weights.size() != c) {
              throw Error(ErrorKind::invalid_spec, "mixture needs matching means/scales/weights");
            }
            double total = 0.0;
            for (std::size_t i = 0; i < c; ++i) {
              if (g.means[i].size() != dim) {
                throw Error(ErrorKind::invalid_spec, "mixture mean has wrong dimension");
              }
              if (!(g.scales[i] > 0.0)) throw Error(ErrorKind::invalid_spec, "mixture scale must be positive");
              if (!(g.weights[i] >= 0.0)) throw Error(ErrorKind::invalid_spec, "negative mixture weight");
              total += g.weights[i];
            }
            if (std::abs(total - 1.0) > kMassTol) {
              throw Error(ErrorKind::invalid_spec, "mixture weights must sum to 1");
            }
          },
      },
      kind);
}

Vector DistributionSpec::mean() const {
  const auto d = static_cast<Eigen::Index>(dim);
  return std::visit(
      overloaded{
          [d](const UniformCube& u) -> Vector {
            if (u.center.empty()) return Vector::Zero(d);
            return Eigen::Map<const Vector>(u.center.data(), d);
          },
          [d](const Gaussian& g) -> Vector {
            if (g.mean.empty()) return Vector::Zero(d);
            return Eigen::Map<const Vector>(g.mean.data(), d);
          },
          [d](const GaussianMixture& g) -> Vector {
            Vector m = Vector::Zero(d);
            for (std::size_t c = 0; c < g.means.size(); ++c) {
              m += g.weights[c] * Eigen::Map<const Vector>(g.means[c].data(), d);
            }
            return m;
          },
      },
      kind);
}

double DistributionSpec::central_second_moment() const {
  const auto d = static_cast<double>(dim);
  return std::visit(
      overloaded{
          [d](const UniformCube& u) { return d * u.half_width * u.half_width / 3.0; },
          [d](const Gaussian& g) { return d * g.scale * g.scale; },
          [d, this](const GaussianMixture& g) {
            const Vector m = mean();
            double total = 0.0;
            for (std::size_t c = 0; c < g.means.size(); ++c) {
              const Vector mc = Eigen::Map<const Vector>(g.means[c].data(), m.size());
              total += g.weights[c] * (d * g.scales[c] * g.scales[c] + (mc - m).squaredNorm());
            }
            return total;
          },
      },
      kind);
}

DistributionSpec DistributionSpec::centered() const {
  DistributionSpec out = *this;
  const Vector m = mean();
  std::visit(overloaded{
                 [](UniformCube& u) { u.center.clear(); },
                 [](Gaussian& g) { g.mean.clear(); },
                 [&m](GaussianMixture& g) {
                   for (auto& mc : g.means) {
                     for (std::size_t k = 0; k < mc.size(); ++k) mc[k] -= m(static_cast<Eigen::Index>(k));
                   }
                 },
             },
             out.kind);
  return out;
}

EmpiricalMeasure sample(const DistributionSpec& spec, std::size_t n, SeedSpec seed,
                        MixtureSampling mixture) {
  spec.validate();
  if (n < 1) throw Error(ErrorKind::invalid_spec, "sample size must be at least 1");
  const auto rows = static_cast<Eigen::Index>(n);
  const auto d = static_cast<Eigen::Index>(spec.dim);
  PointMatrix pts(rows, d);
  Rng rng(seed);

  std::visit(
      overloaded{
          [&](const UniformCube& u) {
            for (Eigen::Index i = 0; i < rows; ++i) {
              for (Eigen::Index k = 0; k < d; ++k) pts(i, k) = u.half_width * (2.0 * rng.uniform() - 1.0);
            }
            if (!u.center.empty()) pts.rowwise() += Eigen::Map<const Vector>(u.center.data(), d).transpose();
          },
          [&](const Gaussian& g) {
            for (Eigen::Index i = 0; i < rows; ++i) {
              for (Eigen::Index k = 0; k < d; ++k) {
                const double mu = g.mean.empty() ? 0.0 : g.mean[static_cast<std::size_t>(k)];
                pts(i, k) = mu + g.scale * rng.normal();
              }
            }
          },
          [&](const GaussianMixture& g) {
            const std::size_t comps = g.means.size();
            if (mixture == MixtureSampling::iid) {
              for (Eigen::Index i = 0; i < rows; ++i) {
                const double u = rng.uniform();
                std::size_t c = 0;
                double acc = g.weights[0];
                while (c + 1 < comps && u >= acc) acc += g.weights[++c];
                for (Eigen::Index k = 0; k < d; ++k) {
                  pts(i, k) = g.means[c][static_cast<std::size_t>(k)] + g.scales[c] * rng.normal();
                }
              }
              return;
            }
            std::vector<std::size_t> counts(comps);
            std::size_t assigned = 0;
            for (std::size_t c = 0; c < comps; ++c) {
              counts[c] = static_cast<std::size_t>(std::floor(g.weights[c] * static_cast<double>(n)));
              assigned += counts[c];
            }
            counts[0] += n - assigned;
            const std::size_t longest = *std::max_element(counts.begin(), counts.end());
            PointMatrix base(static_cast<Eigen::Index>(longest), d);
            for (Eigen::Index r = 0; r < base.rows(); ++r) {
              for (Eigen::Index k = 0; k < d; ++k) base(r, k) = rng.normal();
            }
            Eigen::Index i = 0;
            for (std::size_t c = 0; c < comps; ++c) {
              for (std::size_t r = 0; r < counts[c]; ++r, ++i) {
                for (Eigen::Index k = 0; k < d; ++k) {
                  pts(i, k) = g.means[c][static_cast<std::size_t>(k)] +
                              g.scales[c] * base(static_cast<Eigen::Index>(r), k);
                }
              }
            }
          },
      },
      spec.kind);

  return EmpiricalMeasure::uniform(std::move(pts));
}

EmpiricalMeasure augment(const EmpiricalMeasure& m, double sigma, std::size_t k, SeedSpec seed) {
  if (k < 1) throw Error(ErrorKind::invalid_spec, "augmentation needs k >= 1");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorKind::invalid_spec, "augmentation sigma must be nonnegative");
  }
  const auto n = static_cast<Eigen::Index>(m.size());
  const auto d = static_cast<Eigen::Index>(m.dim());
  const auto kk = static_cast<Eigen::Index>(k);
  PointMatrix pts(n * kk, d);
  Vector w(n * kk);
  Rng rng(seed);
  const auto& src = m.points();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double wi = m.weights()(i) / static_cast<double>(k);
    for (Eigen::Index l = 0; l < kk; ++l) {
      const Eigen::Index row = i * kk + l;
      for (Eigen::Index c = 0; c < d; ++c) pts(row, c) = src(i, c) + sigma * rng.normal();
      w(row) = wi;
    }
  }
  // Per-replica rounding can leave the total a few ulps off 1.
  w /= detail::total(w);
  return EmpiricalMeasure(std::move(pts), std::move(w));
}

EmpiricalMeasure center(const EmpiricalMeasure& m, std::span<const double> a) {
  require_dim(m.dim(), a.size(), "center");
  PointMatrix pts = m.points();
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    for (Eigen::Index k = 0; k < pts.cols(); ++k) pts(i, k) -= a[static_cast<std::size_t>(k)];
  }
  return EmpiricalMeasure(std::move(pts), m.weights());
}

Vector mean(const EmpiricalMeasure& m) {
  return m.points().transpose() * m.weights();
}

double cov_trace(const EmpiricalMeasure& m) {
  const Vector mu = mean(m);
  double total = 0.0;
  for (Eigen::Index i = 0; i < m.points().rows(); ++i) {
    total += m.weights()(i) * (m.points().row(i).transpose() - mu).squaredNorm();
  }
  return total;
}

double second_moment(const EmpiricalMeasure& m) {
  return m.weights().dot(m.points().rowwise().squaredNorm());
}

EmpiricalMeasure quadrature_measure(const DistributionSpec& spec) {
  spec.validate();
  const auto* cube = std::get_if<UniformCube>(&spec.kind);
  if (cube == nullptr || spec.dim != 1) {
    throw Error(ErrorKind::config, "quadrature reference needs a one-dimensional uniform_cube");
  }
  using rule = boost::math::quadrature::gauss<double, 64>;
  // The rule stores the nonnegative half of the symmetric node set.
  const auto& x = rule::abscissa();
  const auto& w = rule::weights();
  PointMatrix pts(2 * static_cast<Eigen::Index>(x.size()), 1);
  Vector wt(pts.rows());
  const double c = cube->center.empty() ? 0.0 : cube->center[0];
  Eigen::Index r = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    pts(r, 0) = c + cube->half_width * x[i];
    wt(r++) = w[i] / 2.0;
    pts(r, 0) = c - cube->half_width * x[i];
    wt(r++) = w[i] / 2.0;
  }
  wt /= detail::total(wt);
  return EmpiricalMeasure(std::move(pts), std::move(wt));
}

EmpiricalMeasure pool(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
  require_dim(a.dim(), b.dim(), "pool");
  const auto na = static_cast<Eigen::Index>(a.size());
  const auto nb = static_cast<Eigen::Index>(b.size());
  const double total = static_cast<double>(na + nb);
  PointMatrix pts(na + nb, a.points().cols());
  pts.topRows(na) = a.points();
  pts.bottomRows(nb) = b.points();
  Vector w(na + nb);
  w.head(na) = a.weights() * (static_cast<double>(na) / total);
  w.tail(nb) = b.weights() * (static_cast<double>(nb) / total);
  w /= detail::total(w);
  return EmpiricalMeasure(std::move(pts), std::move(w));
}

EmpiricalMeasure sorted_rows(const EmpiricalMeasure& m) {
  const auto& pts = m.points();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(pts.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&pts](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index k = 0; k < pts.cols(); ++k) {
      if (pts(a, k) != pts(b, k)) return pts(a, k) < pts(b, k);
    }
    return false;
  });
  PointMatrix out(pts.rows(), pts.cols());
  Vector w(pts.rows());
  for (Eigen::Index r = 0; r < pts.rows(); ++r) {
    out.row(r) = pts.row(order[static_cast<std::size_t>(r)]);
    w(r) = m.weights()(order[static_cast<std::size_t>(r)]);
  }
  return EmpiricalMeasure(std::move(out), std::move(w));
}

}  // namespace gsw

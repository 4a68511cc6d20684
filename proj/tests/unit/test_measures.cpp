#include <algorithm>
#include <cmath>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "gsw/error.hpp"
#include "gsw/measures.hpp"

namespace {

using gsw::DistributionSpec;
using gsw::EmpiricalMeasure;
using gsw::SeedSpec;

DistributionSpec cube(std::size_t d, double h = 1.0) { return {gsw::UniformCube{h, {}}, d}; }

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double best = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    best = std::max(best, std::abs(double(i) / a.size() - double(j) / b.size()));
  }
  return best;
}

std::vector<double> column(const EmpiricalMeasure& m, int c = 0) {
  std::vector<double> v(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) v[i] = m.points()(static_cast<Eigen::Index>(i), c);
  return v;
}

TEST(EmpiricalMeasure, Validation) {
  gsw::PointMatrix p(2, 1);
  p << 0, 1;
  EXPECT_THROW(EmpiricalMeasure(p, gsw::Vector::Constant(2, 0.6)), gsw::Error);
  gsw::Vector neg(2);
  neg << 1.5, -0.5;
  EXPECT_THROW(EmpiricalMeasure(p, neg), gsw::Error);
  EXPECT_THROW(EmpiricalMeasure(p, gsw::Vector::Constant(3, 1.0 / 3)), gsw::Error);
  gsw::PointMatrix bad(1, 1);
  bad << NAN;
  EXPECT_THROW(EmpiricalMeasure::uniform(bad), gsw::Error);
  EXPECT_THROW(EmpiricalMeasure::uniform(gsw::PointMatrix(0, 1)), gsw::Error);
}

TEST(Sample, CubeSupportAndDeterminism) {
  const auto m = gsw::sample(cube(2), 3, {42, 0});
  EXPECT_EQ(m.size(), 3u);
  EXPECT_EQ(m.dim(), 2u);
  EXPECT_TRUE((m.points().array().abs() <= 1.0).all());
  const auto again = gsw::sample(cube(2), 3, {42, 0});
  EXPECT_TRUE((m.points().array() == again.points().array()).all());
  const auto other = gsw::sample(cube(2), 3, {42, 1});
  EXPECT_FALSE((m.points().array() == other.points().array()).all());
  EXPECT_TRUE(m.has_uniform_weights());
}

TEST(Sample, GaussianMeanClt) {
  const double s = 2.0;
  DistributionSpec spec{gsw::Gaussian{{0.0, 0.0}, s}, 2};
  const auto m = gsw::sample(spec, 100000, {7, 0});
  const auto mu = gsw::mean(m);
  for (int c = 0; c < 2; ++c) EXPECT_LT(std::abs(mu(c)), 4 * s / std::sqrt(1e5));
}

TEST(Sample, DegenerateMixtureMatchesComponent) {
  DistributionSpec mix{gsw::GaussianMixture{{{0.5}, {3.0}}, {1.0, 2.0}, {1.0, 0.0}}, 1};
  DistributionSpec comp{gsw::Gaussian{{0.5}, 1.0}, 1};
  const double ks = ks_statistic(column(gsw::sample(mix, 10000, {1, 0})), column(gsw::sample(comp, 10000, {1, 1})));
  EXPECT_LT(ks, 1.628 * std::sqrt(2.0 / 10000));
}

TEST(Sample, StratifiedMixtureSplitsEvenly) {
  DistributionSpec mix{gsw::GaussianMixture{{{-100.0}, {100.0}}, {1.0, 1.0}, {0.5, 0.5}}, 1};
  const auto m = gsw::sample(mix, 11, {3, 0}, gsw::MixtureSampling::stratified);
  const auto v = column(m);
  EXPECT_EQ(std::count_if(v.begin(), v.end(), [](double x) { return x < 0; }), 6);
}

TEST(Sample, InvalidSpecs) {
  EXPECT_THROW(gsw::sample(DistributionSpec{gsw::GaussianMixture{{{0.0}}, {1.0}, {0.5}}, 1}, 3, {}), gsw::Error);
  EXPECT_THROW(gsw::sample(DistributionSpec{gsw::Gaussian{{0.0}, -1.0}, 1}, 3, {}), gsw::Error);
  EXPECT_THROW(gsw::sample(cube(1), 0, {}), gsw::Error);
}

TEST(Augment, DegenerateNoise) {
  const auto m = gsw::sample(cube(3), 5, {1, 0});
  const auto a = gsw::augment(m, 1e-12, 1, {2, 0});
  EXPECT_LT((a.points() - m.points()).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Augment, SinglePointVariance) {
  gsw::PointMatrix p = gsw::PointMatrix::Zero(1, 2);
  const auto a = gsw::augment(EmpiricalMeasure::uniform(p), 1.0, 10000, {5, 0});
  ASSERT_EQ(a.size(), 10000u);
  for (int c = 0; c < 2; ++c) {
    const auto v = column(a, c);
    double mu = 0, ss = 0;
    for (double x : v) mu += x;
    mu /= v.size();
    for (double x : v) ss += (x - mu) * (x - mu);
    const double var = ss / (v.size() - 1);
    EXPECT_GE(var, 0.94);
    EXPECT_LE(var, 1.06);
  }
}

TEST(Augment, MassAndCount) {
  gsw::PointMatrix p(3, 1);
  p << 0, 1, 2;
  gsw::Vector w(3);
  w << 0.2, 0.3, 0.5;
  const EmpiricalMeasure m(p, w);
  for (std::size_t k : {1u, 7u, 16u}) {
    const auto a = gsw::augment(m, 0.5, k, {9, 0});
    EXPECT_EQ(a.size(), 3 * k);
    EXPECT_NEAR(a.weights().sum(), 1.0, 1e-12);
    EXPECT_NEAR(a.weights().head(static_cast<Eigen::Index>(k)).sum(), 0.2, 1e-12);
  }
  EXPECT_THROW(gsw::augment(m, 0.5, 0, {}), gsw::Error);
}

TEST(Augment, MeanConverges) {
  const auto m = gsw::sample(cube(2), 10, {4, 0});
  const double sigma = 0.7;
  const auto a = gsw::augment(m, sigma, 10000, {4, 1});
  const auto diff = gsw::mean(a) - gsw::mean(m);
  for (int c = 0; c < 2; ++c) EXPECT_LE(std::abs(diff(c)), 5 * sigma / std::sqrt(10.0 * 10000));
}

TEST(Center, Identities) {
  const auto m = gsw::sample(cube(2), 20, {8, 0});
  const std::vector<double> zero{0, 0};
  EXPECT_TRUE((gsw::center(m, zero).points().array() == m.points().array()).all());
  const auto mu = gsw::mean(m);
  const auto c = gsw::center(m, {mu.data(), 2});
  EXPECT_LT(gsw::mean(c).cwiseAbs().maxCoeff(), 1e-12);
  // Dyadic shifts keep the comparison exact.
  gsw::PointMatrix p(2, 2);
  p << 0.5, 1.25, -3.0, 2.0;
  const auto d = EmpiricalMeasure::uniform(p);
  const std::vector<double> a{0.25, -1.0}, b{1.5, 0.75}, ab{1.75, -0.25};
  EXPECT_TRUE((gsw::center(gsw::center(d, a), b).points().array() == gsw::center(d, ab).points().array()).all());
  EXPECT_THROW(gsw::center(d, std::vector<double>{1.0}), gsw::Error);
}

TEST(Moments, HandValues) {
  gsw::PointMatrix p(1, 2);
  p << 3, -1;
  const auto pm = EmpiricalMeasure::uniform(p);
  EXPECT_EQ(gsw::mean(pm)(0), 3.0);
  EXPECT_EQ(gsw::cov_trace(pm), 0.0);
  EXPECT_EQ(gsw::second_moment(pm), 10.0);
  gsw::PointMatrix q(2, 2);
  q << 1, 0, -1, 0;
  const auto pq = EmpiricalMeasure::uniform(q);
  EXPECT_EQ(gsw::mean(pq).norm(), 0.0);
  EXPECT_EQ(gsw::cov_trace(pq), 1.0);
}

TEST(Pool, WeightsAndDimensions) {
  gsw::PointMatrix a(1, 1), b(1, 1);
  a << 1;
  b << 2;
  const auto p = gsw::pool(EmpiricalMeasure::uniform(a), EmpiricalMeasure::uniform(b));
  EXPECT_EQ(p.size(), 2u);
  EXPECT_DOUBLE_EQ(p.weights()(0), 0.5);
  EXPECT_DOUBLE_EQ(p.weights()(1), 0.5);
  const auto p3 = gsw::pool(gsw::sample(cube(1), 3, {}), gsw::sample(cube(1), 1, {}));
  EXPECT_NEAR(p3.weights().head(3).sum(), 0.75, 1e-15);
  EXPECT_THROW(gsw::pool(gsw::sample(cube(1), 3, {}), gsw::sample(cube(2), 3, {})), gsw::Error);
}

TEST(SortedRows, Lexicographic) {
  gsw::PointMatrix p(3, 2);
  p << 1, 2, 0, 5, 1, 1;
  const auto s = gsw::sorted_rows(EmpiricalMeasure::uniform(p));
  EXPECT_EQ(s.points()(0, 1), 5.0);
  EXPECT_EQ(s.points()(1, 1), 1.0);
  EXPECT_EQ(s.points()(2, 1), 2.0);
}

TEST(Csv, RoundTrip) {
  gsw::PointMatrix p(3, 2);
  p << 0.1, 1.0 / 3, -2, 1e-17, 5, 6;
  gsw::Vector w(3);
  w << 0.25, 0.25, 0.5;
  const EmpiricalMeasure m(p, w);
  std::stringstream ss;
  gsw::write_csv(ss, m);
  const auto back = gsw::read_csv(ss);
  EXPECT_TRUE((back.points().array() == m.points().array()).all());
  EXPECT_TRUE((back.weights().array() == m.weights().array()).all());
}

TEST(Csv, MissingWeightsAndBadHeader) {
  std::stringstream ok("x1\n1\n2\n3\n4\n");
  const auto m = gsw::read_csv(ok);
  EXPECT_EQ(m.size(), 4u);
  EXPECT_TRUE(m.has_uniform_weights());
  std::stringstream bad("a,b\n1,2\n");
  EXPECT_THROW(gsw::read_csv(bad), gsw::Error);
}

TEST(Sample, ShiftedCube) {
  const auto j = nlohmann::json::parse(R"({"kind":"uniform_cube","dim":1,"half_width":0.5,"center":0.5})");
  const auto spec = j.get<DistributionSpec>();
  EXPECT_DOUBLE_EQ(spec.mean()(0), 0.5);
  EXPECT_NEAR(spec.central_second_moment(), 1.0 / 12.0, 1e-15);
  EXPECT_DOUBLE_EQ(spec.centered().mean()(0), 0.0);
  const auto m = gsw::sample(spec, 1000, {3, 0});
  EXPECT_TRUE((m.points().array() >= 0.0).all() && (m.points().array() <= 1.0).all());
  EXPECT_NEAR(gsw::quadrature_measure(spec).points().col(0).dot(gsw::quadrature_measure(spec).weights()), 0.5,
              1e-15);
  nlohmann::json out = spec;
  EXPECT_EQ(out["center"], nlohmann::json::array({0.5}));
  EXPECT_FALSE(nlohmann::json(cube(1)).contains("center"));
  DistributionSpec bad{gsw::UniformCube{1.0, {0.0, 0.0}}, 1};
  EXPECT_THROW(bad.validate(), gsw::Error);
}

TEST(SpecJson, RoundTripAndMoments) {
  const auto j = nlohmann::json::parse(
      R"({"kind":"gaussian_mixture","dim":1,"means":[-1,1],"scales":[1,1],"weights":[0.5,0.5]})");
  const auto spec = j.get<DistributionSpec>();
  EXPECT_NEAR(spec.central_second_moment(), 2.0, 1e-15);
  nlohmann::json out = spec;
  EXPECT_EQ(out.get<DistributionSpec>().central_second_moment(), spec.central_second_moment());
  EXPECT_NEAR(cube(3).central_second_moment(), 1.0, 1e-15);
  EXPECT_THROW(nlohmann::json::parse(R"({"kind":"cauchy","dim":1})").get<DistributionSpec>(), gsw::Error);
}

}  // namespace

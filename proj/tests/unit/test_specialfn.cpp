#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "gsw/error.hpp"
#include "gsw/specialfn.hpp"
#include "oracles.hpp"

namespace {

using gsw::KernelParams;

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

TEST(Ein, ZeroIsZero) { EXPECT_EQ(gsw::ein(0.0), 0.0); }

TEST(Ein, FrozenValues) {
  // Values produced by the 50-digit series oracle.
  EXPECT_NEAR(gsw::ein(1.0), 0.79659959929705313, 1e-15);
  EXPECT_NEAR(gsw::ein(-1.0), -1.3179021514544038, 1e-15);
  EXPECT_NEAR(oracle::ein(1.0), 0.79659959929705313, 1e-16);
  EXPECT_NEAR(oracle::ein(-1.0), -1.3179021514544038, 1e-16);
  EXPECT_LT(gsw::ein(-1.0), 0.0);
}

TEST(Ein, MatchesOracleOnGrid) {
  for (int i = -500; i <= 500; ++i) {
    const double z = 0.1 * i;
    if (z == 0.0) continue;
    EXPECT_LT(rel_err(gsw::ein(z), oracle::ein(z)), 1e-12) << "z=" << z;
  }
}

TEST(Ein, BranchesAgreeAtSeam) {
  for (double a = 25.0; a <= 35.0; a += 0.25) {
    for (double z : {a, -a}) {
      EXPECT_LT(rel_err(gsw::ein_series(z), gsw::ein_large(z)), 1e-9) << "z=" << z;
    }
  }
}

TEST(Ein, Errors) {
  EXPECT_THROW(gsw::ein(std::nan("")), gsw::Error);
  EXPECT_THROW(gsw::ein(INFINITY), gsw::Error);
  try {
    gsw::ein(-700.0);
    FAIL();
  } catch (const gsw::Error& e) {
    EXPECT_EQ(e.kind(), gsw::ErrorKind::overflow);
  }
  EXPECT_TRUE(std::isfinite(gsw::ein(-689.0)));
  EXPECT_TRUE(std::isfinite(gsw::ein(1e6)));
}

TEST(Kernel, ZeroVectorAndSymmetry) {
  const KernelParams p(0.7);
  const std::vector<double> x{0.3, -1.2, 2.0};
  const std::vector<double> y{1.1, 0.4, -0.5};
  const std::vector<double> zero(3, 0.0);
  EXPECT_EQ(gsw::kernel(x, zero, p), 0.0);
  EXPECT_EQ(gsw::kernel(x, y, p), gsw::kernel(y, x, p));
}

TEST(Kernel, UnitPoint) {
  const std::vector<double> one{1.0};
  const double k = gsw::kernel(one, one, KernelParams(1.0));
  EXPECT_NEAR(k, -oracle::ein(-1.0), 1e-15);
  EXPECT_GT(k, 0.0);
}

TEST(Kernel, DimensionMismatch) {
  const std::vector<double> a{1.0};
  const std::vector<double> b{1.0, 2.0};
  EXPECT_THROW(gsw::kernel(a, b, KernelParams(1.0)), gsw::Error);
}

TEST(Kernel, InvalidSigma) {
  EXPECT_THROW(KernelParams(0.0), gsw::Error);
  EXPECT_THROW(KernelParams(-1.0), gsw::Error);
}

TEST(Kernel, ScalingIdentity) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 50; ++t) {
    const double sigma = 0.3 + 0.1 * t;
    std::vector<double> x(2), y(2), xs(2), ys(2);
    for (int c = 0; c < 2; ++c) {
      x[c] = nd(gen);
      y[c] = nd(gen);
      xs[c] = x[c] / sigma;
      ys[c] = y[c] / sigma;
    }
    const double lhs = gsw::kernel(x, y, KernelParams(sigma));
    const double rhs = sigma * sigma * gsw::kernel(xs, ys, KernelParams(1.0));
    EXPECT_LT(std::abs(lhs - rhs), 1e-12 * std::max(1.0, std::abs(lhs)));
  }
}

TEST(Kernel, MonotoneAlongDiagonal) {
  double prev = -1.0;
  for (double t = 0.0; t <= 5.0; t += 0.05) {
    const std::vector<double> x{t};
    const double k = gsw::kernel(x, x, KernelParams(1.0));
    EXPECT_GT(k, prev);
    prev = k;
  }
}

TEST(Kernel, LargeSigmaExpansionOrder) {
  // Remainder after the quadratic term should shrink like sigma^-4.
  const double s = 1.3;
  std::vector<double> rem;
  for (double sigma : {10.0, 20.0, 40.0}) {
    const double k = gsw::kernel_from_inner(s, KernelParams(sigma));
    rem.push_back(std::abs(k - s - s * s / (4 * sigma * sigma)));
  }
  EXPECT_NEAR(std::log2(rem[0] / rem[1]), 4.0, 0.1);
  EXPECT_NEAR(std::log2(rem[1] / rem[2]), 4.0, 0.1);
}

TEST(Gram, OriginSinglePoint) {
  gsw::PointMatrix pts = gsw::PointMatrix::Zero(1, 3);
  const auto g = gsw::gram(pts, KernelParams(1.0));
  ASSERT_EQ(g.rows(), 1);
  EXPECT_EQ(g(0, 0), 0.0);
}

TEST(Gram, OriginAndUnitVector) {
  gsw::PointMatrix pts(2, 2);
  pts << 0, 0, 1, 0;
  const auto g = gsw::gram(pts, KernelParams(1.0));
  EXPECT_EQ(g(0, 0), 0.0);
  EXPECT_EQ(g(0, 1), 0.0);
  EXPECT_EQ(g(1, 0), 0.0);
  EXPECT_NEAR(g(1, 1), -oracle::ein(-1.0), 1e-15);
}

TEST(Gram, PositiveSemidefiniteAndThreadIndependent) {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> nd;
  for (int d : {1, 3, 5}) {
    gsw::PointMatrix pts(200, d);
    for (int i = 0; i < pts.rows(); ++i) {
      for (int c = 0; c < d; ++c) pts(i, c) = nd(gen);
    }
    for (double sigma : {0.5, 1.0, 2.0}) {
      const auto g1 = gsw::gram(pts, KernelParams(sigma), 1);
      const auto g4 = gsw::gram(pts, KernelParams(sigma), 4);
      EXPECT_TRUE((g1.array() == g4.array()).all());
      EXPECT_TRUE((g1.array() == g1.transpose().array()).all());
      Eigen::SelfAdjointEigenSolver<gsw::Matrix> es(g1, Eigen::EigenvaluesOnly);
      EXPECT_GE(es.eigenvalues().minCoeff(), -1e-8 * g1.trace()) << "d=" << d << " sigma=" << sigma;
    }
  }
}

TEST(Gram, CrossGramMatchesKernel) {
  gsw::PointMatrix a(3, 2), b(2, 2);
  a << 0.1, 0.2, -1, 0.5, 2, -0.3;
  b << 0.4, 0.4, -0.2, 1.5;
  const KernelParams p(0.8);
  const auto c = gsw::cross_gram(a, b, p);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 2; ++j) {
      const std::vector<double> x{a(i, 0), a(i, 1)};
      const std::vector<double> y{b(j, 0), b(j, 1)};
      EXPECT_EQ(c(i, j), gsw::kernel(x, y, p));
    }
  }
}

}  // namespace

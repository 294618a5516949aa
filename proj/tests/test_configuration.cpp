#include "oracles.hpp"

#include "snake/configuration.hpp"
#include "snake/kernels.hpp"
#include "snake/quadrature.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace snake;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Configuration polygon3() {
  std::vector<Vec> values;
  for (auto [a, b, c] : {std::tuple{1.0, 0.2, 0.1}, {0.1, 1.0, 0.3}, {-0.8, 0.5, -0.2},
                         {0.2, -0.7, 0.9}}) {
    Vec v(3);
    v << a, b, c;
    values.push_back(v.normalized());
  }
  return Configuration::piecewise_constant(Partition({0.0, 1.0, 1.5, 2.5, 4.0}), values);
}

}  // namespace

TEST(Quadrature, GaussLegendreIsExactToDegree15) {
  const GaussRule& r = gauss_legendre(kGaussOrder);
  for (int k = 0; k <= 15; ++k) {
    double sum = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) sum += r.weights[i] * std::pow(r.nodes[i], k);
    EXPECT_NEAR(sum, k % 2 ? 0.0 : 2.0 / (k + 1), 1e-14) << k;
  }
  const std::vector<double> nodes{0.0, 0.5, 1.0, 2.0};
  const auto w = lagrange_weights(nodes, 0.7);
  double p = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) p += w[i] * nodes[i] * nodes[i] * nodes[i];
  EXPECT_NEAR(p, 0.343, 1e-14);
}

TEST(Configuration, HalfCircleEndpointAndGram) {
  const Configuration z = half_circle_configuration();
  EXPECT_NEAR(z.length(), std::numbers::pi, 1e-15);
  const Vec f = endpoint(z);
  // integral of (sin s, cos s) over [0, pi]
  const Vec ref = oracle::simpson([](double s) { return v2(std::sin(s), std::cos(s)); }, 0.0,
                                  std::numbers::pi);
  EXPECT_LT((f - v2(2.0, 0.0)).norm(), 1e-10);
  EXPECT_LT((f - ref).norm(), 1e-10);
  const Mat m = gram_defect(z).matrix();
  EXPECT_LT((m - std::numbers::pi / 2.0 * Mat::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_NEAR(gram_defect(z).smallest_eigenvalue(), std::numbers::pi / 2.0, 1e-8);
}

TEST(Configuration, ConstantGramIsExact) {
  for (int d : {2, 3, 4}) {
    Vec e = Vec::Zero(d);
    e(0) = 1.0;
    const Configuration z = Configuration::piecewise_constant(Partition({0.0, 2.5}), {e});
    Mat ref = Mat::Identity(d, d) * 2.5;
    ref(0, 0) = 0.0;
    EXPECT_EQ(gram_defect(z).matrix(), ref);
    EXPECT_TRUE(is_lined(z, 1e-12));
    EXPECT_EQ(sedentariness(z), 2.5);
    EXPECT_EQ(spherical_dimension(z, 1e-9), 0);
  }
}

TEST(Configuration, SampledPieceMatchesSimpson) {
  const auto fn = [](double s) {
    Vec v(3);
    v << std::cos(s), std::sin(s) * std::cos(2 * s), std::sin(s) * std::sin(2 * s);
    return v;
  };
  const Configuration z = Configuration::Builder(3).sampled(2.0, fn).constant(1.0, fn(2.0)).build();
  const Vec ref = oracle::simpson(fn, 0.0, 2.0) + fn(2.0);
  EXPECT_LT((endpoint(z) - ref).norm(), 1e-10);
  const Vec g01 = oracle::simpson([&](double s) { Vec r(1); r << fn(s)(0) * fn(s)(1); return r; }, 0.0, 2.0);
  const Mat m = gram_defect(z).matrix();
  EXPECT_NEAR(-m(0, 1), g01(0) + fn(2.0)(0) * fn(2.0)(1), 1e-10);
  EXPECT_LT((z.value_at(0.7) - fn(0.7)).norm(), 1e-9);
  EXPECT_FALSE(z.is_piecewise_constant());
}

TEST(Configuration, Invariants) {
  const Configuration z = polygon3();
  EXPECT_TRUE(z.is_piecewise_constant());
  EXPECT_DOUBLE_EQ(sedentariness(z), 1.5);
  EXPECT_EQ(spherical_dimension(z, 1e-9), 2);
  EXPECT_EQ(distinct_value_count(z, 10), 4);
  EXPECT_EQ(distinct_value_count(z, 3), 3);
  EXPECT_FALSE(is_lined(z, 1e-8));

  // Repeated values merge for sedentariness.
  const Vec a = v2(1.0, 0.0), b = v2(0.0, 1.0);
  const Configuration rep =
      Configuration::piecewise_constant(Partition({0.0, 1.0, 2.0, 2.5}), {a, b, a});
  EXPECT_DOUBLE_EQ(sedentariness(rep), 1.5);
  EXPECT_EQ(distinct_value_count(rep, 3), 2);

  // Planar values in R^3 span a great circle.
  Vec p(3), q(3), r(3);
  p << 1, 0, 0;
  q << 0, 1, 0;
  r << -1, 1, 0;
  const Configuration planar =
      Configuration::piecewise_constant(Partition::uniform(3.0, 3), {p, q, r.normalized()});
  EXPECT_EQ(spherical_dimension(planar, 1e-9), 1);

  const Configuration lined =
      Configuration::piecewise_constant(Partition::uniform(3.0, 3), {p, Vec(-p), p});
  EXPECT_TRUE(is_lined(lined, 1e-12));
}

TEST(Configuration, ActionPreservesStructure) {
  std::mt19937 rng(31);
  const Configuration z = polygon3();
  for (int trial = 0; trial < 5; ++trial) {
    const MobiusElement g =
        psi(oracle::random_vec(rng, 3, 0.5), oracle::random_rotation(rng, 3));
    const Configuration gz = act(g, z);
    EXPECT_LT(sup_distance(act(g.inverse(), gz), z), 1e-12);
    EXPECT_EQ(distinct_value_count(gz, 10), 4);
    EXPECT_DOUBLE_EQ(gz.length(), z.length());
    EXPECT_EQ(spherical_dimension(gz, 1e-9), 2);
    for (Eigen::Index j = 0; j < z.nodes().cols(); ++j) {
      EXPECT_LT((gz.nodes().col(j) - oracle::act(g.matrix(), z.nodes().col(j))).norm(), 1e-12);
    }
  }
}

TEST(Configuration, PeriodicityAndPolyline) {
  const Vec a = v2(1.0, 0.0), b = v2(0.0, 1.0);
  const Configuration z =
      Configuration::piecewise_constant(Partition::uniform(4.0, 4), {a, b, a, b});
  EXPECT_EQ(periodicity_defect(z, 2.0), 0.0);
  EXPECT_GT(periodicity_defect(z, 1.0), 1.0);
  const SnakePolyline poly = integrate_snake(z, 9);
  ASSERT_EQ(poly.points.size(), 9u);
  EXPECT_LT((poly.points.back() - endpoint(z)).norm(), 1e-14);
  EXPECT_LT(poly.points.front().norm(), 1e-15);
}

TEST(Configuration, RejectsBadInput) {
  EXPECT_THROW(Partition({0.0, 1.0, 1.0}), PreconditionError);
  EXPECT_THROW(Partition({0.5, 1.0}), PreconditionError);
  EXPECT_THROW(Configuration::piecewise_constant(Partition::uniform(1.0, 2), {v2(1, 0)}),
               PreconditionError);
}

TEST(Kernels, SerialAndParallelAgree) {
  std::mt19937 rng(37);
  for (int n : {10, 5000, 20000}) {
    Mat pts(4, n);
    Vec w(n);
    for (int j = 0; j < n; ++j) {
      pts.col(j) = oracle::random_unit(rng, 4);
      w(j) = 1.0 + 0.001 * j;
    }
    const Mat g = psi(oracle::random_vec(rng, 4, 0.7), oracle::random_rotation(rng, 4)).matrix();
    const Mat a = kernels::serial::act(g, pts);
    const Mat b = kernels::parallel::act(g, pts);
    EXPECT_EQ(a, b);
    const kernels::Moments ms = kernels::serial::moments(pts, w);
    const kernels::Moments mp = kernels::parallel::moments(pts, w);
    // Chunked reduction order differs from the serial sum only by rounding.
    EXPECT_LT((ms.first - mp.first).norm(), 1e-13 * n);
    EXPECT_LT((ms.second - mp.second).norm(), 1e-13 * n);
    EXPECT_LT((ms.first - pts * w).norm(), 1e-12 * n);
    EXPECT_LT((ms.second - pts * w.asDiagonal() * pts.transpose()).norm(), 1e-12 * n);
    const kernels::Moments md = kernels::moments(pts, w);
    const kernels::Moments& expect =
        static_cast<std::size_t>(n) >= kernels::kParallelThreshold ? mp : ms;
    EXPECT_EQ(md.first, expect.first);
  }
}

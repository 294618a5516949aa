#include "oracles.hpp"

#include "snake/orbit.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace snake;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

Configuration centred(const std::vector<Vec>& values) {
  std::vector<Vec> unit;
  for (const Vec& v : values) unit.push_back(v.normalized());
  const Configuration z = Configuration::piecewise_constant(
      Partition::uniform(static_cast<double>(values.size()), static_cast<int>(values.size())), unit);
  return parallel_transport_to(z, Vec::Zero(z.dim()), {});
}

Configuration polygon3() {
  return centred({vec({1.0, 0.2, 0.1}), vec({0.1, 1.0, 0.3}), vec({-0.8, 0.5, -0.2}),
                  vec({0.2, -0.7, 0.9}), vec({-0.4, -0.6, -0.8})});
}

Configuration planar3() {
  std::vector<Vec> v;
  for (int i = 0; i < 6; ++i) v.push_back(vec({std::cos(i * std::numbers::pi / 3), std::sin(i * std::numbers::pi / 3), 0.0}));
  return centred(v);
}

Configuration planar2() {
  std::vector<Vec> v;
  for (int i = 0; i < 5; ++i) v.push_back(vec({std::cos(i * 1.3 + 0.2), std::sin(i * 1.3 + 0.2)}));
  return centred(v);
}

}  // namespace

TEST(Orbit, ExpectedDimension) {
  EXPECT_EQ(expected_orbit_dimension(2, 1), 1);
  EXPECT_EQ(expected_orbit_dimension(3, 1), 3);
  EXPECT_EQ(expected_orbit_dimension(3, 2), 3);
  EXPECT_EQ(expected_orbit_dimension(4, 3), 6);
  EXPECT_EQ(expected_orbit_dimension(5, 1), 7);
}

TEST(Orbit, RankFromGap) {
  EXPECT_EQ(rank_from_gap({1.0, 0.5, 1e-4, 1e-5}), 2);
  EXPECT_EQ(rank_from_gap({1.0, 0.5, 0.2}), 3);
  EXPECT_EQ(rank_from_gap({0.0, 0.0}), 0);
  EXPECT_EQ(rank_from_gap({1.0, 1e-3}, 1e4), 2);
}

TEST(Orbit, TangentRanks) {
  const struct {
    Configuration z;
    int d, k;
  } cases[] = {{planar2(), 2, 1}, {planar3(), 3, 1}, {polygon3(), 3, 2}};
  for (const auto& c : cases) {
    ASSERT_EQ(spherical_dimension(c.z, 1e-9), c.k);
    const RankEstimate r = orbit_tangent_rank(c.z, 1e-2 * c.z.length(), 12, 1);
    EXPECT_EQ(r.rank, expected_orbit_dimension(c.d, c.k)) << c.d << "," << c.k;
  }
}

TEST(Orbit, SerialAndParallelAgree) {
  const Configuration z = polygon3();
  const auto loops = small_loops(z, 0.05, 6, 3);
  const OrbitReport a = orbit_sample(z, loops);
  const OrbitReport b = serial::orbit_sample(z, loops);
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) EXPECT_EQ(sup_distance(a.points[i], b.points[i]), 0.0);
  const RankEstimate ra = orbit_tangent_rank(z, 0.05, 6, 3);
  const RankEstimate rb = serial::orbit_tangent_rank(z, 0.05, 6, 3);
  EXPECT_EQ(ra.singular_values, rb.singular_values);
}

TEST(Orbit, SmallLoopsAreClosedCircles) {
  const Configuration z = polygon3();
  for (const Curve& c : small_loops(z, 0.1, 5, 9)) {
    EXPECT_LT((c.position(0.0) - endpoint(z)).norm(), 1e-14);
    EXPECT_LT((c.position(1.0) - endpoint(z)).norm(), 1e-14);
    EXPECT_NEAR((c.position(0.5) - endpoint(z)).norm(), 0.2, 1e-12);
  }
}

TEST(Orbit, StiefelFitsAtTheOrigin) {
  for (const Configuration& z : {polygon3(), planar3()}) {
    const OrbitReport rep = orbit_sample(z, small_loops(z, 0.05 * z.length(), 8, 5));
    EXPECT_TRUE(rep.failures.empty());
    EXPECT_LT(rep.max_fiber_error, 1e-9);
    EXPECT_EQ(rep.classification, OrbitClass::stiefel);
    const Mat ref = reference_frame(z);
    EXPECT_EQ(ref.cols(), spherical_dimension(z, 1e-9) + 1);
    for (const Configuration& p : rep.points) {
      const StiefelFit fit = stiefel_frame(p, z);
      EXPECT_LT(fit.residual, 1e-6);
      EXPECT_LT((fit.frame.transpose() * fit.frame - Mat::Identity(ref.cols(), ref.cols())).norm(), 1e-12);
      EXPECT_NEAR(fit.rotation.determinant(), 1.0, 1e-12);
    }
  }
  // Rotating by hand is recovered exactly.
  std::mt19937 rng(59);
  const Mat r = oracle::random_rotation(rng, 3);
  const Configuration z = polygon3();
  const StiefelFit fit = stiefel_frame(act(rotation(r), z), z);
  EXPECT_LT((fit.rotation - r).norm(), 1e-12);
  EXPECT_THROW(stiefel_frame(parallel_transport_to(z, vec({0.1, 0, 0}), {}), z), PreconditionError);
}

TEST(Orbit, PlanarTwoIsCircles) {
  const Configuration z = planar2();
  const OrbitReport rep = orbit_sample(z, small_loops(z, 0.02 * z.length(), 4, 1));
  EXPECT_EQ(rep.classification, OrbitClass::circles);
  EXPECT_EQ(rep.expected_dim, 1);
  const Configuration two =
      Configuration::piecewise_constant(Partition({0.0, 1.0, 2.0}), {vec({1, 0}), vec({0, 1})});
  EXPECT_THROW(orbit_tangent_rank(two, 0.01, 4), PreconditionError);
}

TEST(Orbit, ConnectivityWitness) {
  const Configuration z0 = half_circle_configuration();
  const Word word = close_word({{vec({0.3, 0.0}), 1.0}, {vec({0.0, 0.4}), 1.0}}, z0);
  const Configuration z = act(group_from_word(word, 2), z0);
  ASSERT_GT(sup_distance(z, z0), 1e-3);
  const WitnessPath path = connectivity_probe(z0, z, word);
  EXPECT_TRUE(path.complete) << path.failure;
  EXPECT_LE(path.max_gap, 0.2);
  EXPECT_LT(path.endpoint_error, 1e-6);
  EXPECT_EQ(path.s.front(), 0.0);
  EXPECT_EQ(path.s.back(), 1.0);
  for (std::size_t i = 0; i + 1 < path.s.size(); ++i) EXPECT_LT(path.s[i], path.s[i + 1]);
  EXPECT_THROW(connectivity_probe(polygon3(), polygon3(), {}), PreconditionError);
}

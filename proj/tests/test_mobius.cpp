#include "oracles.hpp"

#include "snake/mobius.hpp"
#include "snake/su11.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace snake;

namespace {

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Mobius, BoostMatchesSeriesExponential) {
  std::mt19937 rng(3);
  for (int d : {2, 3, 5}) {
    for (int trial = 0; trial < 10; ++trial) {
      const Vec v = oracle::random_vec(rng, d, 1.5);
      const double t = 0.3 + 0.1 * trial;
      const Mat ref = oracle::expm(t * oracle::boost_generator(v));
      EXPECT_LT(max_abs(boost(v, t).matrix() - ref), 1e-11 * ref.norm());
      EXPECT_LT(max_abs(chi(v).ambient() - oracle::boost_generator(v)), 1e-15);
    }
  }
}

TEST(Mobius, BoostOnCircleIsDiscTranslation) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec v = oracle::random_vec(rng, 2, 2.0);
    const Vec x = oracle::random_unit(rng, 2);
    const Vec y = apply(boost(v, 1.0), SpherePoint(x)).coords();
    const auto ref = oracle::disc_translation({x(0), x(1)}, v.norm(), std::atan2(v(1), v(0)));
    EXPECT_NEAR(y(0), ref.real(), 1e-12);
    EXPECT_NEAR(y(1), ref.imag(), 1e-12);
  }
}

TEST(Mobius, BoostAttractsAlongItsAxis) {
  Vec v(3);
  v << 0.0, 2.0, 0.0;
  std::mt19937 rng(1);
  const Vec x = oracle::random_unit(rng, 3);
  const Vec y = apply(boost(v, 20.0), SpherePoint(x)).coords();
  EXPECT_NEAR(y(1), 1.0, 1e-12);
  const Vec fixed = apply(boost(v, 3.0), SpherePoint(-v.normalized())).coords();
  EXPECT_NEAR((fixed + v.normalized()).norm(), 0.0, 1e-12);
}

TEST(Mobius, ActionIsAHomomorphism) {
  std::mt19937 rng(7);
  for (int d : {2, 3, 4}) {
    for (int trial = 0; trial < 10; ++trial) {
      const MobiusElement g = psi(oracle::random_vec(rng, d, 1.0), oracle::random_rotation(rng, d));
      const MobiusElement h = psi(oracle::random_vec(rng, d, 1.0), oracle::random_rotation(rng, d));
      const SpherePoint x(oracle::random_unit(rng, d));
      const Vec a = apply(g * h, x).coords();
      const Vec b = apply(g, apply(h, x)).coords();
      EXPECT_LT((a - b).norm(), 1e-12);
      EXPECT_LT((a - oracle::act((g * h).matrix(), x.coords())).norm(), 1e-12);
      EXPECT_NEAR(a.norm(), 1.0, 1e-14);
      EXPECT_LT((g * g.inverse()).residual(), 1e-12);
      EXPECT_LT(max_abs((g * g.inverse()).matrix() - Mat::Identity(d + 1, d + 1)), 1e-11);
    }
  }
}

TEST(Mobius, ChartRoundTrip) {
  std::mt19937 rng(11);
  for (int d : {2, 3, 4}) {
    for (int trial = 0; trial < 10; ++trial) {
      const Vec v = oracle::random_vec(rng, d, 2.0);
      const Mat r = oracle::random_rotation(rng, d);
      const ChartCoordinates c = chart_coordinates(psi(v, r));
      EXPECT_LT((c.v - v).norm(), 1e-11);
      EXPECT_LT(max_abs(c.rotation - r), 1e-11);
    }
  }
}

TEST(Mobius, GeneralExponentialAgreesWithSeries) {
  std::mt19937 rng(13);
  for (int d : {2, 3}) {
    const Mat skew = [&] {
      Mat a = Mat::Random(d, d);
      return Mat(a - a.transpose());
    }();
    const LieVector x = LieVector::from_parts(oracle::random_vec(rng, d, 1.0), skew);
    EXPECT_LT(max_abs(exp(x).matrix() - oracle::expm(x.ambient())), 1e-11);
  }
}

TEST(Mobius, StereographicRoundTrip) {
  std::mt19937 rng(17);
  for (int d : {2, 3, 4}) {
    const Vec pole = oracle::random_unit(rng, d);
    for (int trial = 0; trial < 10; ++trial) {
      const SpherePoint x(oracle::random_unit(rng, d));
      const StereoPoint y = stereo_project(pole, x);
      ASSERT_FALSE(y.at_infinity);
      EXPECT_LT(std::abs(y.coords.dot(pole)), 1e-13 * (1.0 + y.coords.norm()));
      EXPECT_LT((stereo_unproject(pole, y).coords() - x.coords()).norm(), 1e-12);
    }
    EXPECT_TRUE(stereo_project(pole, SpherePoint(pole)).at_infinity);
    EXPECT_LT(stereo_project(pole, SpherePoint(-pole)).coords.norm(), 1e-12);
  }
}

TEST(Mobius, RenormalizeRestoresTheGroup) {
  std::mt19937 rng(19);
  const MobiusElement g = psi(oracle::random_vec(rng, 3, 1.0), oracle::random_rotation(rng, 3));
  Mat noisy = g.matrix();
  noisy(0, 1) += 1e-6;
  noisy(2, 3) -= 2e-6;
  const MobiusElement fixed = renormalize(MobiusElement::from_matrix(noisy));
  EXPECT_LT(fixed.residual(), 1e-12);
  EXPECT_LT(max_abs(fixed.matrix() - g.matrix()), 1e-5);
}

TEST(Mobius, RejectsNonGroupMatrices) {
  Mat m = Mat::Identity(3, 3);
  m(0, 0) = 2.0;
  EXPECT_THROW(MobiusElement::from_matrix(m), PreconditionError);
  Mat flip = Mat::Identity(3, 3);
  flip(2, 2) = -1.0;
  EXPECT_THROW(MobiusElement::from_matrix(flip), PreconditionError);
  Mat refl = Mat::Identity(2, 2);
  refl(0, 0) = -1.0;
  EXPECT_THROW(rotation(refl), PreconditionError);
}

TEST(SU11, BoostCoversLorentzBoost) {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec v = oracle::random_vec(rng, 2, 2.0);
    const double t = 0.7;
    const SU11Element s = su11_boost({v(0), v(1)}, t);
    EXPECT_LT(s.determinant_defect(), 1e-13);
    EXPECT_LT(max_abs(su11_to_mobius(s).matrix() - boost(v, t).matrix()), 1e-11);
    EXPECT_LT(max_abs(su11_to_mobius(-s).matrix() - boost(v, t).matrix()), 1e-11);
    const Vec x = oracle::random_unit(rng, 2);
    const Complex y = s.act({x(0), x(1)});
    const auto ref = oracle::disc_translation({x(0), x(1)}, t * v.norm(), std::atan2(v(1), v(0)));
    EXPECT_LT(std::abs(y - ref), 1e-12);
  }
}

TEST(SU11, RotationAndChart) {
  const SU11Element r = su11_rotation(1.0);
  EXPECT_LT(std::abs(r.act(Complex(1.0, 0.0)) - std::polar(1.0, 1.0)), 1e-15);
  std::mt19937 rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec v = oracle::random_vec(rng, 2, 1.5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    const double theta = u(rng);
    const CoverChart c = su11_cover_chart(su11_boost({v(0), v(1)}, 1.0) * su11_rotation(theta));
    EXPECT_NEAR(c.theta, theta, 1e-12);
    EXPECT_LT((c.v - v).norm(), 1e-11);
  }
  // The cover distinguishes g from -g: theta moves by 2 pi.
  const CoverChart a = su11_cover_chart(su11_rotation(0.5));
  const CoverChart b = su11_cover_chart(-su11_rotation(0.5));
  EXPECT_NEAR(std::abs(a.theta - b.theta), 2.0 * std::numbers::pi, 1e-12);
}

TEST(SU11, RejectsDeterminantDrift) {
  EXPECT_THROW(SU11Element(Complex(1.1, 0.0), Complex(0.0, 0.0)), PreconditionError);
  const SU11Element g = su11_boost({0.3, -0.2}, 1.0) * su11_rotation(0.4);
  EXPECT_LT((g * g.inverse()).determinant_defect(), 1e-14);
  EXPECT_LT(std::abs((g * g.inverse()).b()), 1e-14);
}

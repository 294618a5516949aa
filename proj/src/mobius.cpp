#include "snake/mobius.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace snake {

MobiusElement unchecked_element(Mat m) { return MobiusElement(std::move(m)); }

namespace {

constexpr double kPoleTolerance = 1e-15;

bool is_rotation(const Mat& r, double tol) {
  if (r.rows() != r.cols()) return false;
  const Mat defect = r.transpose() * r - Mat::Identity(r.rows(), r.cols());
  return defect.norm() <= tol && r.determinant() > 0.0;
}

}  // namespace

SpherePoint::SpherePoint(const Vec& v) : coords_(v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw PreconditionError("zero_vector", "sphere point needs a nonzero finite vector");
  }
  coords_ /= n;
}

Mat minkowski(int d) {
  Mat j = Mat::Identity(d + 1, d + 1);
  j(d, d) = -1.0;
  return j;
}

MobiusElement MobiusElement::identity(int d) { return MobiusElement(Mat::Identity(d + 1, d + 1)); }

MobiusElement MobiusElement::from_matrix(const Mat& m) {
  if (m.rows() != m.cols() || m.rows() < 2) {
    throw PreconditionError("shape", "Lorentz matrix must be square of size d+1 >= 2");
  }
  MobiusElement g(m);
  if (!(g.residual() < settings().renormalize_limit)) {
    throw PreconditionError("not_lorentz", "matrix is not close to O(d,1)");
  }
  const int d = g.dim();
  if (!(m(d, d) > 0.0) || !(m.determinant() > 0.0)) {
    throw PreconditionError("wrong_component",
                            "matrix is outside the identity component of O(d,1)");
  }
  return g;
}

MobiusElement MobiusElement::operator*(const MobiusElement& other) const {
  return MobiusElement(m_ * other.m_);
}

MobiusElement MobiusElement::inverse() const {
  const Mat j = minkowski(dim());
  return MobiusElement(j * m_.transpose() * j);
}

double MobiusElement::residual() const {
  const Mat j = minkowski(dim());
  return (m_.transpose() * j * m_ - j).norm();
}

LieVector LieVector::zero(int d) { return LieVector(Mat::Zero(d + 1, d + 1)); }

LieVector LieVector::from_parts(const Vec& boost, const Mat& rotation) {
  const int d = static_cast<int>(boost.size());
  if (rotation.rows() != d || rotation.cols() != d) {
    throw PreconditionError("shape", "rotation part must be d x d");
  }
  if ((rotation + rotation.transpose()).norm() > 1e-12 * (1.0 + rotation.norm())) {
    throw PreconditionError("not_skew", "rotation part must be skew-symmetric");
  }
  Mat a = Mat::Zero(d + 1, d + 1);
  a.topLeftCorner(d, d) = rotation;
  a.topRightCorner(d, 1) = boost;
  a.bottomLeftCorner(1, d) = boost.transpose();
  return LieVector(a);
}

LieVector LieVector::from_ambient(const Mat& ambient) {
  const int d = static_cast<int>(ambient.rows()) - 1;
  return from_parts(ambient.topRightCorner(d, 1), ambient.topLeftCorner(d, d));
}

Vec LieVector::boost_part() const { return a_.topRightCorner(dim(), 1); }

Mat LieVector::rotation_part() const { return a_.topLeftCorner(dim(), dim()); }

MobiusElement boost(const Vec& v, double t) {
  const int d = static_cast<int>(v.size());
  Mat m = Mat::Identity(d + 1, d + 1);
  const double norm = v.norm();
  if (norm == 0.0 || t == 0.0) return unchecked_element(std::move(m));
  const double r = t * norm;
  const Vec n = v / norm;
  const double ch = std::cosh(r);
  const double sh = std::sinh(r);
  // I + sinh(r) K + (cosh(r) - 1) K^2 with K = chi(n), K^2 = diag(n n^T, 1).
  m.topLeftCorner(d, d) += (ch - 1.0) * n * n.transpose();
  m.topRightCorner(d, 1) = sh * n;
  m.bottomLeftCorner(1, d) = sh * n.transpose();
  m(d, d) = ch;
  return unchecked_element(std::move(m));
}

LieVector chi(const Vec& v) {
  const int d = static_cast<int>(v.size());
  return LieVector::from_parts(v, Mat::Zero(d, d));
}

MobiusElement exp(const LieVector& x) {
  Mat e = x.ambient().exp();
  return unchecked_element(std::move(e));
}

StereoPoint stereo_project(const Vec& v, const SpherePoint& x) {
  const double norm = v.norm();
  if (!(norm > 0.0)) {
    throw PreconditionError("zero_vector", "stereographic pole needs v != 0");
  }
  const Vec n = v / norm;
  const double c = x.coords().dot(n);
  if (1.0 - c <= kPoleTolerance) return StereoPoint{true, Vec::Zero(v.size())};
  return StereoPoint{false, (x.coords() - c * n) / (1.0 - c)};
}

SpherePoint stereo_unproject(const Vec& v, const StereoPoint& y) {
  const double norm = v.norm();
  if (!(norm > 0.0)) {
    throw PreconditionError("zero_vector", "stereographic pole needs v != 0");
  }
  const Vec n = v / norm;
  if (y.at_infinity) return SpherePoint(n);
  const Vec w = y.coords - y.coords.dot(n) * n;
  const double rho2 = w.squaredNorm();
  return SpherePoint((2.0 * w + (rho2 - 1.0) * n) / (rho2 + 1.0));
}

SpherePoint apply(const MobiusElement& g, const SpherePoint& x) {
  const int d = x.dim();
  if (g.dim() != d) throw PreconditionError("dimension", "group and point dimensions differ");
  const Mat& m = g.matrix();
  const Vec y = m.leftCols(d) * x.coords() + m.col(d);
  return SpherePoint(y.head(d) / y(d));
}

MobiusElement rotation(const Mat& r) {
  if (!is_rotation(r, 1e-9)) {
    throw PreconditionError("not_rotation", "matrix is not in SO(d)");
  }
  const int d = static_cast<int>(r.rows());
  Mat m = Mat::Identity(d + 1, d + 1);
  m.topLeftCorner(d, d) = r;
  return unchecked_element(std::move(m));
}

MobiusElement psi(const Vec& v, const Mat& r) { return boost(v, 1.0) * rotation(r); }

ChartCoordinates chart_coordinates(const MobiusElement& g) {
  const int d = g.dim();
  const Vec s = g.matrix().col(d).head(d);
  const double sn = s.norm();
  Vec v = Vec::Zero(d);
  if (sn > 0.0) v = std::asinh(sn) * s / sn;
  const Mat r = (boost(v, 1.0).inverse() * g).matrix().topLeftCorner(d, d);
  return ChartCoordinates{v, r};
}

MobiusElement renormalize(const MobiusElement& g) {
  const double start = g.residual();
  if (!(start < settings().renormalize_limit)) {
    throw NumericalError("blow_up", "group element drifted too far from O(d,1) to renormalize");
  }
  const Mat j = minkowski(g.dim());
  Mat x = g.matrix();
  for (int it = 0; it < 8; ++it) {
    const Mat next = 0.5 * (x + j * x.transpose().inverse() * j);
    const double change = (next - x).norm();
    x = next;
    if (change <= 1e-16 * x.norm()) break;
  }
  return unchecked_element(std::move(x));
}

}  // namespace snake

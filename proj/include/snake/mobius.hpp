#pragma once

// Möbius group of the sphere S^{d-1}, realized as the identity component of
// the Lorentz group O(d,1) acting projectively on the light cone: a unit
// vector x is the ray through (x, 1), and g maps it to the ray through
// g (x, 1).

#include "snake/numerics.hpp"

#include <optional>

namespace snake {

/// Unit vector of R^d. Renormalized on construction.
class SpherePoint {
 public:
  explicit SpherePoint(const Vec& v);

  const Vec& coords() const { return coords_; }
  int dim() const { return static_cast<int>(coords_.size()); }

 private:
  Vec coords_;
};

/// Minkowski form diag(1, ..., 1, -1) of size d+1.
Mat minkowski(int d);

class MobiusElement {
 public:
  static MobiusElement identity(int d);
  /// Wraps a (d+1)x(d+1) matrix. Rejects matrices farther than
  /// settings().renormalize_limit from O(d,1), or outside the identity
  /// component.
  static MobiusElement from_matrix(const Mat& m);

  const Mat& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()) - 1; }

  MobiusElement operator*(const MobiusElement& other) const;
  /// J g^T J, exact for Lorentz matrices.
  MobiusElement inverse() const;
  /// Frobenius norm of g^T J g - J.
  double residual() const;

 private:
  explicit MobiusElement(Mat m) : m_(std::move(m)) {}
  friend MobiusElement unchecked_element(Mat m);

  Mat m_;
};

/// Element of so(d,1): a boost part (vector of R^d) plus a rotation part
/// (skew-symmetric d x d), stored as the ambient (d+1)x(d+1) matrix.
class LieVector {
 public:
  static LieVector zero(int d);
  static LieVector from_parts(const Vec& boost, const Mat& rotation);
  static LieVector from_ambient(const Mat& ambient);

  const Mat& ambient() const { return a_; }
  int dim() const { return static_cast<int>(a_.rows()) - 1; }
  Vec boost_part() const;
  Mat rotation_part() const;

  LieVector operator+(const LieVector& o) const { return LieVector(a_ + o.a_); }
  LieVector operator-(const LieVector& o) const { return LieVector(a_ - o.a_); }
  LieVector operator*(double s) const { return LieVector(a_ * s); }
  LieVector bracket(const LieVector& o) const {
    return LieVector(a_ * o.a_ - o.a_ * a_);
  }

 private:
  explicit LieVector(Mat a) : a_(std::move(a)) {}
  Mat a_;
};

/// The hyperbolic flow with attractor v/|v| and repeller -v/|v|, at time t.
/// Closed form: identity plus a rank-2 update with cosh/sinh of t|v|.
MobiusElement boost(const Vec& v, double t);

/// Linear map R^d -> so(d,1) with exp(t chi(v)) = boost(v, t).
LieVector chi(const Vec& v);

/// General group exponential (Padé scaling-and-squaring).
MobiusElement exp(const LieVector& x);

/// Point of R^d on the hyperplane orthogonal to the pole, or infinity.
struct StereoPoint {
  bool at_infinity = false;
  Vec coords;
};

/// Stereographic projection sending v/|v| to infinity and -v/|v| to 0.
/// The image lies in the hyperplane v^⊥ of R^d.
StereoPoint stereo_project(const Vec& v, const SpherePoint& x);
SpherePoint stereo_unproject(const Vec& v, const StereoPoint& y);

SpherePoint apply(const MobiusElement& g, const SpherePoint& x);

/// Embeds R in SO(d) as block-diag(R, 1). Rejects non-rotations.
MobiusElement rotation(const Mat& r);

/// boost(v, 1) * rotation(r): the chart R^d x SO(d) -> Möb(d-1).
MobiusElement psi(const Vec& v, const Mat& r);

struct ChartCoordinates {
  Vec v;
  Mat rotation;
};

/// Inverse of psi. Closed form: the last column of g is (sinh|v| v/|v|, cosh|v|).
ChartCoordinates chart_coordinates(const MobiusElement& g);

/// Projects a nearly-Lorentz matrix back onto the group with the Newton
/// iteration X <- (X + J X^{-T} J) / 2 for the J-orthogonal polar factor.
/// Throws NumericalError("blow_up") when the input residual is >= 0.1.
MobiusElement renormalize(const MobiusElement& g);

}  // namespace snake

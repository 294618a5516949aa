#include "snake/su11.hpp"

#include <cmath>

namespace snake {

SU11Element::SU11Element(Complex a, Complex b) : a_(a), b_(b) {
  if (!(determinant_defect() <= settings().su11_determinant)) {
    throw PreconditionError("su11_determinant", "SU(1,1) element needs |a|^2 - |b|^2 = 1");
  }
}

SU11Element SU11Element::operator*(const SU11Element& o) const {
  // [[a, b], [b~, a~]] [[c, e], [e~, c~]]
  const Complex a = a_ * o.a_ + b_ * std::conj(o.b_);
  const Complex b = a_ * o.b_ + b_ * std::conj(o.a_);
  return SU11Element(a, b, Unchecked{});
}

SU11Element SU11Element::operator-() const { return SU11Element(-a_, -b_, Unchecked{}); }

SU11Element SU11Element::inverse() const { return SU11Element(std::conj(a_), -b_, Unchecked{}); }

double SU11Element::determinant_defect() const {
  return std::abs(std::norm(a_) - std::norm(b_) - 1.0);
}

SU11Element SU11Element::normalized() const {
  const double det = std::norm(a_) - std::norm(b_);
  const double s = 1.0 / std::sqrt(det);
  return SU11Element(a_ * s, b_ * s, Unchecked{});
}

Complex SU11Element::act(Complex z) const {
  const Complex w = (a_ * z + b_) / (std::conj(b_) * z + std::conj(a_));
  return w / std::abs(w);
}

SU11Element su11_boost(Complex w, double t) {
  const double r = 0.5 * t * std::abs(w);
  if (r == 0.0) return SU11Element::identity();
  const Complex dir = w / std::abs(w) * (t < 0.0 ? -1.0 : 1.0);
  return SU11Element(Complex(std::cosh(std::abs(r)), 0.0), std::sinh(std::abs(r)) * dir,
                     SU11Element::Unchecked{});
}

SU11Element su11_rotation(double theta) {
  return SU11Element(std::polar(1.0, 0.5 * theta), Complex(0.0, 0.0));
}

CoverChart su11_cover_chart(const SU11Element& g) {
  if (!(g.determinant_defect() <= settings().su11_determinant)) {
    throw PreconditionError("su11_determinant", "SU(1,1) element needs |a|^2 - |b|^2 = 1");
  }
  const double theta = 2.0 * std::arg(g.a());
  Vec v = Vec::Zero(2);
  const double bn = std::abs(g.b());
  if (bn > 0.0) {
    // arccosh|a| == asinh|b| on SU(1,1); the latter is well conditioned near 0.
    const double radius = 2.0 * std::asinh(bn);
    const double phase = std::arg(g.a() * g.b());
    v << radius * std::cos(phase), radius * std::sin(phase);
  }
  return CoverChart{v, theta};
}

MobiusElement su11_to_mobius(const SU11Element& g) {
  const CoverChart c = su11_cover_chart(g);
  Mat r(2, 2);
  r << std::cos(c.theta), -std::sin(c.theta), std::sin(c.theta), std::cos(c.theta);
  return psi(c.v, r);
}

}  // namespace snake

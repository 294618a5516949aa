#pragma once

// SU(1,1), the two-fold cover of Möb(1) acting on the unit circle by
// homographies z -> (a z + b) / (conj(b) z + conj(a)).

#include "snake/mobius.hpp"

#include <complex>

namespace snake {

using Complex = std::complex<double>;

class SU11Element {
 public:
  /// Rejects |a|^2 - |b|^2 != 1 beyond settings().su11_determinant.
  SU11Element(Complex a, Complex b);
  static SU11Element identity() { return SU11Element(Complex(1.0, 0.0), Complex(0.0, 0.0)); }

  Complex a() const { return a_; }
  Complex b() const { return b_; }

  SU11Element operator*(const SU11Element& o) const;
  SU11Element operator-() const;
  SU11Element inverse() const;
  double determinant_defect() const;
  /// Rescales (a, b) so |a|^2 - |b|^2 = 1 exactly (up to rounding).
  SU11Element normalized() const;

  /// Homographic action on a point of the unit circle.
  Complex act(Complex z) const;

 private:
  struct Unchecked {};
  SU11Element(Complex a, Complex b, Unchecked) : a_(a), b_(b) {}
  friend SU11Element su11_boost(Complex w, double t);

  Complex a_;
  Complex b_;
};

/// exp(t [[0, w/2], [conj(w)/2, 0]]): the lift of boost((Re w, Im w), t).
SU11Element su11_boost(Complex w, double t);

/// Rotation z -> e^{i theta} z, lifted as diag(e^{i theta/2}, e^{-i theta/2}).
SU11Element su11_rotation(double theta);

struct CoverChart {
  Vec v;         // R^2
  double theta;  // 2 arg(a)
};

/// (v, theta) with theta = 2 arg(a) and v = 2 arccosh|a| e^{i arg(ab)}.
CoverChart su11_cover_chart(const SU11Element& g);

/// Image in the Lorentz model Möb(1) ⊂ O(2,1); g and -g give the same element.
MobiusElement su11_to_mobius(const SU11Element& g);

}  // namespace snake

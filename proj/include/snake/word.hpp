#pragma once

// Smooth loops generated by words in the boosts: with C^∞ steps phi_i that
// switch on one after the other,
//
//   g(t) = boost(v_r, phi_r(t) lambda_r) ... boost(v_1, phi_1(t) lambda_1),
//
// and gamma(t) = f(g(t) z0). The path t -> g(t) z0 is horizontal, so it is
// the lift of gamma.

#include "snake/curve.hpp"
#include "snake/lift.hpp"

#include <vector>

namespace snake {

struct WordLetter {
  Vec v;
  double lambda = 1.0;
};

using Word = std::vector<WordLetter>;

/// C^∞ step: 0 for x <= 0, 1 for x >= 1, flat to all orders at both ends.
double smoothstep(double x);
double smoothstep_derivative(double x);
double smoothstep_second_derivative(double x);

/// g(t) for t in [0, 1]; g(1) is the full product.
MobiusElement group_from_word(const Word& word, int dim, double t = 1.0);

struct WordLoop {
  Curve curve;            // gamma(t) = f(g(t) z0), C^∞, domain [0, 1]
  LiftResult trajectory;  // z_t = g(t) z0 sampled on the step grid
  bool closed = false;    // f(g(1) z0) = f(z0) within the defect tolerance
};

/// `samples` + 1 equally spaced times in the trajectory.
WordLoop smooth_loop_from_word(const Word& word, const Configuration& z0, int samples = 200,
                               double closed_tolerance = 1e-9);

/// Appends one letter (u, 1) so that f(boost(u, 1) g(1) z0) = f(z0).
/// Newton with a finite-difference Jacobian. Throws NumericalError
/// ("no_closure") when it does not converge.
Word close_word(const Word& word, const Configuration& z0, double tolerance = 1e-12);

}  // namespace snake

#pragma once

// Target curves for the snout: t in [0, T] -> R^d with analytic first
// derivative, and second derivative where the representation has one.

#include "snake/numerics.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace snake {

enum class Smoothness { c0, c1, c2, c_infinity };

/// Which one-sided value to take at a junction between pieces.
enum class Side { left, right };

class Curve {
 public:
  struct Impl;

  int dim() const;
  double t_end() const;  // the domain is [0, t_end]
  Smoothness smoothness() const;

  Vec position(double t) const;
  Vec velocity(double t, Side side = Side::right) const;
  /// Empty when the representation carries no second derivative.
  std::optional<Vec> acceleration(double t, Side side = Side::right) const;
  /// Interior parameters where the curve switches pieces, sorted.
  std::vector<double> breakpoints() const;

  /// t -> position(phi(t)) with phi an increasing map of [0, t_end'] onto
  /// [0, t_end]; dphi and ddphi are its derivatives.
  Curve reparameterized(std::function<double(double)> phi, std::function<double(double)> dphi,
                        std::function<double(double)> ddphi, double new_t_end = 1.0) const;

  static Curve constant(const Vec& point, double t_end = 1.0);
  static Curve segment(const Vec& from, const Vec& to);
  /// center + radius (cos a, sin a) in the plane spanned by orthonormal
  /// (e1, e2), with a = start_angle + 2 pi turns t for t in [0, 1].
  static Curve circle(const Vec& center, double radius, double start_angle, double turns,
                      const Vec& e1, const Vec& e2);
  /// Concatenation; part i occupies a time span of durations[i].
  static Curve composite(std::vector<Curve> parts, std::vector<double> durations);
  /// C¹ cubic Hermite through `points` at integer knots 0, 1, ..., with the
  /// given tangents (derivatives with respect to t).
  static Curve hermite(std::vector<Vec> points, std::vector<Vec> tangents);
  static Curve from_functions(int dim, double t_end, Smoothness smoothness,
                              std::function<Vec(double)> position,
                              std::function<Vec(double)> velocity,
                              std::function<Vec(double)> acceleration = {});

  /// Max |velocity - central difference of position| / (1 + |velocity|)
  /// over a probe grid; should be O(1e-6) for consistent curves.
  double derivative_mismatch(int probes = 200) const;
  /// Largest velocity jump across the breakpoints.
  double junction_velocity_jump() const;

 private:
  explicit Curve(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// Second derivative at t: analytic when available, else central
/// differences (step 1e-4) with one Richardson extrapolation.
Vec curve_acceleration(const Curve& c, double t);

/// The plane-circle preset for d = 2: counterclockwise, starting at `start`.
Curve planar_circle_through(const Vec& start, const Vec& center, double turns = 1.0);

}  // namespace snake

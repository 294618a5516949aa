#pragma once

// Configurations taking exactly two values. A lift keeps the interval
// pattern and only moves the pair (p, q), so the state lives on
// S^{d-1} x S^{d-1} with endpoint L_p p + L_q q.

#include "snake/configuration.hpp"
#include "snake/curve.hpp"

#include <vector>

namespace snake {

class BivaluedConfig {
 public:
  /// `on_p[i]` says whether interval i of `partition` carries p.
  BivaluedConfig(const Vec& p, const Vec& q, Partition partition, std::vector<bool> on_p);
  /// Two intervals: p on [0, L_p), q on [L_p, L_p + L_q].
  static BivaluedConfig simple(const Vec& p, const Vec& q, double length_p, double length_q);
  /// Rejects anything but a piecewise-constant configuration with two values.
  static BivaluedConfig from_configuration(const Configuration& z);

  const Vec& p() const { return p_; }
  const Vec& q() const { return q_; }
  double length_p() const { return length_p_; }
  double length_q() const { return length_q_; }
  double length() const { return partition_.length(); }
  int dim() const { return static_cast<int>(p_.size()); }
  const Partition& partition() const { return partition_; }
  const std::vector<bool>& pattern() const { return on_p_; }

  bool is_lined(double tol = 1e-12) const { return (p_ + q_).norm() <= tol; }
  BivaluedConfig with_values(const Vec& p, const Vec& q) const;
  Configuration to_configuration() const;

 private:
  Vec p_, q_;
  Partition partition_;
  std::vector<bool> on_p_;
  double length_p_ = 0.0;
  double length_q_ = 0.0;
};

/// L_p p + L_q q.
Vec w_endpoint(const BivaluedConfig& c);

struct HairerReport {
  bool admissible = false;
  double orthogonality = 0.0;       // <gamma'(t0), p0> / |gamma'(t0)|
  double curvature = 0.0;           // signed, in the (p0, gamma'(t0)) orientation
  double required_curvature = 0.0;  // (L_p - L_q) / L^2
};

/// `c` is the lined configuration reached at t0 (p0 = c.p(), q0 = -p0).
/// Throws PreconditionError("not_c2") when the curve has no second
/// derivative at t0, ("tangency") when gamma'(t0) = 0.
HairerReport hairer_admissible(const Curve& gamma, double t0, const BivaluedConfig& c, double tol);

struct BivaluedCrossing {
  double time;
  BivaluedConfig lined;
  HairerReport report;
};

struct BivaluedTrajectory {
  std::vector<double> times;
  std::vector<BivaluedConfig> path;
  std::vector<BivaluedCrossing> crossings;
  const BivaluedConfig& final_config() const { return path.back(); }
};

/// Raised when the lift reaches a lined configuration through a crossing
/// that violates the curvature condition.
class CrossingError : public NumericalError {
 public:
  CrossingError(double t0, const HairerReport& r);
  double time() const { return time_; }
  const HairerReport& report() const { return report_; }

 private:
  double time_;
  HairerReport report_;
};

struct BivaluedLiftOptions {
  double step = 1e-3;
  double hairer_tolerance = 1e-6;
  double start_tolerance = 1e-9;
};

/// d = 2: solves the two-point fiber {L_p p + L_q q = gamma(t)} at each
/// step, continuing the branch that keeps (p, q) C¹.
BivaluedTrajectory lift_bivalued(const BivaluedConfig& c0, const Curve& gamma,
                                 const BivaluedLiftOptions& opts = {});

/// Any d: RK4 on S^{d-1} x S^{d-1} with p' = u - <u,p> p, q' = u - <u,q> q,
/// u = (L I - L_p p p^T - L_q q q^T)^{-1} gamma'. Stops short of lined points.
BivaluedTrajectory lift_bivalued_ode(const BivaluedConfig& c0, const Curve& gamma,
                                     const BivaluedLiftOptions& opts = {});

enum class BivaluedOrbitKind { sphere_d_minus_2, point, sphere_d_minus_1 };

const char* to_string(BivaluedOrbitKind k);

struct BivaluedOrbit {
  BivaluedOrbitKind kind;
  int components;
  std::vector<BivaluedConfig> witnesses;
};

/// Classifies the holonomy orbit of a bivalued configuration and samples
/// witnesses (all in the fiber of w_endpoint(c0)).
BivaluedOrbit horb_bivalued(const BivaluedConfig& c0, int samples = 16, unsigned seed = 1);

/// Reflection of (p, q) across the line through w_endpoint (d = 2): the
/// other point of the fiber.
BivaluedConfig reflect_across_endpoint(const BivaluedConfig& c);

}  // namespace snake

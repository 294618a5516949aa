#pragma once

// Horizontal lifting of a snout path: the group ODE
//
//   g'(t) = chi( M(g(t) z0)^{-1} gamma'(t) ) g(t),   g(0) = id,
//
// whose solution carries z0 along the horizontal lift z_t = g(t) z0.

#include "snake/configuration.hpp"
#include "snake/curve.hpp"
#include "snake/su11.hpp"

#include <optional>
#include <vector>

namespace snake {

struct LiftOptions {
  double step = 1e-3;             // per unit of curve time
  int renormalize_every = 16;
  double sigma_min = 1e-6;        // stop when lambda_min(M) < sigma_min * L
  double defect_tolerance = 1e-6;
  bool enforce_sedentary_ball = false;
  /// Accept z0 with fewer than 3 distinct values and rely on the
  /// near-lined stop instead of rejecting up front.
  bool allow_singular = false;
  /// Post-multiply each step by the boost that puts f(z_t) back on gamma(t).
  bool snap = false;
  int output_stride = 1;          // record every n-th step (and the last)
  bool record_configs = true;     // false: keep only the final configuration
};

enum class LiftStatus { complete, stopped_near_lined, stopped_out_of_ball };

const char* to_string(LiftStatus s);

struct LiftResult {
  std::vector<double> times;
  std::vector<MobiusElement> group_path;
  std::vector<Configuration> config_path;
  std::vector<double> defects;
  LiftStatus status = LiftStatus::complete;
  double stop_time = 0.0;
  std::size_t steps = 0;
  bool snapped = false;

  const MobiusElement& final_group() const { return group_path.back(); }
  const Configuration& final_config() const { return config_path.back(); }
  double max_defect() const;
};

LiftResult horizontal_lift(const Configuration& z0, const Curve& gamma, const LiftOptions& opts);
/// Continues from g_start: the lift starts at g_start z0 (used to chain loops).
LiftResult horizontal_lift(const Configuration& z0, const Curve& gamma, const LiftOptions& opts,
                           const MobiusElement& g_start);

struct SU11LiftResult {
  LiftResult lift;                   // group_path projected to Möb(1)
  std::vector<SU11Element> su11_path;
  std::vector<CoverChart> charts;    // (v, theta) per recorded time
};

/// d = 2 only: integrates in SU(1,1) with the same scheme.
SU11LiftResult lift_su11(const Configuration& z0, const Curve& gamma, const LiftOptions& opts);
SU11LiftResult lift_su11(const Configuration& z0, const Curve& gamma, const LiftOptions& opts,
                         const SU11Element& g_start);

/// Final configuration of the lift of a closed loop. Bivalued planar z0 are
/// lifted through the fiber solver instead of the group ODE.
Configuration holonomy(const Configuration& z0, const Curve& loop, const LiftOptions& opts);

/// Lifts the straight segment from f(z) to `target`.
Configuration parallel_transport_to(const Configuration& z, const Vec& target,
                                    const LiftOptions& opts);

/// Max relative least-squares residual of the finite-difference velocities
/// of the lift against the horizontal space {s -> u - <z(s), u> z(s)}.
double check_horizontal(const LiftResult& lift);

/// Max entry of |FD(eps -> f(boost(e_j, eps) g z0)) - M(g z0)|.
double linmap_matrix_check(const Configuration& z0, const MobiusElement& g, double eps = 1e-5);

/// Repeats a closed loop n times, chaining the group element.
struct TurnsResult {
  std::vector<double> distances;       // sup_distance(z_n, z0), n = 0..N
  std::vector<MobiusElement> groups;   // g after n turns
  std::vector<CoverChart> charts;      // d = 2: SU(1,1) chart after n turns
  std::vector<double> max_defects;     // per turn
};
TurnsResult lift_turns(const Configuration& z0, const Curve& loop, int turns,
                       const LiftOptions& opts);

/// Raised when a lift stops early; carries the partial result.
class LiftFailure : public NumericalError {
 public:
  LiftFailure(LiftStatus status, double t)
      : NumericalError(to_string(status), std::string("lift stopped: ") + to_string(status) +
                                              " at t=" + std::to_string(t)),
        status_(status), time_(t) {}
  LiftStatus status() const { return status_; }
  double time() const { return time_; }

 private:
  LiftStatus status_;
  double time_;
};

}  // namespace snake

#pragma once

// Interactive steering: dragged snout targets become a C¹ curve one segment
// at a time, and the lift is advanced to the end of each new segment.

#include "snake/bivalued.hpp"
#include "snake/scene.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace snake {

struct SessionState {
  std::uint64_t seq = 0;
  int dim = 2;
  std::vector<Vec> polyline;
  Vec snout;
  Vec target;
  double time = 0.0;          // curve time reached (one unit per accepted target)
  double defect = 0.0;
  std::optional<CoverChart> chart;  // d = 2, group ODE mode
  std::size_t steps = 0;
  int loops = 0;
  bool clamped = false;
  bool degraded = false;
  bool bivalued = false;
  double ball_radius = 0.0;   // L - 2 sed(z0)
  std::string status = "ok";
};

struct TargetRecord {
  Vec point;
  double timestamp;
};

class Session {
 public:
  /// Rejects scenes whose snake cannot be lifted (fewer than 3 values and
  /// not a planar bivalued snake).
  explicit Session(Scene scene);

  const Scene& scene() const { return scene_; }
  const Configuration& base() const { return z0_; }
  const Configuration& configuration() const { return z_; }
  double ball_radius() const { return ball_radius_; }
  bool bivalued() const { return bivalued_.has_value(); }

  SessionState state();
  SessionState on_target(const Vec& point, double timestamp);
  SessionState reset();

  /// Trajectory CSV in the `lift` command format (bivalued format in
  /// bivalued mode). Header only before the first accepted target.
  std::string export_csv() const;
  const std::vector<TargetRecord>& target_log() const { return log_; }
  /// Accepted (clamped, de-duplicated) knots, starting at the base snout.
  const std::vector<Vec>& knots() const { return knots_; }

  std::uint64_t next_seq() { return ++seq_; }

  /// Radial clamp into the open ball: points at or beyond 0.99 radius are
  /// pulled back to 0.99 radius.
  static Vec clamp_target(const Vec& point, double radius, bool* clamped = nullptr);

 private:
  void clear();
  SessionState snapshot(bool clamped);

  Scene scene_;
  LiftOptions opts_;
  Configuration z0_;
  Configuration z_;
  Vec base_snout_;
  double ball_radius_ = 0.0;
  double clamp_radius_ = 0.0;
  double max_speed_ = 0.0;

  std::optional<BivaluedConfig> bivalued_;
  std::optional<BivaluedConfig> bivalued_current_;
  MobiusElement g_;
  SU11Element g2_ = SU11Element::identity();

  std::vector<TargetRecord> log_;
  std::vector<Vec> knots_;
  std::vector<Vec> tangents_;
  std::string rows_;
  double defect_ = 0.0;
  std::size_t steps_ = 0;
  int loops_ = 0;
  bool away_ = false;
  bool degraded_ = false;
  std::string status_ = "ok";
  std::uint64_t seq_ = 0;
};

}  // namespace snake

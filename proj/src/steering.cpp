#include "snake/steering.hpp"

#include "snake/output.hpp"

#include <algorithm>
#include <cmath>

namespace snake {

namespace {

constexpr double kClampFraction = 0.99;
constexpr double kDefaultSpeed = 0.25;  // in units of L per unit time
constexpr double kAwayFraction = 1e-3;
constexpr int kPolylineSamples = 128;

Configuration checked_configuration(const Scene& scene) {
  Configuration z = build_configuration(scene);
  const bool planar_bivalued =
      z.dim() == 2 && z.is_piecewise_constant() && distinct_value_count(z, 3) == 2;
  if (!planar_bivalued && !scene.solver.allow_singular && distinct_value_count(z, 3) < 3) {
    throw PreconditionError("too_few_values",
                            "steering needs at least 3 distinct values or a planar bivalued snake");
  }
  return z;
}

}  // namespace

Session::Session(Scene scene)
    : scene_(std::move(scene)),
      opts_(scene_.solver.options()),
      z0_(checked_configuration(scene_)),
      z_(z0_),
      g_(MobiusElement::identity(z0_.dim())) {
  base_snout_ = endpoint(z0_);
  ball_radius_ = z0_.length() - 2.0 * sedentariness(z0_);
  if (z0_.dim() == 2 && z0_.is_piecewise_constant() && distinct_value_count(z0_, 3) == 2) {
    bivalued_ = BivaluedConfig::from_configuration(z0_);
  }
  clamp_radius_ = bivalued_ ? z0_.length() : ball_radius_;
  max_speed_ = (scene_.curve.kind == "drag" && scene_.curve.max_speed > 0.0)
                   ? scene_.curve.max_speed
                   : kDefaultSpeed * z0_.length();
  clear();
}

void Session::clear() {
  z_ = z0_;
  g_ = MobiusElement::identity(z0_.dim());
  g2_ = SU11Element::identity();
  bivalued_current_ = bivalued_;
  log_.clear();
  knots_ = {base_snout_};
  tangents_ = {Vec::Zero(z0_.dim())};
  rows_.clear();
  defect_ = 0.0;
  steps_ = 0;
  loops_ = 0;
  away_ = false;
  degraded_ = false;
  status_ = "ok";
}

Vec Session::clamp_target(const Vec& point, double radius, bool* clamped) {
  const double limit = kClampFraction * std::max(radius, 0.0);
  const double n = point.norm();
  const bool c = n >= limit;
  if (clamped) *clamped = c;
  if (!c) return point;
  if (!(n > 0.0)) return point;
  return point * (limit / n);
}

SessionState Session::snapshot(bool clamped) {
  SessionState s;
  s.seq = next_seq();
  s.dim = z0_.dim();
  s.polyline = integrate_snake(z_, kPolylineSamples).points;
  s.snout = endpoint(z_);
  s.target = knots_.back();
  s.time = static_cast<double>(knots_.size() - 1);
  s.defect = defect_;
  if (z0_.dim() == 2 && !bivalued_) s.chart = su11_cover_chart(g2_.normalized());
  s.steps = steps_;
  s.loops = loops_;
  s.clamped = clamped;
  s.degraded = degraded_;
  s.bivalued = bivalued_.has_value();
  s.ball_radius = std::max(0.0, ball_radius_);
  s.status = status_;
  return s;
}

SessionState Session::state() { return snapshot(false); }

SessionState Session::reset() {
  clear();
  return snapshot(false);
}

SessionState Session::on_target(const Vec& point, double timestamp) {
  if (point.size() != z0_.dim()) {
    throw PreconditionError("dimension", "target has the wrong dimension");
  }
  if (degraded_) return snapshot(false);
  log_.push_back(TargetRecord{point, timestamp});
  bool clamped = false;
  const Vec target = clamp_target(point, clamp_radius_, &clamped);
  if ((target - knots_.back()).norm() == 0.0) return snapshot(clamped);

  const Vec& from = knots_.back();
  Vec tangent = target - from;
  if (max_speed_ > 0.0 && tangent.norm() > max_speed_) tangent *= max_speed_ / tangent.norm();
  const Curve seg = Curve::hermite({from, target}, {tangents_.back(), tangent});
  const double offset = static_cast<double>(knots_.size() - 1);
  const bool first = rows_.empty();

  if (bivalued_) {
    try {
      BivaluedLiftOptions bo;
      bo.step = opts_.step;
      bo.start_tolerance = opts_.defect_tolerance;
      const BivaluedTrajectory tr = lift_bivalued(*bivalued_current_, seg, bo);
      std::string rows = bivalued_csv(tr, seg);
      rows.erase(0, rows.find('\n') + 1);  // header
      if (!first) rows.erase(0, rows.find('\n') + 1);  // t = 0 duplicates the last row
      // Shift the time column.
      std::string shifted;
      std::size_t pos = 0;
      while (pos < rows.size()) {
        const std::size_t comma = rows.find(',', pos);
        const std::size_t eol = rows.find('\n', pos);
        shifted += format_double(std::stod(rows.substr(pos, comma - pos)) + offset);
        shifted += rows.substr(comma, eol - comma + 1);
        pos = eol + 1;
      }
      rows_ += shifted;
      bivalued_current_ = tr.final_config();
      z_ = tr.final_config().to_configuration();
      steps_ += tr.times.size() - 1;
      defect_ = (w_endpoint(tr.final_config()) - target).norm();
    } catch (const NumericalError& e) {
      degraded_ = true;
      status_ = e.code();
      return snapshot(clamped);
    }
  } else {
    LiftResult lift;
    std::vector<CoverChart> charts;
    try {
      if (z0_.dim() == 2) {
        SU11LiftResult r = lift_su11(z0_, seg, opts_, g2_);
        lift = std::move(r.lift);
        charts = std::move(r.charts);
        g2_ = r.su11_path.back();
      } else {
        lift = horizontal_lift(z0_, seg, opts_, g_);
      }
    } catch (const NumericalError& e) {
      degraded_ = true;
      status_ = e.code();
      return snapshot(clamped);
    }
    rows_ += trajectory_csv_rows(lift, seg, z0_.dim() == 2 ? &charts : nullptr, offset, !first);
    g_ = lift.final_group();
    z_ = lift.final_config();
    steps_ += lift.steps;
    defect_ = lift.defects.back();
    if (lift.status != LiftStatus::complete) {
      // Paused at the last good state; the knot is not accepted.
      degraded_ = true;
      status_ = to_string(lift.status);
      return snapshot(clamped);
    }
    if (defect_ > opts_.defect_tolerance) {
      degraded_ = true;
      status_ = "defect";
    }
  }

  knots_.push_back(target);
  tangents_.push_back(tangent);
  const double dist = (target - base_snout_).norm();
  if (dist > kAwayFraction * z0_.length()) {
    away_ = true;
  } else if (away_ && dist <= 1e-9 * z0_.length()) {
    ++loops_;
    away_ = false;
  }
  return snapshot(clamped);
}

std::string Session::export_csv() const {
  const int d = z0_.dim();
  if (bivalued_) {
    std::string header = bivalued_csv(BivaluedTrajectory{}, Curve::constant(base_snout_));
    return header + rows_;
  }
  return trajectory_csv_header(d) + rows_;
}

}  // namespace snake

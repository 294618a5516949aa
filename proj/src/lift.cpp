#include "snake/lift.hpp"

#include "snake/bivalued.hpp"
#include "snake/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace snake {

const char* to_string(LiftStatus s) {
  switch (s) {
    case LiftStatus::complete: return "complete";
    case LiftStatus::stopped_near_lined: return "stopped_near_lined";
    case LiftStatus::stopped_out_of_ball: return "stopped_out_of_ball";
  }
  return "unknown";
}

double LiftResult::max_defect() const {
  double m = 0.0;
  for (double d : defects) m = std::max(m, d);
  return m;
}

namespace {

constexpr double kBallMargin = 1e-6;
constexpr int kBallProbes = 512;

struct FieldValue {
  Vec w;           // M^{-1} gamma'
  double lambda;   // smallest eigenvalue of M
};

FieldValue solve_field(const kernels::Moments& m, double length, const Vec& velocity) {
  const Eigen::Index d = m.first.size();
  const Mat M = length * Mat::Identity(d, d) - m.second;
  Eigen::SelfAdjointEigenSolver<Mat> es(M);
  const Vec& ev = es.eigenvalues();
  const double lambda = ev(0);
  if (!(lambda > 0.0)) return FieldValue{Vec::Zero(d), lambda};
  const Mat& U = es.eigenvectors();
  Vec w = U * (U.transpose() * velocity).cwiseQuotient(ev);
  return FieldValue{std::move(w), lambda};
}

// Group-specific pieces for the commutator-free scheme.
struct LorentzGroup {
  using State = Mat;
  const Configuration& z0;

  kernels::Moments moments(const State& g) const {
    return kernels::moments(kernels::act(g, z0.nodes()), z0.weights());
  }
  State step(const Vec& w, const State& g) const { return boost(w, 1.0).matrix() * g; }
  State renormalize_state(const State& g) const {
    const MobiusElement e = unchecked_from(g);
    return renormalize(e).matrix();
  }
  MobiusElement element(const State& g) const { return unchecked_from(g); }

  static MobiusElement unchecked_from(const Mat& g) {
    // Residual checked by renormalize; from_matrix would reject a blow-up with
    // a precondition error instead of a numerical one.
    try {
      return MobiusElement::from_matrix(g);
    } catch (const PreconditionError&) {
      throw NumericalError("blow_up", "group element drifted too far from O(d,1)");
    }
  }
};

struct SU11Group {
  using State = SU11Element;
  const Configuration& z0;
  std::vector<Complex> points;

  explicit SU11Group(const Configuration& z) : z0(z) {
    points.reserve(z.nodes().cols());
    for (Eigen::Index j = 0; j < z.nodes().cols(); ++j) {
      points.emplace_back(z.nodes()(0, j), z.nodes()(1, j));
    }
  }

  kernels::Moments moments(const State& g) const {
    Mat moved(2, static_cast<Eigen::Index>(points.size()));
    for (std::size_t j = 0; j < points.size(); ++j) {
      const Complex w = g.act(points[j]);
      moved(0, static_cast<Eigen::Index>(j)) = w.real();
      moved(1, static_cast<Eigen::Index>(j)) = w.imag();
    }
    return kernels::moments(moved, z0.weights());
  }
  State step(const Vec& w, const State& g) const {
    return su11_boost(Complex(w(0), w(1)), 1.0) * g;
  }
  State renormalize_state(const State& g) const { return g.normalized(); }
  MobiusElement element(const State& g) const { return su11_to_mobius(g.normalized()); }
};

template <class Group>
struct RawLift {
  std::vector<double> times;
  std::vector<typename Group::State> states;
  std::vector<double> defects;
  LiftStatus status = LiftStatus::complete;
  double stop_time = 0.0;
  std::size_t steps = 0;
  bool snapped = false;
};

void check_preconditions(const Configuration& z0, const Configuration& start, const Curve& gamma,
                         const LiftOptions& opts) {
  if (!(opts.step > 0.0) || opts.renormalize_every < 1 || !(opts.sigma_min > 0.0) ||
      !(opts.defect_tolerance > 0.0) || opts.output_stride < 1) {
    throw PreconditionError("options", "lift options must be positive");
  }
  if (gamma.dim() != z0.dim()) {
    throw PreconditionError("dimension", "curve and configuration dimensions differ");
  }
  const double mismatch = (endpoint(start) - gamma.position(0.0)).norm();
  if (mismatch > opts.defect_tolerance) {
    throw PreconditionError("start_mismatch",
                            "curve does not start at the snout: |f(z0) - gamma(0)| = " +
                                std::to_string(mismatch));
  }
  if (!opts.allow_singular && distinct_value_count(z0, 3) < 3) {
    throw PreconditionError("too_few_values",
                            "the group ODE needs a configuration with at least 3 distinct values");
  }
  if (opts.enforce_sedentary_ball) {
    const double radius = z0.length() - 2.0 * sedentariness(z0);
    double reach = 0.0;
    for (int k = 0; k <= kBallProbes; ++k) {
      reach = std::max(reach, gamma.position(gamma.t_end() * k / kBallProbes).norm());
    }
    for (double b : gamma.breakpoints()) reach = std::max(reach, gamma.position(b).norm());
    if (!(reach < radius)) {
      throw PreconditionError("admissible_ball",
                              "curve leaves the open ball of radius L - 2 sed(z0) = " +
                                  std::to_string(radius));
    }
  }
}

template <class Group>
void snap_to(const Group& group, typename Group::State& g, const Vec& target, double length) {
  for (int it = 0; it < 3; ++it) {
    const kernels::Moments m = group.moments(g);
    const Vec err = target - m.first;
    if (err.norm() <= 1e-15 * length) return;
    const FieldValue f = solve_field(m, length, err);
    if (!(f.lambda > 0.0)) return;
    g = group.step(f.w, g);
  }
}

template <class Group>
RawLift<Group> integrate(const Group& group, const Curve& gamma, const LiftOptions& opts,
                         typename Group::State g) {
  const double length = group.z0.length();
  const double lambda_floor = opts.sigma_min * length;
  const double ball = length * (1.0 - kBallMargin);

  RawLift<Group> out;
  out.snapped = opts.snap;

  auto record = [&](double t, const typename Group::State& state, const Vec& f) {
    out.times.push_back(t);
    out.states.push_back(state);
    out.defects.push_back((f - gamma.position(t)).norm());
  };

  // Field at (t, state): returns false on the near-lined stop.
  auto field = [&](double t, Side side, const typename Group::State& state, Vec& w) {
    const kernels::Moments m = group.moments(state);
    FieldValue f = solve_field(m, length, gamma.velocity(t, side));
    if (!(f.lambda >= lambda_floor)) return false;
    w = std::move(f.w);
    return true;
  };

  record(0.0, g, group.moments(g).first);

  std::vector<double> knots{0.0};
  for (double b : gamma.breakpoints()) {
    if (b > knots.back() && b < gamma.t_end()) knots.push_back(b);
  }
  knots.push_back(gamma.t_end());

  std::size_t since_renorm = 0;
  std::size_t since_record = 0;
  for (std::size_t piece = 0; piece + 1 < knots.size(); ++piece) {
    const double a = knots[piece];
    const double b = knots[piece + 1];
    const auto n = static_cast<std::size_t>(
        std::max(1.0, std::ceil((b - a) / opts.step - 1e-9)));
    const double h = (b - a) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = a + h * static_cast<double>(i);
      const double t_next = (i + 1 == n) ? b : a + h * static_cast<double>(i + 1);
      const double hh = t_next - t;

      if (gamma.position(t_next).norm() >= ball) {
        out.status = LiftStatus::stopped_out_of_ball;
        out.stop_time = t;
        break;
      }

      Vec f1, f2, f3, f4;
      bool ok = field(t, Side::right, g, f1);
      typename Group::State y2 = g;
      typename Group::State y3 = g;
      typename Group::State y4 = g;
      if (ok) {
        y2 = group.step(0.5 * hh * f1, g);
        ok = field(t + 0.5 * hh, Side::right, y2, f2);
      }
      if (ok) {
        y3 = group.step(0.5 * hh * f2, g);
        ok = field(t + 0.5 * hh, Side::right, y3, f3);
      }
      if (ok) {
        y4 = group.step(hh * f3 - 0.5 * hh * f1, y2);
        ok = field(t_next, Side::left, y4, f4);
      }
      if (!ok) {
        out.status = LiftStatus::stopped_near_lined;
        out.stop_time = t;
        break;
      }
      const typename Group::State half =
          group.step(hh / 12.0 * (3.0 * f1 + 2.0 * f2 + 2.0 * f3 - f4), g);
      g = group.step(hh / 12.0 * (-f1 + 2.0 * f2 + 2.0 * f3 + 3.0 * f4), half);
      ++out.steps;

      if (++since_renorm >= static_cast<std::size_t>(opts.renormalize_every)) {
        g = group.renormalize_state(g);
        since_renorm = 0;
      }
      if (opts.snap) snap_to(group, g, gamma.position(t_next), length);

      const bool last = (piece + 2 == knots.size()) && (i + 1 == n);
      if (++since_record >= static_cast<std::size_t>(opts.output_stride) || last) {
        record(t_next, g, group.moments(g).first);
        since_record = 0;
      }
    }
    if (out.status != LiftStatus::complete) break;
  }
  if (out.status == LiftStatus::complete) {
    out.stop_time = gamma.t_end();
  } else if (out.times.back() != out.stop_time) {
    record(out.stop_time, g, group.moments(g).first);
  }
  return out;
}

template <class Group>
LiftResult assemble(const Group& group, RawLift<Group>& raw, const LiftOptions& opts) {
  LiftResult r;
  r.times = std::move(raw.times);
  r.defects = std::move(raw.defects);
  r.status = raw.status;
  r.stop_time = raw.stop_time;
  r.steps = raw.steps;
  r.snapped = raw.snapped;
  r.group_path.reserve(raw.states.size());
  for (const auto& s : raw.states) r.group_path.push_back(group.element(s));
  if (opts.record_configs) {
    r.config_path.reserve(r.group_path.size());
    for (const MobiusElement& g : r.group_path) r.config_path.push_back(act(g, group.z0));
  } else {
    r.config_path.push_back(act(r.group_path.back(), group.z0));
  }
  return r;
}

}  // namespace

LiftResult horizontal_lift(const Configuration& z0, const Curve& gamma, const LiftOptions& opts) {
  return horizontal_lift(z0, gamma, opts, MobiusElement::identity(z0.dim()));
}

LiftResult horizontal_lift(const Configuration& z0, const Curve& gamma, const LiftOptions& opts,
                           const MobiusElement& g_start) {
  if (g_start.dim() != z0.dim()) {
    throw PreconditionError("dimension", "group and configuration dimensions differ");
  }
  check_preconditions(z0, act(g_start, z0), gamma, opts);
  const LorentzGroup group{z0};
  RawLift<LorentzGroup> raw = integrate(group, gamma, opts, Mat(g_start.matrix()));
  return assemble(group, raw, opts);
}

SU11LiftResult lift_su11(const Configuration& z0, const Curve& gamma, const LiftOptions& opts) {
  return lift_su11(z0, gamma, opts, SU11Element::identity());
}

SU11LiftResult lift_su11(const Configuration& z0, const Curve& gamma, const LiftOptions& opts,
                         const SU11Element& g_start) {
  if (z0.dim() != 2) throw PreconditionError("dimension", "SU(1,1) lifting needs d = 2");
  check_preconditions(z0, act(su11_to_mobius(g_start), z0), gamma, opts);
  const SU11Group group(z0);
  RawLift<SU11Group> raw = integrate(group, gamma, opts, g_start);
  SU11LiftResult out;
  out.su11_path.reserve(raw.states.size());
  for (const SU11Element& s : raw.states) {
    out.su11_path.push_back(s.normalized());
    out.charts.push_back(su11_cover_chart(out.su11_path.back()));
  }
  out.lift = assemble(group, raw, opts);
  return out;
}

namespace {

bool is_planar_bivalued(const Configuration& z) {
  return z.dim() == 2 && z.is_piecewise_constant() && distinct_value_count(z, 3) == 2;
}

void require_closed(const Curve& loop, double tol) {
  if ((loop.position(loop.t_end()) - loop.position(0.0)).norm() > tol) {
    throw PreconditionError("not_closed", "holonomy needs a closed loop");
  }
}

}  // namespace

Configuration holonomy(const Configuration& z0, const Curve& loop, const LiftOptions& opts) {
  require_closed(loop, opts.defect_tolerance);
  if (is_planar_bivalued(z0)) {
    const BivaluedConfig c0 = BivaluedConfig::from_configuration(z0);
    BivaluedLiftOptions bo;
    bo.step = opts.step;
    bo.start_tolerance = opts.defect_tolerance;
    return lift_bivalued(c0, loop, bo).final_config().to_configuration();
  }
  LiftOptions o = opts;
  o.record_configs = false;
  o.output_stride = std::max(1, o.output_stride);
  const LiftResult r = horizontal_lift(z0, loop, o);
  if (r.status != LiftStatus::complete) throw LiftFailure(r.status, r.stop_time);
  return r.final_config();
}

Configuration parallel_transport_to(const Configuration& z, const Vec& target,
                                    const LiftOptions& opts) {
  const Vec from = endpoint(z);
  if (target.size() != from.size()) {
    throw PreconditionError("dimension", "target and configuration dimensions differ");
  }
  if ((target - from).norm() == 0.0) return z;
  const double radius = z.length() - 2.0 * sedentariness(z);
  // The segment's farthest point from the origin is one of its ends.
  if (!(std::max(from.norm(), target.norm()) < radius)) {
    throw PreconditionError("admissible_ball",
                            "segment leaves the open ball of radius L - 2 sed(z) = " +
                                std::to_string(radius));
  }
  LiftOptions o = opts;
  o.record_configs = false;
  const LiftResult r = horizontal_lift(z, Curve::segment(from, target), o);
  if (r.status != LiftStatus::complete) throw LiftFailure(r.status, r.stop_time);
  return r.final_config();
}

double check_horizontal(const LiftResult& lift) {
  const auto& path = lift.config_path;
  if (path.size() < 3 || path.size() != lift.times.size()) {
    throw PreconditionError("too_few_samples", "horizontality check needs >= 3 recorded configurations");
  }
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < path.size(); ++i) {
    const Configuration& z = path[i];
    const Mat& x = z.nodes();
    const Vec& w = z.weights();
    const Mat vel = (path[i + 1].nodes() - path[i - 1].nodes()) /
                    (lift.times[i + 1] - lift.times[i - 1]);
    const Eigen::Index d = x.rows();
    // Normal equations: (sum w P_k) u = sum w P_k v_k, and sum w P_k = M(z).
    Mat M = z.length() * Mat::Identity(d, d);
    Vec rhs = Vec::Zero(d);
    double norm2 = 0.0;
    for (Eigen::Index k = 0; k < x.cols(); ++k) {
      const Vec xk = x.col(k);
      const Vec vk = vel.col(k);
      M -= w(k) * xk * xk.transpose();
      rhs += w(k) * (vk - xk.dot(vk) * xk);
      norm2 += w(k) * vk.squaredNorm();
    }
    if (norm2 <= 1e-300) continue;
    const Vec u = M.ldlt().solve(rhs);
    double res2 = 0.0;
    for (Eigen::Index k = 0; k < x.cols(); ++k) {
      const Vec xk = x.col(k);
      const Vec pu = u - xk.dot(u) * xk;
      res2 += w(k) * (vel.col(k) - pu).squaredNorm();
    }
    worst = std::max(worst, std::sqrt(res2 / norm2));
  }
  return worst;
}

double linmap_matrix_check(const Configuration& z0, const MobiusElement& g, double eps) {
  const Configuration z = act(g, z0);
  const GramDefectMatrix M = gram_defect(z);
  if (M.smallest_eigenvalue() <= settings().lined_tolerance * z.length() ||
      is_lined(z, settings().lined_tolerance)) {
    throw PreconditionError("lined", "linear map check needs a non-lined configuration");
  }
  const int d = z0.dim();
  Mat fd(d, d);
  for (int j = 0; j < d; ++j) {
    const Vec e = Vec::Unit(d, j);
    const Vec plus = endpoint(act(boost(e, eps), z));
    const Vec minus = endpoint(act(boost(e, -eps), z));
    fd.col(j) = (plus - minus) / (2.0 * eps);
  }
  return (fd - M.matrix()).cwiseAbs().maxCoeff();
}

TurnsResult lift_turns(const Configuration& z0, const Curve& loop, int turns,
                       const LiftOptions& opts) {
  if (turns < 0) throw PreconditionError("turns", "turn count must be >= 0");
  require_closed(loop, opts.defect_tolerance);
  LiftOptions o = opts;
  o.record_configs = false;
  o.output_stride = std::numeric_limits<int>::max();

  TurnsResult out;
  out.distances.push_back(0.0);
  out.groups.push_back(MobiusElement::identity(z0.dim()));
  if (z0.dim() == 2) {
    SU11Element g = SU11Element::identity();
    out.charts.push_back(su11_cover_chart(g));
    for (int n = 1; n <= turns; ++n) {
      const SU11LiftResult r = lift_su11(z0, loop, o, g);
      if (r.lift.status != LiftStatus::complete) throw LiftFailure(r.lift.status, r.lift.stop_time);
      g = r.su11_path.back();
      out.groups.push_back(r.lift.final_group());
      out.charts.push_back(r.charts.back());
      out.distances.push_back(sup_distance(r.lift.final_config(), z0));
      out.max_defects.push_back(r.lift.max_defect());
    }
    return out;
  }
  MobiusElement g = out.groups.back();
  for (int n = 1; n <= turns; ++n) {
    const LiftResult r = horizontal_lift(z0, loop, o, g);
    if (r.status != LiftStatus::complete) throw LiftFailure(r.status, r.stop_time);
    g = r.final_group();
    out.groups.push_back(g);
    out.distances.push_back(sup_distance(r.final_config(), z0));
    out.max_defects.push_back(r.max_defect());
  }
  return out;
}

}  // namespace snake

#include "snake/bivalued.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace snake {

namespace {

constexpr double kTouch = 1e-9;       // |gamma| - |L_p - L_q| below this * L is a lined touch
constexpr int kBisection = 200;
constexpr double kBisectionWidth = 1e-12;

Vec unit_perp(const Vec& x) {
  Vec r(2);
  r << -x(1), x(0);
  return r;
}

Vec random_unit(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> n01;
  Vec v(d);
  do {
    for (int i = 0; i < d; ++i) v(i) = n01(rng);
  } while (v.norm() < 1e-8);
  return v.normalized();
}

Vec random_unit_orthogonal(std::mt19937_64& rng, const Vec& axis) {
  Vec v;
  do {
    v = random_unit(rng, static_cast<int>(axis.size()));
    v -= v.dot(axis) * axis;
  } while (v.norm() < 1e-6);
  return v.normalized();
}

}  // namespace

BivaluedConfig::BivaluedConfig(const Vec& p, const Vec& q, Partition partition,
                               std::vector<bool> on_p)
    : p_(p.normalized()), q_(q.normalized()), partition_(std::move(partition)),
      on_p_(std::move(on_p)) {
  if (p.size() != q.size() || p.size() < 2) {
    throw PreconditionError("dimension", "p and q must be vectors of the same dimension >= 2");
  }
  if (on_p_.size() != partition_.size()) {
    throw PreconditionError("pattern", "pattern needs one entry per partition interval");
  }
  if ((p_ - q_).norm() <= settings().cluster_tolerance) {
    throw PreconditionError("equal_values", "bivalued configuration needs p != q");
  }
  for (std::size_t i = 0; i < on_p_.size(); ++i) {
    (on_p_[i] ? length_p_ : length_q_) += partition_.end(i) - partition_.begin(i);
  }
  if (!(length_p_ > 0.0) || !(length_q_ > 0.0)) {
    throw PreconditionError("pattern", "both values must occupy positive length");
  }
}

BivaluedConfig BivaluedConfig::simple(const Vec& p, const Vec& q, double length_p,
                                      double length_q) {
  return BivaluedConfig(p, q, Partition({0.0, length_p, length_p + length_q}), {true, false});
}

BivaluedConfig BivaluedConfig::from_configuration(const Configuration& z) {
  if (!z.is_piecewise_constant() || distinct_value_count(z, 3) != 2) {
    throw PreconditionError("not_bivalued", "configuration does not take exactly two values");
  }
  const Mat& x = z.nodes();
  const Vec p = x.col(0);
  Vec q;
  std::vector<bool> on_p(z.partition().size());
  for (std::size_t i = 0; i < on_p.size(); ++i) {
    const Vec v = x.col(z.pieces()[i].first);
    on_p[i] = (v - p).norm() <= settings().cluster_tolerance;
    if (!on_p[i] && q.size() == 0) q = v;
  }
  return BivaluedConfig(p, q, z.partition(), std::move(on_p));
}

BivaluedConfig BivaluedConfig::with_values(const Vec& p, const Vec& q) const {
  return BivaluedConfig(p, q, partition_, on_p_);
}

Configuration BivaluedConfig::to_configuration() const {
  std::vector<Vec> values;
  values.reserve(on_p_.size());
  for (bool b : on_p_) values.push_back(b ? p_ : q_);
  return Configuration::piecewise_constant(partition_, values);
}

Vec w_endpoint(const BivaluedConfig& c) { return c.length_p() * c.p() + c.length_q() * c.q(); }

CrossingError::CrossingError(double t0, const HairerReport& r)
    : NumericalError("hairer",
                     "inadmissible crossing of a lined configuration at t=" + std::to_string(t0) +
                         ": <gamma', p0>/|gamma'| = " + std::to_string(r.orthogonality) +
                         ", curvature " + std::to_string(r.curvature) + " vs required " +
                         std::to_string(r.required_curvature)),
      time_(t0), report_(r) {}

HairerReport hairer_admissible(const Curve& gamma, double t0, const BivaluedConfig& c,
                               double tol) {
  if (gamma.dim() != 2 || c.dim() != 2) {
    throw PreconditionError("dimension", "the curvature condition is stated for d = 2");
  }
  if (gamma.smoothness() < Smoothness::c2) {
    for (double b : gamma.breakpoints()) {
      if (std::abs(b - t0) <= 1e-9 * std::max(1.0, gamma.t_end())) {
        throw PreconditionError("not_c2", "curve has no second derivative at the crossing");
      }
    }
  }
  const Vec v = gamma.velocity(t0);
  const double speed = v.norm();
  if (!(speed > 0.0)) {
    throw PreconditionError("tangency", "gamma'(t0) = 0: no transversal data at the crossing");
  }
  const Vec a = curve_acceleration(gamma, t0);
  const Vec& p0 = c.p();
  HairerReport r;
  r.orthogonality = v.dot(p0) / speed;
  // In the frame (p0, gamma'/|gamma'|): kappa = (x' y'' - y' x'') / |gamma'|^3 with x' = 0.
  r.curvature = -a.dot(p0) / (speed * speed);
  const double len = c.length();
  r.required_curvature = (c.length_p() - c.length_q()) / (len * len);
  r.admissible = std::abs(r.orthogonality) <= tol &&
                 std::abs(r.curvature - r.required_curvature) <= tol;
  return r;
}

namespace {

// Two-point fiber of (p, q) -> L_p p + L_q q over x, continuing `pred`.
Vec fiber_p(const Vec& x, double lp, double lq, const Vec& pred) {
  const double r = x.norm();
  const double len = lp + lq;
  if (r <= 1e-14 * len) return pred.normalized();
  const Vec xh = x / r;
  const double c = std::clamp((r * r + lp * lp - lq * lq) / (2.0 * lp * r), -1.0, 1.0);
  const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
  const Vec perp = unit_perp(xh);
  const Vec a = c * xh + s * perp;
  const Vec b = c * xh - s * perp;
  return ((a - pred).norm() <= (b - pred).norm()) ? a : b;
}

Vec fiber_q(const Vec& x, double lp, double lq, const Vec& p) {
  const Vec q = (x - lp * p) / lq;
  const double n = q.norm();
  return n > 0.0 ? Vec(q / n) : Vec(-p);
}

std::vector<double> time_grid(const Curve& gamma, double step) {
  std::vector<double> knots{0.0};
  for (double b : gamma.breakpoints()) {
    if (b > knots.back() && b < gamma.t_end()) knots.push_back(b);
  }
  knots.push_back(gamma.t_end());
  std::vector<double> times{0.0};
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    const double a = knots[k];
    const double b = knots[k + 1];
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil((b - a) / step - 1e-9)));
    for (std::size_t i = 1; i <= n; ++i) {
      times.push_back(i == n ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(n));
    }
  }
  return times;
}

template <class F>
double bisect(F&& sign_fn, double lo, double hi) {
  const bool lo_sign = sign_fn(lo);
  for (int i = 0; i < kBisection && hi - lo > kBisectionWidth; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (sign_fn(mid) == lo_sign) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

void check_start(const BivaluedConfig& c0, const Curve& gamma, double tol) {
  if (gamma.dim() != c0.dim()) {
    throw PreconditionError("dimension", "curve and configuration dimensions differ");
  }
  const double mismatch = (w_endpoint(c0) - gamma.position(0.0)).norm();
  if (mismatch > tol) {
    throw PreconditionError("start_mismatch", "curve does not start at the snout: mismatch " +
                                                  std::to_string(mismatch));
  }
}

}  // namespace

BivaluedTrajectory lift_bivalued(const BivaluedConfig& c0, const Curve& gamma,
                                 const BivaluedLiftOptions& opts) {
  if (c0.dim() != 2) throw PreconditionError("dimension", "the fiber solver needs d = 2");
  if (!(opts.step > 0.0)) throw PreconditionError("options", "step must be positive");
  check_start(c0, gamma, opts.start_tolerance);

  const double lp = c0.length_p();
  const double lq = c0.length_q();
  const double len = c0.length();
  const double inner = std::abs(lp - lq);
  const auto gap = [&](double t) { return gamma.position(t).norm() - inner; };
  const auto radial = [&](double t) {
    return gamma.position(t).dot(gamma.velocity(t)) > 0.0;
  };

  BivaluedTrajectory out;
  out.times.push_back(0.0);
  out.path.push_back(c0);
  Vec p_prev = c0.p();
  Vec p_cur = c0.p();

  const std::vector<double> times = time_grid(gamma, opts.step);
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double t0 = times[k - 1];
    const double t1 = times[k];
    const Vec x = gamma.position(t1);
    if (x.norm() > len * (1.0 + 1e-12)) {
      throw PreconditionError("admissible_ball", "curve leaves the closed ball of radius L");
    }

    // Entering the forbidden disc |x| < |L_p - L_q|: bracket the entry and report.
    if (gap(t1) < -kTouch * len) {
      const double tc = bisect([&](double t) { return gap(t) < 0.0; }, t0, t1);
      Vec p0 = gamma.position(tc);
      p0 = (lp >= lq ? 1.0 : -1.0) * p0 / std::max(p0.norm(), 1e-300);
      if (inner == 0.0) p0 = p_cur;
      const BivaluedConfig lined = c0.with_values(p0, -p0);
      HairerReport rep = hairer_admissible(gamma, tc, lined, opts.hairer_tolerance);
      rep.admissible = false;
      throw CrossingError(tc, rep);
    }

    // A local minimum of |gamma| touching the inner circle is a lined crossing.
    const bool dec0 = !radial(t0);
    const bool inc1 = radial(t1);
    if (dec0 && inc1) {
      const double tc = bisect(radial, t0, t1);
      if (gap(tc) <= kTouch * len) {
        const Vec xc = gamma.position(tc);
        Vec p0;
        if (inner > 0.0) {
          p0 = (lp >= lq ? 1.0 : -1.0) * xc.normalized();
        } else {
          // Continue the current branch to tc, then drop the component along x.
          p0 = fiber_p(xc, lp, lq, p_cur + (p_cur - p_prev) * ((tc - t0) / (t1 - t0)));
          if (xc.norm() > 0.0) p0 -= p0.dot(xc.normalized()) * xc.normalized();
          p0.normalize();
        }
        const BivaluedConfig lined = c0.with_values(p0, -p0);
        const HairerReport rep = hairer_admissible(gamma, tc, lined, opts.hairer_tolerance);
        if (!rep.admissible) throw CrossingError(tc, rep);
        out.crossings.push_back(BivaluedCrossing{tc, lined, rep});
      }
    }

    const Vec pred = (2.0 * p_cur - p_prev).normalized();
    const Vec p = fiber_p(x, lp, lq, pred);
    const Vec q = fiber_q(x, lp, lq, p);
    p_prev = p_cur;
    p_cur = p;
    out.times.push_back(t1);
    if ((p - q).norm() <= settings().cluster_tolerance) {
      throw NumericalError("collapsed", "fiber solve produced p = q");
    }
    out.path.push_back(c0.with_values(p, q));
  }
  return out;
}

BivaluedTrajectory lift_bivalued_ode(const BivaluedConfig& c0, const Curve& gamma,
                                     const BivaluedLiftOptions& opts) {
  if (!(opts.step > 0.0)) throw PreconditionError("options", "step must be positive");
  check_start(c0, gamma, opts.start_tolerance);
  const double lp = c0.length_p();
  const double lq = c0.length_q();
  const double len = c0.length();
  const int d = c0.dim();

  struct Rate {
    Vec dp, dq;
    double lambda;
  };
  const auto rate = [&](double t, Side side, const Vec& p, const Vec& q) {
    const Mat M = len * Mat::Identity(d, d) - lp * p * p.transpose() - lq * q * q.transpose();
    Eigen::SelfAdjointEigenSolver<Mat> es(M);
    const Vec u = es.eigenvectors() *
                  (es.eigenvectors().transpose() * gamma.velocity(t, side))
                      .cwiseQuotient(es.eigenvalues().cwiseMax(1e-300));
    return Rate{u - u.dot(p) * p, u - u.dot(q) * q, es.eigenvalues()(0)};
  };

  BivaluedTrajectory out;
  out.times.push_back(0.0);
  out.path.push_back(c0);
  Vec p = c0.p();
  Vec q = c0.q();
  const double floor = 1e-6 * len;
  const std::vector<double> times = time_grid(gamma, opts.step);
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double t = times[k - 1];
    const double h = times[k] - t;
    const Rate k1 = rate(t, Side::right, p, q);
    const Rate k2 = rate(t + 0.5 * h, Side::right, p + 0.5 * h * k1.dp, q + 0.5 * h * k1.dq);
    const Rate k3 = rate(t + 0.5 * h, Side::right, p + 0.5 * h * k2.dp, q + 0.5 * h * k2.dq);
    const Rate k4 = rate(times[k], Side::left, p + h * k3.dp, q + h * k3.dq);
    if (std::min({k1.lambda, k2.lambda, k3.lambda, k4.lambda}) < floor) break;
    p = (p + h / 6.0 * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp)).normalized();
    q = (q + h / 6.0 * (k1.dq + 2.0 * k2.dq + 2.0 * k3.dq + k4.dq)).normalized();
    out.times.push_back(times[k]);
    out.path.push_back(c0.with_values(p, q));
  }
  return out;
}

const char* to_string(BivaluedOrbitKind k) {
  switch (k) {
    case BivaluedOrbitKind::sphere_d_minus_2: return "sphere_d_minus_2";
    case BivaluedOrbitKind::point: return "point";
    case BivaluedOrbitKind::sphere_d_minus_1: return "sphere_d_minus_1";
  }
  return "unknown";
}

BivaluedConfig reflect_across_endpoint(const BivaluedConfig& c) {
  if (c.dim() != 2) throw PreconditionError("dimension", "reflection is defined for d = 2");
  const Vec w = w_endpoint(c);
  if (!(w.norm() > 0.0)) throw PreconditionError("zero_endpoint", "endpoint is the origin");
  const Vec u = w.normalized();
  const Mat r = 2.0 * u * u.transpose() - Mat::Identity(2, 2);
  return c.with_values(r * c.p(), r * c.q());
}

BivaluedOrbit horb_bivalued(const BivaluedConfig& c0, int samples, unsigned seed) {
  const int d = c0.dim();
  const double lp = c0.length_p();
  const double lq = c0.length_q();
  const double len = c0.length();
  const Vec w = w_endpoint(c0);
  std::mt19937_64 rng(seed);

  BivaluedOrbit out{BivaluedOrbitKind::point, 1, {c0}};
  if (c0.is_lined(settings().lined_tolerance)) {
    if (w.norm() > settings().lined_tolerance * len) return out;
    out.kind = BivaluedOrbitKind::sphere_d_minus_1;
    for (int i = 1; i < samples; ++i) {
      const Vec p = random_unit(rng, d);
      out.witnesses.push_back(c0.with_values(p, -p));
    }
    return out;
  }

  out.kind = BivaluedOrbitKind::sphere_d_minus_2;
  const double r = w.norm();
  const Vec wh = w / r;
  const double c = std::clamp((r * r + lp * lp - lq * lq) / (2.0 * lp * r), -1.0, 1.0);
  const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
  if (d == 2) {
    out.components = 2;
    out.witnesses.push_back(reflect_across_endpoint(c0));
    return out;
  }
  for (int i = 1; i < samples; ++i) {
    const Vec p = c * wh + s * random_unit_orthogonal(rng, wh);
    out.witnesses.push_back(c0.with_values(p, (w - lp * p) / lq));
  }
  return out;
}

}  // namespace snake

#include "snake/curve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace snake {

struct Curve::Impl {
  Impl(int d, double end, Smoothness s) : dim(d), t_end(end), smoothness(s) {}
  virtual ~Impl() = default;
  virtual Vec position(double t) const = 0;
  virtual Vec velocity(double t, Side side) const = 0;
  virtual std::optional<Vec> acceleration(double t, Side side) const = 0;
  virtual std::vector<double> breakpoints() const { return {}; }

  int dim;
  double t_end;
  Smoothness smoothness;
};

namespace {

using Impl = Curve::Impl;

struct ConstantImpl final : Impl {
  ConstantImpl(const Vec& p, double end) : Impl(static_cast<int>(p.size()), end, Smoothness::c_infinity), point(p) {}
  Vec position(double) const override { return point; }
  Vec velocity(double, Side) const override { return Vec::Zero(dim); }
  std::optional<Vec> acceleration(double, Side) const override { return Vec::Zero(dim); }
  Vec point;
};

struct SegmentImpl final : Impl {
  SegmentImpl(const Vec& a, const Vec& b)
      : Impl(static_cast<int>(a.size()), 1.0, Smoothness::c_infinity), from(a), to(b) {}
  Vec position(double t) const override { return from + t * (to - from); }
  Vec velocity(double, Side) const override { return to - from; }
  std::optional<Vec> acceleration(double, Side) const override { return Vec::Zero(dim); }
  Vec from, to;
};

struct CircleImpl final : Impl {
  CircleImpl(const Vec& c, double r, double a0, double n, const Vec& u, const Vec& w)
      : Impl(static_cast<int>(c.size()), 1.0, Smoothness::c_infinity),
        center(c), radius(r), start(a0), turns(n), e1(u), e2(w) {}
  double omega() const { return 2.0 * std::numbers::pi * turns; }
  Vec position(double t) const override {
    const double a = start + omega() * t;
    return center + radius * (std::cos(a) * e1 + std::sin(a) * e2);
  }
  Vec velocity(double t, Side) const override {
    const double a = start + omega() * t;
    return radius * omega() * (-std::sin(a) * e1 + std::cos(a) * e2);
  }
  std::optional<Vec> acceleration(double t, Side) const override {
    const double a = start + omega() * t;
    const double w2 = omega() * omega();
    return Vec(-radius * w2 * (std::cos(a) * e1 + std::sin(a) * e2));
  }
  Vec center;
  double radius, start, turns;
  Vec e1, e2;
};

struct CompositeImpl final : Impl {
  CompositeImpl(std::vector<Curve> p, std::vector<double> dur, Smoothness s)
      : Impl(p.front().dim(), 0.0, s), parts(std::move(p)), durations(std::move(dur)) {
    offsets.push_back(0.0);
    for (double d : durations) offsets.push_back(offsets.back() + d);
    t_end = offsets.back();
  }

  std::size_t piece(double t, Side side) const {
    const std::size_t n = parts.size();
    if (side == Side::right) {
      const auto it = std::upper_bound(offsets.begin(), offsets.end() - 1, t);
      const std::ptrdiff_t i = (it - offsets.begin()) - 1;
      return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, n - 1));
    }
    const auto it = std::lower_bound(offsets.begin() + 1, offsets.end(), t);
    const std::ptrdiff_t i = it - (offsets.begin() + 1);
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, n - 1));
  }
  double local(std::size_t i, double t) const {
    return (t - offsets[i]) / durations[i] * parts[i].t_end();
  }
  double scale(std::size_t i) const { return parts[i].t_end() / durations[i]; }

  Vec position(double t) const override {
    const std::size_t i = piece(t, Side::right);
    return parts[i].position(local(i, t));
  }
  Vec velocity(double t, Side side) const override {
    const std::size_t i = piece(t, side);
    return parts[i].velocity(local(i, t), side) * scale(i);
  }
  std::optional<Vec> acceleration(double t, Side side) const override {
    const std::size_t i = piece(t, side);
    auto a = parts[i].acceleration(local(i, t), side);
    if (!a) return std::nullopt;
    return Vec(*a * (scale(i) * scale(i)));
  }
  std::vector<double> breakpoints() const override {
    std::vector<double> out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i > 0) out.push_back(offsets[i]);
      for (double b : parts[i].breakpoints()) {
        out.push_back(offsets[i] + b / parts[i].t_end() * durations[i]);
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<Curve> parts;
  std::vector<double> durations;
  std::vector<double> offsets;
};

struct HermiteImpl final : Impl {
  HermiteImpl(std::vector<Vec> p, std::vector<Vec> m)
      : Impl(static_cast<int>(p.front().size()), static_cast<double>(p.size() - 1), Smoothness::c1),
        points(std::move(p)), tangents(std::move(m)) {}

  std::size_t piece(double t, Side side) const {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(points.size()) - 1;
    std::ptrdiff_t k = static_cast<std::ptrdiff_t>(std::floor(t));
    if (side == Side::left && static_cast<double>(k) == t) --k;
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(k, 0, n - 1));
  }

  Vec position(double t) const override {
    const std::size_t k = piece(t, Side::right);
    const double u = t - static_cast<double>(k);
    const double u2 = u * u, u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * points[k] + (u3 - 2 * u2 + u) * tangents[k] +
           (-2 * u3 + 3 * u2) * points[k + 1] + (u3 - u2) * tangents[k + 1];
  }
  Vec velocity(double t, Side side) const override {
    const std::size_t k = piece(t, side);
    const double u = t - static_cast<double>(k);
    const double u2 = u * u;
    return (6 * u2 - 6 * u) * points[k] + (3 * u2 - 4 * u + 1) * tangents[k] +
           (-6 * u2 + 6 * u) * points[k + 1] + (3 * u2 - 2 * u) * tangents[k + 1];
  }
  std::optional<Vec> acceleration(double t, Side side) const override {
    const std::size_t k = piece(t, side);
    const double u = t - static_cast<double>(k);
    return Vec((12 * u - 6) * points[k] + (6 * u - 4) * tangents[k] + (-12 * u + 6) * points[k + 1] +
               (6 * u - 2) * tangents[k + 1]);
  }
  std::vector<double> breakpoints() const override {
    std::vector<double> out;
    for (std::size_t k = 1; k + 1 < points.size(); ++k) out.push_back(static_cast<double>(k));
    return out;
  }

  std::vector<Vec> points;
  std::vector<Vec> tangents;
};

struct FunctionImpl final : Impl {
  FunctionImpl(int d, double end, Smoothness s, std::function<Vec(double)> p,
               std::function<Vec(double)> v, std::function<Vec(double)> a)
      : Impl(d, end, s), pos(std::move(p)), vel(std::move(v)), acc(std::move(a)) {}
  Vec position(double t) const override { return pos(t); }
  Vec velocity(double t, Side) const override { return vel(t); }
  std::optional<Vec> acceleration(double t, Side) const override {
    if (!acc) return std::nullopt;
    return acc(t);
  }
  std::function<Vec(double)> pos, vel, acc;
};

struct ReparamImpl final : Impl {
  ReparamImpl(Curve c, std::function<double(double)> p, std::function<double(double)> dp,
              std::function<double(double)> ddp, double end)
      : Impl(c.dim(), end, std::min(c.smoothness(), Smoothness::c1)),
        base(std::move(c)), phi(std::move(p)), dphi(std::move(dp)), ddphi(std::move(ddp)) {}
  Vec position(double t) const override { return base.position(phi(t)); }
  Vec velocity(double t, Side side) const override { return base.velocity(phi(t), side) * dphi(t); }
  std::optional<Vec> acceleration(double t, Side side) const override {
    auto a = base.acceleration(phi(t), side);
    if (!a || !ddphi) return std::nullopt;
    const double d1 = dphi(t);
    return Vec(*a * (d1 * d1) + base.velocity(phi(t), side) * ddphi(t));
  }
  std::vector<double> breakpoints() const override {
    std::vector<double> out;
    for (double b : base.breakpoints()) {
      double lo = 0.0, hi = t_end;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * t_end; ++it) {
        const double mid = 0.5 * (lo + hi);
        (phi(mid) < b ? lo : hi) = mid;
      }
      out.push_back(0.5 * (lo + hi));
    }
    return out;
  }
  Curve base;
  std::function<double(double)> phi, dphi, ddphi;
};

}  // namespace

int Curve::dim() const { return impl_->dim; }
double Curve::t_end() const { return impl_->t_end; }
Smoothness Curve::smoothness() const { return impl_->smoothness; }
Vec Curve::position(double t) const { return impl_->position(t); }
Vec Curve::velocity(double t, Side side) const { return impl_->velocity(t, side); }
std::optional<Vec> Curve::acceleration(double t, Side side) const {
  return impl_->acceleration(t, side);
}
std::vector<double> Curve::breakpoints() const { return impl_->breakpoints(); }

Curve Curve::reparameterized(std::function<double(double)> phi, std::function<double(double)> dphi,
                             std::function<double(double)> ddphi, double new_t_end) const {
  return Curve(std::make_shared<ReparamImpl>(*this, std::move(phi), std::move(dphi),
                                             std::move(ddphi), new_t_end));
}

Curve Curve::constant(const Vec& point, double t_end) {
  return Curve(std::make_shared<ConstantImpl>(point, t_end));
}

Curve Curve::segment(const Vec& from, const Vec& to) {
  if (from.size() != to.size()) throw PreconditionError("dimension", "segment endpoints differ in dimension");
  return Curve(std::make_shared<SegmentImpl>(from, to));
}

Curve Curve::circle(const Vec& center, double radius, double start_angle, double turns,
                    const Vec& e1, const Vec& e2) {
  if (!(radius > 0.0)) throw PreconditionError("circle", "circle radius must be positive");
  if (std::abs(e1.norm() - 1.0) > 1e-12 || std::abs(e2.norm() - 1.0) > 1e-12 ||
      std::abs(e1.dot(e2)) > 1e-12) {
    throw PreconditionError("circle", "circle plane axes must be orthonormal");
  }
  return Curve(std::make_shared<CircleImpl>(center, radius, start_angle, turns, e1, e2));
}

Curve Curve::composite(std::vector<Curve> parts, std::vector<double> durations) {
  if (parts.empty() || parts.size() != durations.size()) {
    throw PreconditionError("composite", "composite curve needs one duration per part");
  }
  Smoothness s = Smoothness::c_infinity;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (!(durations[i] > 0.0)) throw PreconditionError("composite", "durations must be positive");
    if (parts[i].dim() != parts[0].dim()) throw PreconditionError("dimension", "parts differ in dimension");
    s = std::min(s, parts[i].smoothness());
  }
  double scale = 1.0;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const Vec a = parts[i - 1].position(parts[i - 1].t_end());
    const Vec b = parts[i].position(0.0);
    scale = std::max({scale, a.norm(), b.norm()});
    if ((a - b).norm() > 1e-9 * scale) {
      throw PreconditionError("composite", "composite parts must join continuously");
    }
  }
  auto impl = std::make_shared<CompositeImpl>(std::move(parts), std::move(durations), s);
  Curve c(impl);
  // Junctions decide the class of the whole: C0 on a velocity jump, else at most C1.
  if (impl->parts.size() > 1) {
    impl->smoothness = std::min(impl->smoothness, Smoothness::c1);
    if (c.junction_velocity_jump() > 1e-9 * (1.0 + scale)) impl->smoothness = Smoothness::c0;
  }
  return c;
}

Curve Curve::hermite(std::vector<Vec> points, std::vector<Vec> tangents) {
  if (points.size() < 2 || points.size() != tangents.size()) {
    throw PreconditionError("hermite", "Hermite curve needs >= 2 points with one tangent each");
  }
  return Curve(std::make_shared<HermiteImpl>(std::move(points), std::move(tangents)));
}

Curve Curve::from_functions(int dim, double t_end, Smoothness smoothness,
                            std::function<Vec(double)> position, std::function<Vec(double)> velocity,
                            std::function<Vec(double)> acceleration) {
  if (!position || !velocity) throw PreconditionError("curve", "curve needs position and velocity");
  return Curve(std::make_shared<FunctionImpl>(dim, t_end, smoothness, std::move(position),
                                              std::move(velocity), std::move(acceleration)));
}

double Curve::derivative_mismatch(int probes) const {
  const double end = t_end();
  const double h = 1e-6 * end;
  const std::vector<double> breaks = breakpoints();
  double worst = 0.0;
  for (int i = 0; i < probes; ++i) {
    const double t = end * (i + 0.5) / probes;
    const bool near_break = std::any_of(breaks.begin(), breaks.end(),
                                        [&](double b) { return std::abs(b - t) < 2 * h; });
    if (near_break) continue;
    const Vec v = velocity(t);
    const Vec fd = (position(t + h) - position(t - h)) / (2 * h);
    worst = std::max(worst, (v - fd).norm() / (1.0 + v.norm()));
  }
  return worst;
}

double Curve::junction_velocity_jump() const {
  double worst = 0.0;
  for (double b : breakpoints()) {
    worst = std::max(worst, (velocity(b, Side::left) - velocity(b, Side::right)).norm());
  }
  return worst;
}

Vec curve_acceleration(const Curve& c, double t) {
  if (auto a = c.acceleration(t)) return *a;
  const auto central = [&](double h) {
    return Vec((c.velocity(t + h) - c.velocity(t - h)) / (2.0 * h));
  };
  const double h = 1e-4 * std::max(1.0, c.t_end());
  // Richardson: (4 D(h/2) - D(h)) / 3 cancels the h^2 term.
  return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

Curve planar_circle_through(const Vec& start, const Vec& center, double turns) {
  if (start.size() != 2 || center.size() != 2) {
    throw PreconditionError("dimension", "planar circle preset needs d = 2");
  }
  const Vec rel = start - center;
  Vec e1(2), e2(2);
  e1 << 1.0, 0.0;
  e2 << 0.0, 1.0;
  return Curve::circle(center, rel.norm(), std::atan2(rel(1), rel(0)), turns, e1, e2);
}

}  // namespace snake

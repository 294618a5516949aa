#include "snake/word.hpp"

#include "snake/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace snake {

namespace {

// psi(x) = exp(-1/x) and its derivatives, zero for x <= 0.
double psi0(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }
double psi1(double x) { return x > 0.0 ? std::exp(-1.0 / x) / (x * x) : 0.0; }
double psi2(double x) {
  if (!(x > 0.0)) return 0.0;
  const double x2 = x * x;
  return std::exp(-1.0 / x) * (1.0 / (x2 * x2) - 2.0 / (x2 * x));
}

struct WordCurve {
  Word word;
  Configuration z0;
  std::vector<MobiusElement> prefix;  // prefix[i] = product of the first i letters

  WordCurve(Word w, Configuration z) : word(std::move(w)), z0(std::move(z)) {
    prefix.push_back(MobiusElement::identity(z0.dim()));
    for (const WordLetter& l : word) prefix.push_back(boost(l.v, l.lambda) * prefix.back());
  }

  int letters() const { return static_cast<int>(word.size()); }

  // Active letter and local coordinate at time t.
  std::pair<int, double> locate(double t) const {
    const double rt = letters() * std::clamp(t, 0.0, 1.0);
    const int i = std::clamp(static_cast<int>(std::floor(rt)), 0, letters() - 1);
    return {i, rt - i};
  }

  MobiusElement group(double t) const {
    const auto [i, x] = locate(t);
    return boost(word[i].v, smoothstep(x) * word[i].lambda) * prefix[i];
  }

  kernels::Moments moments(double t) const {
    return kernels::moments(kernels::act(group(t).matrix(), z0.nodes()), z0.weights());
  }

  Vec position(double t) const { return moments(t).first; }

  Vec velocity(double t) const {
    const auto [i, x] = locate(t);
    const kernels::Moments m = moments(t);
    const int d = z0.dim();
    const Mat M = z0.length() * Mat::Identity(d, d) - m.second;
    return M * word[i].v * (word[i].lambda * letters() * smoothstep_derivative(x));
  }

  Vec acceleration(double t) const {
    const auto [i, x] = locate(t);
    const int d = z0.dim();
    const Mat pts = kernels::act(group(t).matrix(), z0.nodes());
    const kernels::Moments m = kernels::moments(pts, z0.weights());
    const Mat M = z0.length() * Mat::Identity(d, d) - m.second;
    const Vec& v = word[i].v;
    const double r = letters();
    const double alpha = word[i].lambda * r * smoothstep_derivative(x);
    Vec sum = Vec::Zero(d);
    const double vv = v.squaredNorm();
    for (Eigen::Index k = 0; k < pts.cols(); ++k) {
      const Vec z = pts.col(k);
      const double c = z.dot(v);
      sum += z0.weights()(k) * ((v - c * z) * c + z * (vv - c * c));
    }
    return word[i].lambda * r * r * smoothstep_second_derivative(x) * (M * v) - alpha * alpha * sum;
  }
};

}  // namespace

double smoothstep(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = psi0(x);
  const double b = psi0(1.0 - x);
  return a / (a + b);
}

double smoothstep_derivative(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double a = psi0(x), b = psi0(1.0 - x);
  const double a1 = psi1(x), b1 = psi1(1.0 - x);
  const double D = a + b;
  return (a1 * b + a * b1) / (D * D);
}

double smoothstep_second_derivative(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double a = psi0(x), b = psi0(1.0 - x);
  const double a1 = psi1(x), b1 = psi1(1.0 - x);
  const double a2 = psi2(x), b2 = psi2(1.0 - x);
  const double D = a + b;
  const double N = a1 * b + a * b1;
  const double dN = a2 * b - a * b2;
  const double dD = a1 - b1;
  return (dN * D - 2.0 * N * dD) / (D * D * D);
}

MobiusElement group_from_word(const Word& word, int dim, double t) {
  if (word.empty()) return MobiusElement::identity(dim);
  for (const WordLetter& l : word) {
    if (l.v.size() != dim) throw PreconditionError("dimension", "word letter has the wrong dimension");
  }
  return WordCurve(word, Configuration::piecewise_constant(Partition({0.0, 1.0}), {Vec::Unit(dim, 0)}))
      .group(t);
}

WordLoop smooth_loop_from_word(const Word& word, const Configuration& z0, int samples,
                               double closed_tolerance) {
  if (samples < 1) throw PreconditionError("samples", "need at least one sample interval");
  if (is_lined(z0, settings().lined_tolerance)) {
    throw PreconditionError("lined", "word loops need a non-lined configuration");
  }
  for (const WordLetter& l : word) {
    if (l.v.size() != z0.dim()) {
      throw PreconditionError("dimension", "word letter has the wrong dimension");
    }
  }
  const Vec f0 = endpoint(z0);
  if (word.empty()) {
    WordLoop out{Curve::constant(f0, 1.0), {}, true};
    for (int k = 0; k <= samples; ++k) {
      out.trajectory.times.push_back(static_cast<double>(k) / samples);
      out.trajectory.group_path.push_back(MobiusElement::identity(z0.dim()));
      out.trajectory.config_path.push_back(z0);
      out.trajectory.defects.push_back(0.0);
    }
    out.trajectory.stop_time = 1.0;
    return out;
  }

  auto wc = std::make_shared<const WordCurve>(word, z0);
  Curve curve = Curve::from_functions(
      z0.dim(), 1.0, Smoothness::c_infinity, [wc](double t) { return wc->position(t); },
      [wc](double t) { return wc->velocity(t); }, [wc](double t) { return wc->acceleration(t); });

  LiftResult traj;
  for (int k = 0; k <= samples; ++k) {
    const double t = static_cast<double>(k) / samples;
    const MobiusElement g = wc->group(t);
    traj.times.push_back(t);
    traj.group_path.push_back(g);
    traj.config_path.push_back(act(g, z0));
    traj.defects.push_back(0.0);
  }
  traj.stop_time = 1.0;
  traj.steps = static_cast<std::size_t>(samples);
  const bool closed = (endpoint(traj.config_path.back()) - f0).norm() <= closed_tolerance;
  return WordLoop{std::move(curve), std::move(traj), closed};
}

Word close_word(const Word& word, const Configuration& z0, double tolerance) {
  const int d = z0.dim();
  const Vec target = endpoint(z0);
  const Configuration z1 = act(group_from_word(word, d), z0);
  const auto residual = [&](const Vec& u) { return Vec(endpoint(act(boost(u, 1.0), z1)) - target); };

  Vec u = Vec::Zero(d);
  Vec r = residual(u);
  constexpr double kEps = 1e-7;
  for (int it = 0; it < 50 && r.norm() > tolerance; ++it) {
    Mat J(d, d);
    for (int j = 0; j < d; ++j) {
      const Vec e = Vec::Unit(d, j) * kEps;
      J.col(j) = (residual(u + e) - residual(u - e)) / (2.0 * kEps);
    }
    Vec du = J.colPivHouseholderQr().solve(-r);
    // Damped step: halve until the residual decreases.
    double scale = 1.0;
    Vec trial = residual(u + du);
    while (trial.norm() >= r.norm() && scale > 1e-6) {
      scale *= 0.5;
      trial = residual(u + scale * du);
    }
    u += scale * du;
    r = trial;
  }
  if (!(r.norm() <= tolerance)) {
    throw NumericalError("no_closure", "could not close the word: residual " + std::to_string(r.norm()));
  }
  Word out = word;
  out.push_back(WordLetter{u, 1.0});
  return out;
}

}  // namespace snake

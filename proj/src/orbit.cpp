#include "snake/orbit.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace snake {

namespace {

constexpr int kGrid = 64;
constexpr int kProbeS = 32;
constexpr std::size_t kMaxWitnessPoints = 1024;
constexpr double kWitnessEndpointTolerance = 1e-6;

Vec grid_values(const Configuration& z) {
  const int d = z.dim();
  Vec out(kGrid * d);
  for (int j = 0; j < kGrid; ++j) {
    out.segment(j * d, d) = z.value_at((j + 0.5) * z.length() / kGrid);
  }
  return out;
}

OrbitClass classify(const Configuration& z0, int k) {
  if (k == 0) return distinct_value_count(z0, 2) == 1 ? OrbitClass::point : OrbitClass::bivalued;
  return z0.dim() == 2 ? OrbitClass::circles : OrbitClass::stiefel;
}

OrbitReport base_report(const Configuration& z0) {
  OrbitReport r{z0, {z0}, {}, -1, 0, 0, {}, OrbitClass::point, 0.0};
  r.spdim = spherical_dimension(z0, 1e-9);
  r.expected_dim = expected_orbit_dimension(z0.dim(), r.spdim);
  r.classification = classify(z0, r.spdim);
  r.component_witnesses.push_back(ComponentWitness{z0, true});
  return r;
}

struct LoopOutcome {
  std::optional<Configuration> config;
  std::string code;
  std::string message;
};

LoopOutcome lift_loop(const Configuration& z0, const Curve& loop, const LiftOptions& opts) {
  try {
    return LoopOutcome{holonomy(z0, loop, opts), {}, {}};
  } catch (const PreconditionError& e) {
    return LoopOutcome{std::nullopt, e.code(), e.what()};
  } catch (const NumericalError& e) {
    return LoopOutcome{std::nullopt, e.code(), e.what()};
  }
}

OrbitReport merge(const Configuration& z0, std::vector<LoopOutcome>& outcomes) {
  OrbitReport r = base_report(z0);
  const Vec f0 = endpoint(z0);
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (!outcomes[i].config) {
      r.failures.push_back(LoopFailure{i, outcomes[i].code, outcomes[i].message});
      continue;
    }
    const Configuration& z = *outcomes[i].config;
    r.max_fiber_error = std::max(r.max_fiber_error, (endpoint(z) - f0).norm());
    r.points.push_back(z);
    r.component_witnesses.push_back(ComponentWitness{z, std::nullopt});
  }
  return r;
}

RankEstimate rank_of(const Configuration& z0, const std::vector<LoopOutcome>& outcomes) {
  const Vec base = grid_values(z0);
  Mat disp(base.size(), 0);
  for (const LoopOutcome& o : outcomes) {
    if (!o.config) {
      throw NumericalError(o.code.empty() ? "lift_failed" : o.code,
                           "probe loop failed: " + o.message);
    }
    disp.conservativeResize(Eigen::NoChange, disp.cols() + 1);
    disp.col(disp.cols() - 1) = grid_values(*o.config) - base;
  }
  Eigen::JacobiSVD<Mat> svd(disp);
  RankEstimate r;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    r.singular_values.push_back(svd.singularValues()(i));
  }
  r.rank = rank_from_gap(r.singular_values);
  return r;
}

void require_positive_spdim(const Configuration& z0) {
  if (spherical_dimension(z0, 1e-9) == 0) {
    throw PreconditionError("spdim_zero",
                            "configuration takes one or two values; use the bivalued analysis");
  }
}

}  // namespace

const char* to_string(OrbitClass c) {
  switch (c) {
    case OrbitClass::stiefel: return "stiefel";
    case OrbitClass::circles: return "circles";
    case OrbitClass::bivalued: return "bivalued";
    case OrbitClass::point: return "point";
  }
  return "unknown";
}

int expected_orbit_dimension(int d, int k) {
  int sum = 0;
  for (int i = 1; i <= k + 1; ++i) sum += d - i;
  return sum;
}

int rank_from_gap(const std::vector<double>& sv, double ratio) {
  if (sv.empty() || !(sv.front() > 0.0)) return 0;
  for (std::size_t i = 0; i + 1 < sv.size(); ++i) {
    if (!(sv[i + 1] > 0.0) || sv[i] / sv[i + 1] > ratio) return static_cast<int>(i + 1);
  }
  return static_cast<int>(sv.size());
}

std::vector<Curve> small_loops(const Configuration& z0, double eps, int count, unsigned seed) {
  const int d = z0.dim();
  const Vec b = endpoint(z0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  std::vector<Curve> loops;
  loops.reserve(count);
  for (int i = 0; i < count; ++i) {
    Mat a(d, 2);
    for (int r = 0; r < d; ++r) {
      a(r, 0) = n01(rng);
      a(r, 1) = n01(rng);
    }
    const Mat q = a.householderQr().householderQ() * Mat::Identity(d, 2);
    const Vec e1 = q.col(0);
    const Vec e2 = q.col(1);
    loops.push_back(Curve::circle(b - eps * e1, eps, 0.0, 1.0, e1, e2));
  }
  return loops;
}

namespace serial {

OrbitReport orbit_sample(const Configuration& z0, const std::vector<Curve>& loops,
                         const LiftOptions& opts) {
  std::vector<LoopOutcome> outcomes;
  outcomes.reserve(loops.size());
  for (const Curve& loop : loops) outcomes.push_back(lift_loop(z0, loop, opts));
  return merge(z0, outcomes);
}

RankEstimate orbit_tangent_rank(const Configuration& z0, double eps, int probes, unsigned seed,
                                const LiftOptions& opts) {
  require_positive_spdim(z0);
  const std::vector<Curve> loops = small_loops(z0, eps, probes, seed);
  std::vector<LoopOutcome> outcomes;
  for (const Curve& loop : loops) outcomes.push_back(lift_loop(z0, loop, opts));
  return rank_of(z0, outcomes);
}

}  // namespace serial

namespace {

std::vector<LoopOutcome> lift_all_parallel(const Configuration& z0, const std::vector<Curve>& loops,
                                           const LiftOptions& opts) {
  std::vector<LoopOutcome> outcomes(loops.size());
  const auto n = static_cast<std::ptrdiff_t>(loops.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    outcomes[static_cast<std::size_t>(i)] = lift_loop(z0, loops[static_cast<std::size_t>(i)], opts);
  }
  return outcomes;
}

}  // namespace

OrbitReport orbit_sample(const Configuration& z0, const std::vector<Curve>& loops,
                         const LiftOptions& opts) {
  std::vector<LoopOutcome> outcomes = lift_all_parallel(z0, loops, opts);
  return merge(z0, outcomes);
}

RankEstimate orbit_tangent_rank(const Configuration& z0, double eps, int probes, unsigned seed,
                                const LiftOptions& opts) {
  require_positive_spdim(z0);
  const std::vector<Curve> loops = small_loops(z0, eps, probes, seed);
  return rank_of(z0, lift_all_parallel(z0, loops, opts));
}

Mat reference_frame(const Configuration& z0, double tol) {
  const GramDefectMatrix M = gram_defect(z0);
  const int d = z0.dim();
  const Mat G = z0.length() * Mat::Identity(d, d) - M.matrix();
  Eigen::SelfAdjointEigenSolver<Mat> es(G);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = d - 1; i >= 0; --i) {
    if (es.eigenvalues()(i) > tol * z0.length()) keep.push_back(i);
  }
  Mat frame(d, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    frame.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(keep[j]);
  }
  return frame;
}

StiefelFit stiefel_frame(const Configuration& z, const Configuration& z0, double tol) {
  if (endpoint(z).norm() > tol) {
    throw PreconditionError("not_at_origin", "Stiefel frames are defined on the fiber over 0");
  }
  if (z.nodes().cols() != z0.nodes().cols() || z.dim() != z0.dim()) {
    throw PreconditionError("partition_mismatch", "configurations do not share a partition");
  }
  const int d = z0.dim();
  const Mat& x = z.nodes();
  const Mat& y = z0.nodes();
  const Vec& w = z0.weights();
  const Mat H = x * w.asDiagonal() * y.transpose();
  Eigen::JacobiSVD<Mat> svd(H, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat D = Mat::Identity(d, d);
  D(d - 1, d - 1) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  const Mat R = svd.matrixU() * D * svd.matrixV().transpose();
  const double res2 = ((x - R * y).colwise().squaredNorm().transpose().cwiseProduct(w)).sum();
  StiefelFit fit{R * reference_frame(z0), R, std::sqrt(std::max(0.0, res2) / z0.length())};
  if (!(fit.residual <= tol)) {
    throw NumericalError("no_rotation_fit",
                         "no rotation of the reference fits: residual " + std::to_string(fit.residual));
  }
  return fit;
}

WitnessPath connectivity_probe(const Configuration& z0, const Configuration& z, const Word& word,
                               const LiftOptions& opts, double max_gap) {
  if (sedentariness(z0) > 0.0) {
    throw PreconditionError("not_nomadic", "connectivity probes need a nomadic configuration");
  }
  const WordLoop wl = smooth_loop_from_word(word, z0);
  if (!wl.closed) throw PreconditionError("not_closed", "the word does not generate a closed loop");
  const Curve gamma = wl.curve;
  const Vec base = gamma.position(0.0);

  const auto family = [&](double s) {
    return Curve::from_functions(
        gamma.dim(), gamma.t_end(), gamma.smoothness(),
        [=](double t) { return Vec((1.0 - s) * base + s * gamma.position(t)); },
        [=](double t) { return Vec(s * gamma.velocity(t)); },
        [=](double t) { return Vec(s * curve_acceleration(gamma, t)); });
  };

  WitnessPath out;
  std::vector<LoopOutcome> outcomes(kProbeS);
  std::vector<double> grid(kProbeS);
  for (int j = 0; j < kProbeS; ++j) grid[j] = static_cast<double>(j) / (kProbeS - 1);
#pragma omp parallel for schedule(dynamic, 1)
  for (int j = 0; j < kProbeS; ++j) {
    outcomes[j] = (j == 0) ? LoopOutcome{z0, {}, {}} : lift_loop(z0, family(grid[j]), opts);
  }
  for (int j = 0; j < kProbeS; ++j) {
    if (!outcomes[j].config) {
      out.failed_at = grid[j];
      out.failure = outcomes[j].message;
      return out;
    }
    out.s.push_back(grid[j]);
    out.points.push_back(*outcomes[j].config);
  }

  // Refine by bisection where neighbours are too far apart.
  std::size_t i = 0;
  while (i + 1 < out.s.size()) {
    const double gap = sup_distance(out.points[i], out.points[i + 1]);
    const double width = out.s[i + 1] - out.s[i];
    if (gap <= max_gap || width < 1e-6 || out.s.size() >= kMaxWitnessPoints) {
      out.max_gap = std::max(out.max_gap, gap);
      ++i;
      continue;
    }
    const double mid = 0.5 * (out.s[i] + out.s[i + 1]);
    LoopOutcome o = lift_loop(z0, family(mid), opts);
    if (!o.config) {
      out.failed_at = mid;
      out.failure = o.message;
      return out;
    }
    out.s.insert(out.s.begin() + static_cast<std::ptrdiff_t>(i) + 1, mid);
    out.points.insert(out.points.begin() + static_cast<std::ptrdiff_t>(i) + 1, *o.config);
  }
  out.endpoint_error = sup_distance(out.points.back(), z);
  out.complete = out.max_gap <= max_gap && out.endpoint_error <= kWitnessEndpointTolerance;
  return out;
}

}  // namespace snake

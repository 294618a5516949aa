#pragma once

// Sampling and analysis of holonomy orbits horb(z0): the set of final
// configurations of lifts of loops based at f(z0).

#include "snake/lift.hpp"
#include "snake/word.hpp"

#include <optional>
#include <string>
#include <vector>

namespace snake {

enum class OrbitClass { stiefel, circles, bivalued, point };

const char* to_string(OrbitClass c);

/// sum_{i=1}^{k+1} (d - i)
int expected_orbit_dimension(int d, int k);

struct ComponentWitness {
  Configuration point;
  std::optional<bool> connected_to_base;  // empty: unknown
};

struct LoopFailure {
  std::size_t loop;
  std::string code;
  std::string message;
};

struct OrbitReport {
  Configuration base;
  std::vector<Configuration> points;  // base first, then one per successful loop
  std::vector<LoopFailure> failures;
  int estimated_rank = -1;            // -1: not estimated
  int expected_dim = 0;
  int spdim = 0;
  std::vector<ComponentWitness> component_witnesses;
  OrbitClass classification = OrbitClass::point;
  double max_fiber_error = 0.0;       // max |f(point) - f(base)|
};

/// Lifts every loop (OpenMP over loops). Per-loop failures are recorded.
OrbitReport orbit_sample(const Configuration& z0, const std::vector<Curve>& loops,
                         const LiftOptions& opts = {});

/// Circles of radius eps through f(z0) in random 2-planes.
std::vector<Curve> small_loops(const Configuration& z0, double eps, int count, unsigned seed);

struct RankEstimate {
  int rank = 0;
  std::vector<double> singular_values;
};

/// Numerical rank of the holonomy displacements of `probes` small loops of
/// radius eps, sampled on a 64-point grid of [0, L]; the rank is taken at
/// the first singular value gap with ratio > 100.
RankEstimate orbit_tangent_rank(const Configuration& z0, double eps, int probes, unsigned seed = 1,
                                const LiftOptions& opts = {});

namespace serial {
OrbitReport orbit_sample(const Configuration& z0, const std::vector<Curve>& loops,
                         const LiftOptions& opts = {});
RankEstimate orbit_tangent_rank(const Configuration& z0, double eps, int probes,
                                unsigned seed = 1, const LiftOptions& opts = {});
}  // namespace serial

/// Rank at the first gap sigma_i / sigma_{i+1} > ratio (0 for all-zero input).
int rank_from_gap(const std::vector<double>& singular_values, double ratio = 100.0);

struct StiefelFit {
  Mat frame;      // d x (k+1), orthonormal
  Mat rotation;   // d x d, det +1
  double residual = 0.0;
};

/// Orthonormal basis of the span of the values of z0 (eigenvectors of the
/// Gram matrix with nonzero eigenvalues).
Mat reference_frame(const Configuration& z0, double tol = 1e-9);

/// Fits z = R z0 by weighted orthogonal Procrustes and returns R times the
/// reference frame. Throws PreconditionError("not_at_origin") when
/// |f(z)| > tol and NumericalError("no_rotation_fit") when the weighted RMS
/// residual exceeds tol.
StiefelFit stiefel_frame(const Configuration& z, const Configuration& z0, double tol = 1e-6);

struct WitnessPath {
  std::vector<double> s;               // increasing from 0 to 1
  std::vector<Configuration> points;   // holonomy of gamma_s
  bool complete = false;
  double max_gap = 0.0;                // max sup_distance between neighbours
  double endpoint_error = 0.0;         // sup_distance(points.back(), z)
  std::optional<double> failed_at;
  std::string failure;
};

/// Lifts the shrinking family gamma_s(t) = (1 - s) gamma(0) + s gamma(t) of
/// the word loop on a 32-point s grid, refining until neighbours are within
/// `max_gap`. Complete when every gap is within `max_gap` and the s = 1
/// point is z within 1e-6. Rejects non-nomadic z0 ("not_nomadic").
WitnessPath connectivity_probe(const Configuration& z0, const Configuration& z, const Word& word,
                               const LiftOptions& opts = {}, double max_gap = 0.2);

}  // namespace snake

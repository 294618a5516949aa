#pragma once

// Scene files: a snake, a snout path and solver options in one YAML
// document. Parsing validates; serialization writes every field, so
// parse(serialize(parse(x))) == parse(x).

#include "snake/curve.hpp"
#include "snake/lift.hpp"

#include <string>
#include <vector>

namespace snake {

using Point = std::vector<double>;

struct SnakeSpec {
  /// half_circle | polygon | bivalued
  std::string kind = "half_circle";
  // polygon
  std::vector<double> lengths;
  std::vector<Point> values;
  // bivalued: p on the first length_p of arc length, then q
  Point p, q;
  double length_p = 0.0;
  double length_q = 0.0;
  /// Parallel-transport the snake to this snout before anything else.
  Point recenter;

  bool operator==(const SnakeSpec&) const = default;
};

struct CurveSpec {
  /// circle | segment | composite | spline | drag | word | constant
  std::string kind = "circle";
  // circle: center + radius (cos a, sin a) in span(e1, e2),
  // a = start_angle + 2 pi turns t; start_angle absent = start at the snout
  Point center;
  double radius = 0.0;
  bool start_at_snout = true;
  double start_angle = 0.0;
  double turns = 1.0;
  Point e1, e2;
  // segment (from empty = the snout)
  Point from, to;
  // composite
  std::vector<CurveSpec> parts;
  std::vector<double> durations;
  // spline: Hermite through points at t = 0, 1, ...; tangents empty = Catmull-Rom
  std::vector<Point> points;
  std::vector<Point> tangents;
  // drag: the steering smoothing of target points starting at the snout
  double max_speed = 0.0;  // 0 = unlimited
  // word
  std::vector<Point> letters;        // v_i
  std::vector<double> lambdas;       // lambda_i
  bool close = true;
  // constant
  double duration = 1.0;

  bool operator==(const CurveSpec&) const = default;
};

struct SolverSpec {
  double step = 1e-3;
  int renormalize_every = 16;
  double sigma_min = 1e-6;
  double tolerance = 1e-6;
  bool enforce_sedentary_ball = true;
  bool allow_singular = false;
  bool snap = false;
  int output_stride = 1;

  bool operator==(const SolverSpec&) const = default;
  LiftOptions options() const;
};

struct OutputSpec {
  int turns = 1;
  int frames = 0;        // SVG frames per lift (0 = none)
  unsigned seed = 1;
  int orbit_loops = 16;
  double orbit_epsilon = 1e-2;  // relative to L
  int orbit_probes = 12;
  int window_begin = -1;        // turns argmin window, -1 = N/4
  int window_end = -1;          // -1 = N

  bool operator==(const OutputSpec&) const = default;
};

struct Scene {
  std::string name = "scene";
  int dim = 2;
  SnakeSpec snake;
  CurveSpec curve;
  SolverSpec solver;
  OutputSpec output;

  bool operator==(const Scene&) const = default;
};

/// Throws PreconditionError("scene") with a message naming the field.
Scene parse_scene(const std::string& yaml);
Scene load_scene(const std::string& path);
std::string serialize_scene(const Scene& scene);

/// The configuration the scene describes (recentred if requested).
Configuration build_configuration(const Scene& scene);
/// The snout path, starting at `snout` where the spec leaves it implicit.
Curve build_curve(const Scene& scene, const Configuration& z0);
/// Drag smoothing shared with the steering service: C¹ Hermite through the
/// base point and the targets at t = 0, 1, ..., tangent 0 at the start and
/// the clamped chord at each target. Consecutive duplicates are dropped.
Curve drag_curve(const Vec& base, const std::vector<Vec>& targets, double max_speed);
std::vector<Vec> drag_knots(const Vec& base, const std::vector<Vec>& targets);

/// Built-in scenes: figure_a, bivalued, polygon3, planar3.
Scene preset_scene(const std::string& name);

}  // namespace snake

#include "snake/scene.hpp"

#include "snake/word.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace snake {

namespace {

[[noreturn]] void fail(const std::string& what) { throw PreconditionError("scene", what); }

Vec to_vec(const Point& p) { return Eigen::Map<const Vec>(p.data(), static_cast<Eigen::Index>(p.size())); }

template <class T>
T get(const YAML::Node& n, const char* key, const T& fallback) {
  const YAML::Node v = n[key];
  if (!v || v.IsNull()) return fallback;
  try {
    return v.as<T>();
  } catch (const YAML::Exception&) {
    fail(std::string("bad value for '") + key + "'");
  }
}

Point get_point(const YAML::Node& n, const char* key) {
  return get<Point>(n, key, Point{});
}

std::vector<Point> get_points(const YAML::Node& n, const char* key) {
  return get<std::vector<Point>>(n, key, std::vector<Point>{});
}

void require_dim(const Point& p, int d, const std::string& what) {
  if (static_cast<int>(p.size()) != d) {
    fail(what + " must have " + std::to_string(d) + " coordinates");
  }
}

CurveSpec parse_curve(const YAML::Node& n) {
  if (!n || !n.IsMap()) fail("curve must be a mapping");
  CurveSpec c;
  c.kind = get<std::string>(n, "kind", "circle");
  c.center = get_point(n, "center");
  c.radius = get<double>(n, "radius", 0.0);
  c.start_at_snout = !n["start_angle"];
  c.start_angle = get<double>(n, "start_angle", 0.0);
  c.turns = get<double>(n, "turns", 1.0);
  c.e1 = get_point(n, "e1");
  c.e2 = get_point(n, "e2");
  c.from = get_point(n, "from");
  c.to = get_point(n, "to");
  if (const YAML::Node parts = n["parts"]) {
    if (!parts.IsSequence()) fail("parts must be a list");
    for (const YAML::Node& p : parts) c.parts.push_back(parse_curve(p));
  }
  c.durations = get<std::vector<double>>(n, "durations", {});
  c.points = get_points(n, "points");
  c.tangents = get_points(n, "tangents");
  c.max_speed = get<double>(n, "max_speed", 0.0);
  c.letters = get_points(n, "letters");
  c.lambdas = get<std::vector<double>>(n, "lambdas", {});
  c.close = get<bool>(n, "close", true);
  c.duration = get<double>(n, "duration", 1.0);
  return c;
}

void validate_curve(const CurveSpec& c, int d) {
  const std::string& k = c.kind;
  if (k == "circle") {
    require_dim(c.center, d, "circle center");
    if (!c.start_at_snout && !(c.radius > 0.0)) fail("circle radius must be positive");
    if (!c.e1.empty()) require_dim(c.e1, d, "circle e1");
    if (!c.e2.empty()) require_dim(c.e2, d, "circle e2");
    if (c.e1.empty() != c.e2.empty()) fail("circle needs both e1 and e2 or neither");
    if (c.e1.empty() && d != 2) fail("circle needs e1 and e2 when d != 2");
  } else if (k == "segment") {
    if (!c.from.empty()) require_dim(c.from, d, "segment from");
    require_dim(c.to, d, "segment to");
  } else if (k == "composite") {
    if (c.parts.empty()) fail("composite needs parts");
    if (c.durations.size() != c.parts.size()) fail("composite needs one duration per part");
    for (double t : c.durations) {
      if (!(t > 0.0)) fail("composite durations must be positive");
    }
    for (const CurveSpec& p : c.parts) validate_curve(p, d);
  } else if (k == "spline") {
    if (c.points.size() < 2) fail("spline needs at least two points");
    for (const Point& p : c.points) require_dim(p, d, "spline point");
    if (!c.tangents.empty() && c.tangents.size() != c.points.size()) {
      fail("spline needs one tangent per point");
    }
    for (const Point& p : c.tangents) require_dim(p, d, "spline tangent");
  } else if (k == "drag") {
    for (const Point& p : c.points) require_dim(p, d, "drag point");
    if (c.max_speed < 0.0) fail("max_speed must be >= 0");
  } else if (k == "word") {
    if (c.letters.size() != c.lambdas.size()) fail("word needs one lambda per letter");
    for (const Point& p : c.letters) require_dim(p, d, "word letter");
  } else if (k == "constant") {
    if (!(c.duration > 0.0)) fail("constant duration must be positive");
  } else {
    fail("unknown curve kind '" + k + "'");
  }
}

void validate(const Scene& s) {
  const int d = s.dim;
  if (d < 2) fail("dimension must be >= 2");
  const SnakeSpec& n = s.snake;
  if (n.kind == "half_circle") {
    if (d != 2) fail("half_circle snake needs dimension 2");
  } else if (n.kind == "polygon") {
    if (n.lengths.empty() || n.lengths.size() != n.values.size()) {
      fail("polygon needs one length per value");
    }
    for (double l : n.lengths) {
      if (!(l > 0.0)) fail("polygon lengths must be positive");
    }
    for (const Point& v : n.values) require_dim(v, d, "polygon value");
  } else if (n.kind == "bivalued") {
    require_dim(n.p, d, "bivalued p");
    require_dim(n.q, d, "bivalued q");
    if (!(n.length_p > 0.0) || !(n.length_q > 0.0)) fail("bivalued lengths must be positive");
  } else {
    fail("unknown snake kind '" + n.kind + "'");
  }
  if (!n.recenter.empty()) require_dim(n.recenter, d, "recenter");
  validate_curve(s.curve, d);
  const SolverSpec& o = s.solver;
  if (!(o.step > 0.0) || o.renormalize_every < 1 || !(o.sigma_min > 0.0) ||
      !(o.tolerance > 0.0) || o.output_stride < 1) {
    fail("solver options must be positive");
  }
  if (s.output.turns < 0 || s.output.frames < 0 || s.output.orbit_loops < 0 ||
      s.output.orbit_probes < 1 || !(s.output.orbit_epsilon > 0.0)) {
    fail("output options out of range");
  }
}

YAML::Node emit_curve(const CurveSpec& c) {
  YAML::Node n;
  n["kind"] = c.kind;
  const auto put_point = [&](const char* key, const Point& p) {
    if (!p.empty()) n[key] = p;
  };
  if (c.kind == "circle") {
    put_point("center", c.center);
    n["radius"] = c.radius;
    if (!c.start_at_snout) n["start_angle"] = c.start_angle;
    n["turns"] = c.turns;
    put_point("e1", c.e1);
    put_point("e2", c.e2);
  } else if (c.kind == "segment") {
    put_point("from", c.from);
    put_point("to", c.to);
  } else if (c.kind == "composite") {
    for (const CurveSpec& p : c.parts) n["parts"].push_back(emit_curve(p));
    n["durations"] = c.durations;
  } else if (c.kind == "spline") {
    n["points"] = c.points;
    if (!c.tangents.empty()) n["tangents"] = c.tangents;
  } else if (c.kind == "drag") {
    n["points"] = c.points;
    n["max_speed"] = c.max_speed;
  } else if (c.kind == "word") {
    n["letters"] = c.letters;
    n["lambdas"] = c.lambdas;
    n["close"] = c.close;
  } else if (c.kind == "constant") {
    n["duration"] = c.duration;
  }
  return n;
}

bool scalar_tree(const YAML::Node& n) {
  if (n.IsScalar()) return true;
  if (!n.IsSequence()) return false;
  for (const YAML::Node& c : n) {
    if (!scalar_tree(c)) return false;
  }
  return true;
}

// Lists of numbers and lists of points in flow style, the rest in block style.
void set_flow(YAML::Node n) {
  if (n.IsSequence() && scalar_tree(n)) {
    n.SetStyle(YAML::EmitterStyle::Flow);
    return;
  }
  if (n.IsMap()) {
    for (auto kv : n) set_flow(kv.second);
  } else if (n.IsSequence()) {
    for (YAML::Node c : n) set_flow(c);
  }
}

// Keeps only the fields the kind uses, so serialization loses nothing.
CurveSpec normalized(const CurveSpec& c) {
  CurveSpec n;
  n.kind = c.kind;
  if (c.kind == "circle") {
    n.center = c.center;
    n.radius = c.radius;
    n.start_at_snout = c.start_at_snout;
    n.start_angle = c.start_at_snout ? 0.0 : c.start_angle;
    n.turns = c.turns;
    n.e1 = c.e1;
    n.e2 = c.e2;
  } else if (c.kind == "segment") {
    n.from = c.from;
    n.to = c.to;
  } else if (c.kind == "composite") {
    for (const CurveSpec& p : c.parts) n.parts.push_back(normalized(p));
    n.durations = c.durations;
  } else if (c.kind == "spline") {
    n.points = c.points;
    n.tangents = c.tangents;
  } else if (c.kind == "drag") {
    n.points = c.points;
    n.max_speed = c.max_speed;
  } else if (c.kind == "word") {
    n.letters = c.letters;
    n.lambdas = c.lambdas;
    n.close = c.close;
  } else if (c.kind == "constant") {
    n.duration = c.duration;
  }
  return n;
}

SnakeSpec normalized(const SnakeSpec& s) {
  SnakeSpec n;
  n.kind = s.kind;
  if (s.kind == "polygon") {
    n.lengths = s.lengths;
    n.values = s.values;
  } else if (s.kind == "bivalued") {
    n.p = s.p;
    n.q = s.q;
    n.length_p = s.length_p;
    n.length_q = s.length_q;
  }
  n.recenter = s.recenter;
  return n;
}

Curve circle_curve(const CurveSpec& c, const Vec& snout) {
  const int d = static_cast<int>(c.center.size());
  const Vec center = to_vec(c.center);
  Vec e1 = Vec::Unit(d, 0);
  Vec e2 = Vec::Unit(d, 1);
  if (!c.e1.empty()) {
    e1 = to_vec(c.e1).normalized();
    e2 = to_vec(c.e2);
    e2 = (e2 - e2.dot(e1) * e1).normalized();
  }
  if (!c.start_at_snout) return Curve::circle(center, c.radius, c.start_angle, c.turns, e1, e2);
  const Vec rel = snout - center;
  const double x = rel.dot(e1);
  const double y = rel.dot(e2);
  if ((rel - x * e1 - y * e2).norm() > 1e-9 * (1.0 + rel.norm())) {
    fail("circle plane does not contain the snout");
  }
  return Curve::circle(center, std::hypot(x, y), std::atan2(y, x), c.turns, e1, e2);
}

Curve spline_curve(const CurveSpec& c) {
  std::vector<Vec> pts;
  for (const Point& p : c.points) pts.push_back(to_vec(p));
  std::vector<Vec> tan;
  if (!c.tangents.empty()) {
    for (const Point& p : c.tangents) tan.push_back(to_vec(p));
  } else {
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec& a = pts[i == 0 ? 0 : i - 1];
      const Vec& b = pts[i + 1 == n ? n - 1 : i + 1];
      tan.push_back((b - a) / ((i == 0 || i + 1 == n) ? 1.0 : 2.0));
    }
  }
  return Curve::hermite(std::move(pts), std::move(tan));
}

Curve curve_from_spec(const CurveSpec& c, const Configuration& z0, const Vec& start) {
  const std::string& k = c.kind;
  if (k == "circle") return circle_curve(c, start);
  if (k == "segment") return Curve::segment(c.from.empty() ? start : to_vec(c.from), to_vec(c.to));
  if (k == "composite") {
    std::vector<Curve> parts;
    Vec cursor = start;
    for (const CurveSpec& p : c.parts) {
      parts.push_back(curve_from_spec(p, z0, cursor));
      cursor = parts.back().position(parts.back().t_end());
    }
    return Curve::composite(std::move(parts), c.durations);
  }
  if (k == "spline") return spline_curve(c);
  if (k == "drag") {
    std::vector<Vec> targets;
    for (const Point& p : c.points) targets.push_back(to_vec(p));
    return drag_curve(start, targets, c.max_speed);
  }
  if (k == "word") {
    Word w;
    for (std::size_t i = 0; i < c.letters.size(); ++i) {
      w.push_back(WordLetter{to_vec(c.letters[i]), c.lambdas[i]});
    }
    if (c.close && !w.empty()) w = close_word(w, z0);
    return smooth_loop_from_word(w, z0).curve;
  }
  return Curve::constant(start, c.duration);
}

}  // namespace

LiftOptions SolverSpec::options() const {
  LiftOptions o;
  o.step = step;
  o.renormalize_every = renormalize_every;
  o.sigma_min = sigma_min;
  o.defect_tolerance = tolerance;
  o.enforce_sedentary_ball = enforce_sedentary_ball;
  o.allow_singular = allow_singular;
  o.snap = snap;
  o.output_stride = output_stride;
  return o;
}

Scene parse_scene(const std::string& yaml) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml);
  } catch (const YAML::Exception& e) {
    fail(std::string("not valid YAML: ") + e.what());
  }
  if (!root.IsMap()) fail("scene must be a mapping");
  Scene s;
  s.name = get<std::string>(root, "name", "scene");
  s.dim = get<int>(root, "dimension", 2);

  const YAML::Node snake = root["snake"];
  if (!snake || !snake.IsMap()) fail("missing 'snake' mapping");
  s.snake.kind = get<std::string>(snake, "kind", "half_circle");
  s.snake.lengths = get<std::vector<double>>(snake, "lengths", {});
  s.snake.values = get_points(snake, "values");
  s.snake.p = get_point(snake, "p");
  s.snake.q = get_point(snake, "q");
  s.snake.length_p = get<double>(snake, "length_p", 0.0);
  s.snake.length_q = get<double>(snake, "length_q", 0.0);
  s.snake.recenter = get_point(snake, "recenter");

  if (!root["curve"]) fail("missing 'curve' mapping");
  s.curve = parse_curve(root["curve"]);

  if (const YAML::Node o = root["solver"]) {
    s.solver.step = get<double>(o, "step", s.solver.step);
    s.solver.renormalize_every = get<int>(o, "renormalize_every", s.solver.renormalize_every);
    s.solver.sigma_min = get<double>(o, "sigma_min", s.solver.sigma_min);
    s.solver.tolerance = get<double>(o, "tolerance", s.solver.tolerance);
    s.solver.enforce_sedentary_ball =
        get<bool>(o, "enforce_sedentary_ball", s.solver.enforce_sedentary_ball);
    s.solver.allow_singular = get<bool>(o, "allow_singular", s.solver.allow_singular);
    s.solver.snap = get<bool>(o, "snap", s.solver.snap);
    s.solver.output_stride = get<int>(o, "output_stride", s.solver.output_stride);
  }
  if (const YAML::Node o = root["output"]) {
    s.output.turns = get<int>(o, "turns", s.output.turns);
    s.output.frames = get<int>(o, "frames", s.output.frames);
    s.output.seed = get<unsigned>(o, "seed", s.output.seed);
    s.output.orbit_loops = get<int>(o, "orbit_loops", s.output.orbit_loops);
    s.output.orbit_epsilon = get<double>(o, "orbit_epsilon", s.output.orbit_epsilon);
    s.output.orbit_probes = get<int>(o, "orbit_probes", s.output.orbit_probes);
    s.output.window_begin = get<int>(o, "window_begin", s.output.window_begin);
    s.output.window_end = get<int>(o, "window_end", s.output.window_end);
  }
  validate(s);
  s.snake = normalized(s.snake);
  s.curve = normalized(s.curve);
  return s;
}

Scene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot read scene file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scene(ss.str());
}

std::string serialize_scene(const Scene& s) {
  YAML::Node root;
  root["name"] = s.name;
  root["dimension"] = s.dim;
  YAML::Node snake;
  snake["kind"] = s.snake.kind;
  if (s.snake.kind == "polygon") {
    snake["lengths"] = s.snake.lengths;
    snake["values"] = s.snake.values;
  } else if (s.snake.kind == "bivalued") {
    snake["p"] = s.snake.p;
    snake["q"] = s.snake.q;
    snake["length_p"] = s.snake.length_p;
    snake["length_q"] = s.snake.length_q;
  }
  if (!s.snake.recenter.empty()) snake["recenter"] = s.snake.recenter;
  root["snake"] = snake;
  root["curve"] = emit_curve(s.curve);
  YAML::Node o;
  o["step"] = s.solver.step;
  o["renormalize_every"] = s.solver.renormalize_every;
  o["sigma_min"] = s.solver.sigma_min;
  o["tolerance"] = s.solver.tolerance;
  o["enforce_sedentary_ball"] = s.solver.enforce_sedentary_ball;
  o["allow_singular"] = s.solver.allow_singular;
  o["snap"] = s.solver.snap;
  o["output_stride"] = s.solver.output_stride;
  root["solver"] = o;
  YAML::Node out;
  out["turns"] = s.output.turns;
  out["frames"] = s.output.frames;
  out["seed"] = s.output.seed;
  out["orbit_loops"] = s.output.orbit_loops;
  out["orbit_epsilon"] = s.output.orbit_epsilon;
  out["orbit_probes"] = s.output.orbit_probes;
  out["window_begin"] = s.output.window_begin;
  out["window_end"] = s.output.window_end;
  root["output"] = out;
  set_flow(root);

  YAML::Emitter em;
  em.SetDoublePrecision(17);
  em << root;
  return std::string(em.c_str()) + "\n";
}

Configuration build_configuration(const Scene& s) {
  Configuration z = half_circle_configuration();
  const SnakeSpec& n = s.snake;
  if (n.kind == "polygon") {
    std::vector<double> breaks{0.0};
    for (double l : n.lengths) breaks.push_back(breaks.back() + l);
    std::vector<Vec> values;
    for (const Point& v : n.values) {
      const Vec x = to_vec(v);
      if (!(x.norm() > 0.0)) fail("polygon values must be nonzero");
      values.push_back(x.normalized());
    }
    z = Configuration::piecewise_constant(Partition(breaks), values);
  } else if (n.kind == "bivalued") {
    z = Configuration::piecewise_constant(Partition({0.0, n.length_p, n.length_p + n.length_q}),
                                          {to_vec(n.p).normalized(), to_vec(n.q).normalized()});
  }
  if (!n.recenter.empty()) {
    z = parallel_transport_to(z, to_vec(n.recenter), s.solver.options());
  }
  return z;
}

Curve build_curve(const Scene& s, const Configuration& z0) {
  return curve_from_spec(s.curve, z0, endpoint(z0));
}

std::vector<Vec> drag_knots(const Vec& base, const std::vector<Vec>& targets) {
  std::vector<Vec> knots{base};
  for (const Vec& t : targets) {
    if (t.size() != base.size()) throw PreconditionError("dimension", "drag target dimension");
    if ((t - knots.back()).norm() > 0.0) knots.push_back(t);
  }
  return knots;
}

Curve drag_curve(const Vec& base, const std::vector<Vec>& targets, double max_speed) {
  const std::vector<Vec> knots = drag_knots(base, targets);
  if (knots.size() < 2) return Curve::constant(base, 1.0);
  std::vector<Vec> tangents{Vec::Zero(base.size())};
  for (std::size_t k = 1; k < knots.size(); ++k) {
    Vec m = knots[k] - knots[k - 1];
    if (max_speed > 0.0 && m.norm() > max_speed) m *= max_speed / m.norm();
    tangents.push_back(m);
  }
  return Curve::hermite(knots, tangents);
}

Scene preset_scene(const std::string& name) {
  Scene s;
  s.name = name;
  if (name == "figure_a") {
    s.curve.kind = "circle";
    s.curve.center = {2.1875, 0.0};
    s.curve.turns = 1.0;
    s.output.turns = 1;
    return s;
  }
  if (name == "bivalued") {
    const double r = std::numbers::sqrt2 / 2.0;
    s.snake.kind = "bivalued";
    s.snake.p = {r, r};
    s.snake.q = {r, -r};
    s.snake.length_p = std::numbers::sqrt2;
    s.snake.length_q = std::numbers::sqrt2;
    CurveSpec half;
    half.kind = "circle";
    half.center = {0.0, 0.0};
    half.radius = 2.0;
    half.start_at_snout = false;
    half.start_angle = 0.0;
    half.turns = 0.5;
    CurveSpec back;
    back.kind = "segment";
    back.from = {-2.0, 0.0};
    back.to = {2.0, 0.0};
    s.curve.kind = "composite";
    s.curve.parts = {half, back};
    s.curve.durations = {1.0, 1.0};
    return s;
  }
  if (name == "polygon3") {
    s.dim = 3;
    s.snake.kind = "polygon";
    s.snake.lengths = {1.0, 1.0, 1.0, 1.0, 1.0};
    s.snake.values = {{1.0, 0.2, 0.1}, {0.1, 1.0, 0.3}, {-0.8, 0.5, -0.2},
                      {0.2, -0.7, 0.9}, {-0.4, -0.6, -0.8}};
    s.snake.recenter = {0.0, 0.0, 0.0};
    s.curve.kind = "circle";
    s.curve.center = {0.05, 0.0, 0.0};
    s.curve.e1 = {1.0, 0.0, 0.0};
    s.curve.e2 = {0.0, 0.0, 1.0};
    return s;
  }
  if (name == "planar3") {
    s.dim = 3;
    s.snake.kind = "polygon";
    s.snake.lengths = {1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
    const double c = 0.5;
    const double h = std::sqrt(3.0) / 2.0;
    s.snake.values = {{1.0, 0.0, 0.0}, {c, h, 0.0}, {-c, h, 0.0},
                      {-1.0, 0.0, 0.0}, {-c, -h, 0.0}, {c, -h, 0.0}};
    s.curve.kind = "circle";
    s.curve.center = {0.0, 0.0, 0.05};
    s.curve.e1 = {0.0, 0.0, -1.0};
    s.curve.e2 = {1.0, 0.0, 0.0};
    return s;
  }
  fail("unknown preset '" + name + "'");
}

}  // namespace snake

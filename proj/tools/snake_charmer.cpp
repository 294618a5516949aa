// snake_charmer: batch commands over scene files.
//
//   snake_charmer lift <scene>            trajectory CSV (+ SVG frames)
//   snake_charmer holonomy <scene>        one loop; both configurations
//   snake_charmer orbit <scene>           orbit sample, tangent rank, frames
//   snake_charmer turns <scene> --n N     N repetitions of the loop
//   snake_charmer serve [--port P]        steering server
//   snake_charmer scene <preset>          print a built-in scene as YAML
//
// Scene arguments are file paths or "preset:<name>". A one-line JSON summary
// goes to stdout; errors go to stderr as {"error": code, "message": ...}.

#include "snake/bivalued.hpp"
#include "snake/orbit.hpp"
#include "snake/output.hpp"
#include "snake/scene.hpp"
#include "snake/server.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <csignal>
#include <filesystem>
#include <iostream>

using namespace snake;
using nlohmann::json;

namespace {

struct Common {
  std::string scene;
  std::string out_dir = ".";
  double step = 0.0;
  double tolerance = 0.0;
  bool snap = false;
  long long seed = -1;
};

Scene load(const Common& c) {
  Scene s = c.scene.rfind("preset:", 0) == 0 ? preset_scene(c.scene.substr(7)) : load_scene(c.scene);
  if (c.step > 0.0) s.solver.step = c.step;
  if (c.tolerance > 0.0) s.solver.tolerance = c.tolerance;
  if (c.snap) s.solver.snap = true;
  if (c.seed >= 0) s.output.seed = static_cast<unsigned>(c.seed);
  return s;
}

std::string out_path(const Common& c, const std::string& name) {
  std::filesystem::create_directories(c.out_dir);
  return (std::filesystem::path(c.out_dir) / name).string();
}

bool planar_bivalued(const Configuration& z) {
  return z.dim() == 2 && z.is_piecewise_constant() && distinct_value_count(z, 3) == 2;
}

json vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

void write_frames(const Common& c, const Scene& s, const std::vector<Configuration>& path,
                  const Curve& gamma) {
  const int frames = s.output.frames;
  if (frames <= 0 || path.empty()) return;
  for (int k = 0; k < frames; ++k) {
    const std::size_t i = frames == 1 ? path.size() - 1 : (path.size() - 1) * k / (frames - 1);
    char name[64];
    std::snprintf(name, sizeof(name), "frame_%04d.svg", k);
    write_text_file(out_path(c, name), snake_svg(path[i], &gamma, s.name));
  }
}

int cmd_lift(const Common& c) {
  const Scene s = load(c);
  const Configuration z0 = build_configuration(s);
  const Curve gamma = build_curve(s, z0);
  json summary{{"command", "lift"}, {"scene", s.name}};
  if (planar_bivalued(z0)) {
    BivaluedLiftOptions bo;
    bo.step = s.solver.step;
    bo.start_tolerance = s.solver.tolerance;
    const BivaluedTrajectory tr = lift_bivalued(BivaluedConfig::from_configuration(z0), gamma, bo);
    write_text_file(out_path(c, "trajectory.csv"), bivalued_csv(tr, gamma));
    std::vector<Configuration> path;
    for (const BivaluedConfig& b : tr.path) path.push_back(b.to_configuration());
    write_frames(c, s, path, gamma);
    summary["mode"] = "bivalued";
    summary["crossings"] = tr.crossings.size();
    summary["final_p"] = vec_json(tr.final_config().p());
    summary["final_q"] = vec_json(tr.final_config().q());
    std::cout << summary.dump() << "\n";
    return 0;
  }
  LiftResult lift;
  std::vector<CoverChart> charts;
  if (z0.dim() == 2) {
    SU11LiftResult r = lift_su11(z0, gamma, s.solver.options());
    lift = std::move(r.lift);
    charts = std::move(r.charts);
  } else {
    lift = horizontal_lift(z0, gamma, s.solver.options());
  }
  write_text_file(out_path(c, "trajectory.csv"),
                  trajectory_csv(lift, gamma, z0.dim() == 2 ? &charts : nullptr));
  write_frames(c, s, lift.config_path, gamma);
  summary["status"] = to_string(lift.status);
  summary["steps"] = lift.steps;
  summary["max_defect"] = lift.max_defect();
  summary["distance"] = sup_distance(lift.final_config(), z0);
  if (lift.status == LiftStatus::complete && s.output.turns > 1) {
    const TurnsResult tr = lift_turns(z0, gamma, s.output.turns, s.solver.options());
    write_text_file(out_path(c, "turns.csv"), turns_csv(tr, z0.dim()));
    summary["turns"] = s.output.turns;
  }
  std::cout << summary.dump() << "\n";
  if (lift.status != LiftStatus::complete) throw LiftFailure(lift.status, lift.stop_time);
  return 0;
}

int cmd_holonomy(const Common& c) {
  const Scene s = load(c);
  const Configuration z0 = build_configuration(s);
  const Curve gamma = build_curve(s, z0);
  const Configuration z1 = holonomy(z0, gamma, s.solver.options());
  write_text_file(out_path(c, "z0.csv"), configuration_csv(z0));
  write_text_file(out_path(c, "z1.csv"), configuration_csv(z1));
  json summary{{"command", "holonomy"}, {"scene", s.name}, {"distance", sup_distance(z1, z0)},
               {"snout_error", (endpoint(z1) - endpoint(z0)).norm()}};
  if (planar_bivalued(z0)) {
    const BivaluedOrbit orb = horb_bivalued(BivaluedConfig::from_configuration(z0));
    json pts = json::array();
    for (const BivaluedConfig& w : orb.witnesses) {
      pts.push_back(json{{"p", vec_json(w.p())}, {"q", vec_json(w.q())}});
    }
    summary["orbit"] = json{{"kind", to_string(orb.kind)}, {"components", orb.components},
                            {"points", pts}};
  }
  std::cout << summary.dump() << "\n";
  return 0;
}

int cmd_orbit(const Common& c) {
  const Scene s = load(c);
  const Configuration z0 = build_configuration(s);
  json summary{{"command", "orbit"}, {"scene", s.name}};
  const int k = spherical_dimension(z0, 1e-9);
  summary["spdim"] = k;
  if (k == 0) {
    if (distinct_value_count(z0, 3) == 1) {
      summary["classification"] = "point";
    } else {
      const BivaluedOrbit orb = horb_bivalued(BivaluedConfig::from_configuration(z0), 16,
                                              s.output.seed);
      summary["classification"] = "bivalued";
      summary["kind"] = to_string(orb.kind);
      summary["components"] = orb.components;
      summary["witnesses"] = orb.witnesses.size();
    }
    std::cout << summary.dump() << "\n";
    return 0;
  }
  const double eps = s.output.orbit_epsilon * z0.length();
  const LiftOptions opts = s.solver.options();
  const OrbitReport rep =
      orbit_sample(z0, small_loops(z0, eps, s.output.orbit_loops, s.output.seed), opts);
  const RankEstimate rank = orbit_tangent_rank(z0, eps, s.output.orbit_probes, s.output.seed, opts);

  std::string text = "classification " + std::string(to_string(rep.classification)) + "\n";
  text += "spdim " + std::to_string(rep.spdim) + "\n";
  text += "expected_dim " + std::to_string(rep.expected_dim) + "\n";
  text += "estimated_rank " + std::to_string(rank.rank) + "\n";
  text += "points " + std::to_string(rep.points.size()) + "\n";
  text += "failures " + std::to_string(rep.failures.size()) + "\n";
  text += "max_fiber_error " + format_double(rep.max_fiber_error) + "\n";
  text += "singular_values";
  for (double v : rank.singular_values) text += " " + format_double(v);
  text += "\n";

  double worst_fit = 0.0;
  bool at_origin = endpoint(z0).norm() <= 1e-6;
  if (at_origin) {
    const int d = z0.dim();
    std::string csv = "point";
    const Mat ref = reference_frame(z0);
    for (Eigen::Index j = 0; j < ref.cols(); ++j) {
      for (int i = 0; i < d; ++i) csv += ",f" + std::to_string(j + 1) + "_" + std::to_string(i + 1);
    }
    csv += ",residual\n";
    for (std::size_t p = 0; p < rep.points.size(); ++p) {
      const StiefelFit fit = stiefel_frame(rep.points[p], z0, 1e-6);
      worst_fit = std::max(worst_fit, fit.residual);
      csv += std::to_string(p);
      for (Eigen::Index j = 0; j < fit.frame.cols(); ++j) {
        for (int i = 0; i < d; ++i) csv += "," + format_double(fit.frame(i, j));
      }
      csv += "," + format_double(fit.residual) + "\n";
    }
    write_text_file(out_path(c, "frames.csv"), csv);
    text += "max_rotation_fit " + format_double(worst_fit) + "\n";
  }
  write_text_file(out_path(c, "orbit_report.txt"), text);
  summary["classification"] = to_string(rep.classification);
  summary["expected_dim"] = rep.expected_dim;
  summary["estimated_rank"] = rank.rank;
  summary["points"] = rep.points.size();
  summary["failures"] = rep.failures.size();
  if (at_origin) summary["max_rotation_fit"] = worst_fit;
  std::cout << summary.dump() << "\n";
  return 0;
}

int cmd_turns(const Common& c, int n) {
  const Scene s = load(c);
  const Configuration z0 = build_configuration(s);
  const Curve gamma = build_curve(s, z0);
  const TurnsResult tr = lift_turns(z0, gamma, n, s.solver.options());
  write_text_file(out_path(c, "turns.csv"), turns_csv(tr, z0.dim()));
  json summary{{"command", "turns"}, {"scene", s.name}, {"n", n}};
  if (n > 0) {
    const int lo = s.output.window_begin >= 0 ? s.output.window_begin : std::max(1, n / 4);
    const int hi = s.output.window_end >= 0 ? std::min(s.output.window_end, n) : n;
    int best = lo;
    double max_dist = 0.0;
    for (int k = 0; k <= n; ++k) max_dist = std::max(max_dist, tr.distances[k]);
    for (int k = lo; k <= hi; ++k) {
      if (tr.distances[k] < tr.distances[best]) best = k;
    }
    double worst_defect = 0.0;
    for (double d : tr.max_defects) worst_defect = std::max(worst_defect, d);
    summary["window"] = {lo, hi};
    summary["argmin"] = best;
    summary["min_distance"] = tr.distances[best];
    summary["max_distance"] = max_dist;
    summary["max_defect"] = worst_defect;
  } else {
    summary["min_distance"] = 0.0;
  }
  std::cout << summary.dump() << "\n";
  return 0;
}

Server* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

int cmd_serve(int port) {
  Server server(port);
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << json{{"command", "serve"}, {"port", server.port()}}.dump() << std::endl;
  server.run();
  g_server = nullptr;
  return 0;
}

void add_common(CLI::App* app, Common& c, bool scene = true) {
  if (scene) app->add_option("scene", c.scene, "scene file or preset:<name>")->required();
  app->add_option("--out-dir", c.out_dir, "directory for output files");
  app->add_option("--step", c.step, "integration step per unit of curve time")
      ->check(CLI::PositiveNumber);
  app->add_option("--tolerance", c.tolerance, "defect tolerance")->check(CLI::PositiveNumber);
  app->add_flag("--snap", c.snap, "correct the snout drift after every step");
  app->add_option("--seed", c.seed, "seed for random loop families")->check(CLI::NonNegativeNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Horizontal lifting and holonomy of snakes"};
  app.require_subcommand(1);
  Common common;
  int turns = 1;
  int port = 8765;

  CLI::App* lift = app.add_subcommand("lift", "lift the scene's curve");
  add_common(lift, common);
  CLI::App* hol = app.add_subcommand("holonomy", "holonomy of the scene's loop");
  add_common(hol, common);
  CLI::App* orbit = app.add_subcommand("orbit", "sample the holonomy orbit");
  add_common(orbit, common);
  CLI::App* turn = app.add_subcommand("turns", "repeat the scene's loop");
  add_common(turn, common);
  turn->add_option("--n", turns, "number of turns")->check(CLI::NonNegativeNumber);
  CLI::App* serve = app.add_subcommand("serve", "run the steering server");
  serve->add_option("--port", port, "TCP port on 127.0.0.1 (0 = any)");

  std::string preset;
  CLI::App* dump = app.add_subcommand("scene", "print a built-in scene as YAML");
  dump->add_option("preset", preset, "figure_a | bivalued | polygon3 | planar3")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << json{{"error", "usage"}, {"message", e.what()}}.dump() << "\n";
    return 1;
  }

  try {
    if (*lift) return cmd_lift(common);
    if (*hol) return cmd_holonomy(common);
    if (*orbit) return cmd_orbit(common);
    if (*turn) return cmd_turns(common, turns);
    if (*serve) return cmd_serve(port);
    if (*dump) {
      std::cout << serialize_scene(preset_scene(preset));
      return 0;
    }
  } catch (const PreconditionError& e) {
    std::cerr << json{{"error", e.code()}, {"message", e.what()}}.dump() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << json{{"error", e.code()}, {"message", e.what()}}.dump() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
    return 3;
  }
  return 1;
}

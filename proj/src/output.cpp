#include "snake/output.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>

namespace snake {

namespace {

void append_vec(std::string& out, const Vec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out += ',';
    out += format_double(v(i));
  }
}

Vec chart_row(const MobiusElement& g, const CoverChart* chart) {
  const int d = g.dim();
  if (d == 2) {
    Vec out(3);
    if (chart) {
      out << chart->v(0), chart->v(1), chart->theta;
    } else {
      const ChartCoordinates c = chart_coordinates(g);
      out << c.v(0), c.v(1), std::atan2(c.rotation(1, 0), c.rotation(0, 0));
    }
    return out;
  }
  return chart_coordinates(g).v;
}

std::string chart_header(int d) {
  if (d == 2) return "v_1,v_2,theta";
  std::string h;
  for (int i = 1; i <= d; ++i) h += fmt::format("{}v_{}", i == 1 ? "" : ",", i);
  return h;
}

std::string indexed(const char* name, int d) {
  std::string h;
  for (int i = 1; i <= d; ++i) h += fmt::format(",{}_{}", name, i);
  return h;
}

}  // namespace

std::string format_double(double x) { return fmt::format("{:.17g}", x); }

std::string trajectory_csv_header(int d) {
  return "t" + indexed("gamma", d) + ",defect," + chart_header(d) + "\n";
}

std::string trajectory_csv_rows(const LiftResult& lift, const Curve& gamma,
                                const std::vector<CoverChart>* charts, double time_offset,
                                bool skip_first) {
  std::string out;
  for (std::size_t i = skip_first ? 1 : 0; i < lift.times.size(); ++i) {
    const double t = lift.times[i];
    out += format_double(t + time_offset);
    append_vec(out, gamma.position(t));
    out += ',';
    out += format_double(lift.defects[i]);
    const CoverChart* c = (charts && i < charts->size()) ? &(*charts)[i] : nullptr;
    append_vec(out, chart_row(lift.group_path[i], c));
    out += '\n';
  }
  return out;
}

std::string trajectory_csv(const LiftResult& lift, const Curve& gamma,
                           const std::vector<CoverChart>* charts) {
  return trajectory_csv_header(gamma.dim()) + trajectory_csv_rows(lift, gamma, charts);
}

std::string turns_csv(const TurnsResult& turns, int d) {
  std::string out = "n,distance," + chart_header(d) + "\n";
  for (std::size_t n = 0; n < turns.distances.size(); ++n) {
    out += fmt::format("{},{}", n, format_double(turns.distances[n]));
    const CoverChart* c = n < turns.charts.size() ? &turns.charts[n] : nullptr;
    append_vec(out, chart_row(turns.groups[n], c));
    out += '\n';
  }
  return out;
}

std::string configuration_csv(const Configuration& z) {
  std::string out = "s,weight" + indexed("z", z.dim()) + "\n";
  for (Eigen::Index k = 0; k < z.nodes().cols(); ++k) {
    out += format_double(z.params()(k));
    out += ',';
    out += format_double(z.weights()(k));
    append_vec(out, z.nodes().col(k));
    out += '\n';
  }
  return out;
}

std::string bivalued_csv(const BivaluedTrajectory& traj, const Curve& gamma) {
  const int d = gamma.dim();
  std::string out = "t" + indexed("gamma", d) + indexed("p", d) + indexed("q", d) + ",fiber_error\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const Vec g = gamma.position(traj.times[i]);
    const BivaluedConfig& c = traj.path[i];
    out += format_double(traj.times[i]);
    append_vec(out, g);
    append_vec(out, c.p());
    append_vec(out, c.q());
    out += ',';
    out += format_double((w_endpoint(c) - g).norm());
    out += '\n';
  }
  return out;
}

std::string snake_svg(const Configuration& z, const Curve* gamma, const std::string& title) {
  constexpr int kSize = 600;
  constexpr int kSnakeSamples = 256;
  constexpr int kCurveSamples = 400;
  const double L = z.length();
  const double half = 1.1 * L;
  const double scale = kSize / (2.0 * half);
  const auto px = [&](const Vec& p) {
    return fmt::format("{:.3f},{:.3f}", (p(0) + half) * scale, (half - p(1)) * scale);
  };

  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\" "
      "viewBox=\"0 0 {0} {0}\">\n",
      kSize);
  out += fmt::format("<title>{}</title>\n", title);
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += fmt::format(
      "<circle class=\"ball\" cx=\"{:.3f}\" cy=\"{:.3f}\" r=\"{:.3f}\" fill=\"none\" "
      "stroke=\"#bbbbbb\" stroke-dasharray=\"4 4\"/>\n",
      half * scale, half * scale, L * scale);
  if (gamma) {
    out += "<polyline class=\"target\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1\" points=\"";
    for (int k = 0; k <= kCurveSamples; ++k) {
      if (k) out += ' ';
      out += px(gamma->position(gamma->t_end() * k / kCurveSamples));
    }
    out += "\"/>\n";
  }
  const SnakePolyline snake = integrate_snake(z, kSnakeSamples);
  out += "<polyline class=\"snake\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
  for (std::size_t k = 0; k < snake.points.size(); ++k) {
    if (k) out += ' ';
    out += px(snake.points[k]);
  }
  out += "\"/>\n";
  const Vec snout = snake.points.back();
  out += fmt::format("<circle class=\"snout\" cx=\"{:.3f}\" cy=\"{:.3f}\" r=\"4\" fill=\"#2ca02c\"/>\n",
                     (snout(0) + half) * scale, (half - snout(1)) * scale);
  out += "</svg>\n";
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw PreconditionError("io", "cannot write '" + path + "'");
  f << content;
  if (!f) throw NumericalError("io", "write failed for '" + path + "'");
}

}  // namespace snake

#pragma once

// CSV and SVG emission. Doubles in CSV files carry 17 significant digits so
// that every value reads back bit for bit.

#include "snake/bivalued.hpp"
#include "snake/lift.hpp"

#include <string>
#include <vector>

namespace snake {

std::string format_double(double x);

/// t, gamma_1..gamma_d, defect, then the group chart: v_1, v_2, theta for
/// d = 2 (SU(1,1) cover chart), v_1..v_d for d >= 3.
std::string trajectory_csv_header(int d);
/// Rows for a lift; `charts` (d = 2) overrides the chart computed from the
/// Lorentz path. `time_offset` shifts t; `skip_first` drops the t = 0 row.
std::string trajectory_csv_rows(const LiftResult& lift, const Curve& gamma,
                                const std::vector<CoverChart>* charts = nullptr,
                                double time_offset = 0.0, bool skip_first = false);
std::string trajectory_csv(const LiftResult& lift, const Curve& gamma,
                           const std::vector<CoverChart>* charts = nullptr);

/// n, distance, chart columns as above.
std::string turns_csv(const TurnsResult& turns, int d);

/// s, weight, z_1..z_d per node.
std::string configuration_csv(const Configuration& z);

/// t, gamma_1..d, p_1..d, q_1..d, fiber_error.
std::string bivalued_csv(const BivaluedTrajectory& traj, const Curve& gamma);

/// One frame: admissible-ball outline, the target curve, the snake polyline
/// and a snout marker. d >= 3 is projected on the first two coordinates.
std::string snake_svg(const Configuration& z, const Curve* gamma, const std::string& title);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace snake

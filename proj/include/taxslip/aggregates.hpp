#pragma once

#include <vector>

#include "taxslip/force_frame.hpp"
#include "taxslip/grid.hpp"

namespace taxslip {

/// Totals of one frame. Forces in newtons, moment in newton-millimeters.
struct AggregateForces {
  double normal_n = 0.0;     ///< sum of fz over all taxels
  double shear_x_n = 0.0;    ///< sum of fx
  double shear_y_n = 0.0;    ///< sum of fy
  double shear_mag_n = 0.0;  ///< sqrt(shear_x^2 + shear_y^2)
  double moment_z_nmm = 0.0; ///< net moment about the grid z axis
};

/// Sum of the normal components over all taxels.
double total_normal_force(const ForceFrame& frame);

/// Sums of the two in-plane shear components, (sum fx, sum fy).
std::pair<double, double> total_shear_components(const ForceFrame& frame);

/// Magnitude of the total shear, sqrt(fx_total^2 + fy_total^2).
double total_shear_magnitude(double shear_x_n, double shear_y_n);

/// Net moment about the z axis through the grid center:
/// sum of (x_i * fy_i - y_i * fx_i) with taxel coordinates from the grid.
double net_moment_z(const ForceFrame& frame, const GridSpec& grid);

/// Row-major indices of taxels whose normal force exceeds epsilon.
/// The cardinality is the contact count A.
std::vector<int> contact_set(const ForceFrame& frame, double epsilon_n);

/// All of the above in one pass.
AggregateForces aggregate_forces(const ForceFrame& frame, const GridSpec& grid);

}  // namespace taxslip

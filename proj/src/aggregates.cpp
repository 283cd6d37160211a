#include "taxslip/aggregates.hpp"

#include <cmath>
#include <stdexcept>

namespace taxslip {

namespace {

void require_shape(const ForceFrame& frame) {
  if (!frame.shape_ok())
    throw std::invalid_argument("ForceFrame: field sizes do not match n*n");
}

void require_grid(const ForceFrame& frame, const GridSpec& grid) {
  require_shape(frame);
  if (frame.n != grid.n)
    throw std::invalid_argument("ForceFrame: frame n does not match grid n");
}

}  // namespace

double total_normal_force(const ForceFrame& frame) {
  require_shape(frame);
  double sum = 0.0;
  for (double v : frame.fz) sum += v;
  return sum;
}

std::pair<double, double> total_shear_components(const ForceFrame& frame) {
  require_shape(frame);
  double sx = 0.0, sy = 0.0;
  for (double v : frame.fx) sx += v;
  for (double v : frame.fy) sy += v;
  return {sx, sy};
}

double total_shear_magnitude(double shear_x_n, double shear_y_n) {
  return std::hypot(shear_x_n, shear_y_n);
}

double net_moment_z(const ForceFrame& frame, const GridSpec& grid) {
  require_grid(frame, grid);
  double m = 0.0;
  for (int r = 0; r < grid.n; ++r) {
    const double y = grid.y_mm(r);
    for (int c = 0; c < grid.n; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * grid.n + c;
      m += grid.x_mm(c) * frame.fy[i] - y * frame.fx[i];
    }
  }
  return m;
}

std::vector<int> contact_set(const ForceFrame& frame, double epsilon_n) {
  require_shape(frame);
  if (epsilon_n < 0.0)
    throw std::invalid_argument("contact_set: epsilon must be >= 0");
  std::vector<int> indices;
  for (std::size_t i = 0; i < frame.fz.size(); ++i)
    if (frame.fz[i] > epsilon_n) indices.push_back(static_cast<int>(i));
  return indices;
}

AggregateForces aggregate_forces(const ForceFrame& frame,
                                 const GridSpec& grid) {
  require_grid(frame, grid);
  AggregateForces out;
  for (int r = 0; r < grid.n; ++r) {
    const double y = grid.y_mm(r);
    for (int c = 0; c < grid.n; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * grid.n + c;
      out.normal_n += frame.fz[i];
      out.shear_x_n += frame.fx[i];
      out.shear_y_n += frame.fy[i];
      out.moment_z_nmm += grid.x_mm(c) * frame.fy[i] - y * frame.fx[i];
    }
  }
  out.shear_mag_n = total_shear_magnitude(out.shear_x_n, out.shear_y_n);
  return out;
}

}  // namespace taxslip

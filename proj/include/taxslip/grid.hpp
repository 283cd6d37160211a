#pragma once

#include <stdexcept>

namespace taxslip {

/// Geometry of the square taxel array.
///
/// Taxel (row r, col c) sits at
///   x = (c - (n-1)/2) * pitch,   y = ((n-1)/2 - r) * pitch,
/// so the origin is the geometric center of the grid and the taxel
/// coordinates sum to (0, 0). Row 0 is the +y edge.
struct GridSpec {
  int n = 20;             ///< taxels per side
  double pitch_mm = 1.5;  ///< taxel spacing

  GridSpec() = default;
  GridSpec(int taxels_per_side, double pitch)
      : n(taxels_per_side), pitch_mm(pitch) {
    if (n < 1) throw std::invalid_argument("GridSpec: n must be >= 1");
    if (!(pitch_mm > 0.0))
      throw std::invalid_argument("GridSpec: pitch must be positive");
  }

  int taxel_count() const { return n * n; }
  double side_mm() const { return n * pitch_mm; }
  double half_side_mm() const { return 0.5 * n * pitch_mm; }

  double x_mm(int col) const { return (col - 0.5 * (n - 1)) * pitch_mm; }
  double y_mm(int row) const { return (0.5 * (n - 1) - row) * pitch_mm; }

  /// Same physical side length sampled with a different taxel count.
  GridSpec with_resolution(int n_new) const {
    return GridSpec(n_new, side_mm() / n_new);
  }

  bool operator==(const GridSpec&) const = default;
};

}  // namespace taxslip

#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "taxslip/grid.hpp"

namespace taxslip {

/// One timestamped snapshot of the discretized 3-D contact force
/// distribution: three n x n scalar fields in newtons per taxel, stored
/// row-major. fx/fy are the in-plane shear components, fz the normal
/// component. Timestamps are nondecreasing within a sequence.
struct ForceFrame {
  double timestamp_s = 0.0;
  int n = 0;
  std::vector<double> fx, fy, fz;

  static ForceFrame zero(int taxels_per_side, double timestamp_s = 0.0) {
    ForceFrame f;
    f.timestamp_s = timestamp_s;
    f.n = taxels_per_side;
    const std::size_t count =
        static_cast<std::size_t>(taxels_per_side) * taxels_per_side;
    f.fx.assign(count, 0.0);
    f.fy.assign(count, 0.0);
    f.fz.assign(count, 0.0);
    return f;
  }

  std::size_t taxel_count() const { return fz.size(); }

  bool shape_ok() const {
    const std::size_t count = static_cast<std::size_t>(n) * n;
    return n >= 1 && fx.size() == count && fy.size() == count &&
           fz.size() == count;
  }

  bool matches(const GridSpec& grid) const {
    return shape_ok() && n == grid.n;
  }

  /// True when no field holds a NaN or infinity.
  bool finite() const {
    for (const auto* field : {&fx, &fy, &fz})
      for (double v : *field)
        if (!std::isfinite(v)) return false;
    return true;
  }
};

}  // namespace taxslip

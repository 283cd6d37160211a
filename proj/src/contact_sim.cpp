#include "taxslip/contact_sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <utility>

namespace taxslip {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Box-Muller on top of mt19937_64. Spelled out rather than using
/// std::normal_distribution, whose stream is not pinned by the standard;
/// byte-identical output for a given seed is part of the contract here.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}

  double next(double sigma) {
    if (have_spare_) {
      have_spare_ = false;
      return sigma * spare_;
    }
    const double u1 = to_unit(rng_());
    const double u2 = to_unit(rng_());
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * kPi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return sigma * radius * std::cos(angle);
  }

 private:
  // 53 random bits mapped into (0, 1); never 0, so log is safe.
  static double to_unit(std::uint64_t v) {
    return static_cast<double>(v >> 11) * 0x1.0p-53 + 0x1.0p-54;
  }

  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// Precomputed geometry of one contact patch on one grid: per-taxel
/// distance from the patch center and the normalized Hertz pressure at
/// full load, fz_i = alpha * sqrt(1 - (rho_i/a)^2).
struct Patch {
  double a = 0.0;
  double load = 0.0;
  double mu = 0.0;
  double cx = 0.0, cy = 0.0;
  double alpha = 0.0;
  std::vector<double> rho;
  std::vector<double> fz;
};

Patch make_patch(const ContactParams& params, const GridSpec& grid) {
  params.validate(grid);
  Patch p;
  p.a = params.radius_mm;
  p.load = params.load_n;
  p.mu = params.mu;
  p.cx = params.center_x_mm;
  p.cy = params.center_y_mm;
  const std::size_t count = static_cast<std::size_t>(grid.taxel_count());
  p.rho.resize(count);
  p.fz.assign(count, 0.0);
  double weight_sum = 0.0;
  for (int r = 0; r < grid.n; ++r) {
    for (int c = 0; c < grid.n; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * grid.n + c;
      const double dx = grid.x_mm(c) - p.cx;
      const double dy = grid.y_mm(r) - p.cy;
      const double rho = std::hypot(dx, dy);
      p.rho[i] = rho;
      const double s = rho / p.a;
      if (s < 1.0) {
        p.fz[i] = std::sqrt(std::max(0.0, 1.0 - s * s));
        weight_sum += p.fz[i];
      }
    }
  }
  if (!(weight_sum > 0.0))
    throw std::invalid_argument(
        "ContactParams: contact disc covers no taxel at this resolution");
  p.alpha = p.load / weight_sum;
  for (double& v : p.fz) v *= p.alpha;
  return p;
}

/// Shear magnitude fields of the Cattaneo-Mindlin construction at full
/// load. Stick disc strictly below the local bound, annulus tie-broken
/// just above it.
void cm_fields(const Patch& p, double tangential_n, double ux, double uy,
               std::vector<double>& fx, std::vector<double>& fy) {
  const std::size_t count = p.fz.size();
  fx.assign(count, 0.0);
  fy.assign(count, 0.0);
  if (tangential_n == 0.0) return;
  const double slip_bound = p.mu * p.load;
  const bool full_slip = tangential_n >= slip_bound;
  const double c =
      full_slip ? 0.0 : p.a * std::cbrt(1.0 - tangential_n / slip_bound);
  for (std::size_t i = 0; i < count; ++i) {
    if (p.fz[i] <= 0.0) continue;
    double q;
    if (!full_slip && p.rho[i] < c) {
      const double s = p.rho[i] / c;
      q = p.mu * (p.fz[i] -
                  p.alpha * (c / p.a) * std::sqrt(std::max(0.0, 1.0 - s * s)));
    } else {
      q = (1.0 + kTieBreakDelta) * p.mu * p.fz[i];
    }
    fx[i] = q * ux;
    fy[i] = q * uy;
  }
}

/// Net torque about the patch center of the torsional construction with
/// stick core radius c: taxels beyond c carry mu*fz, the core ramps
/// linearly in radius.
double torsion_moment_for_core(const Patch& p, double c) {
  double m = 0.0;
  for (std::size_t i = 0; i < p.fz.size(); ++i) {
    if (p.fz[i] <= 0.0) continue;
    m += p.mu * p.fz[i] * p.rho[i] * std::min(1.0, p.rho[i] / c);
  }
  return m;
}

double patch_full_slip_torque(const Patch& p) {
  double m = 0.0;
  for (std::size_t i = 0; i < p.fz.size(); ++i)
    if (p.fz[i] > 0.0) m += p.mu * p.fz[i] * p.rho[i];
  return m;
}

/// Core radius whose net torque equals the commanded one. The torque is
/// monotone decreasing in the core radius, so plain bisection suffices.
/// Caller guarantees 0 < torque < full-slip torque.
double solve_torsion_core(const Patch& p, double torque_nmm) {
  double lo = 1e-9 * p.a;
  double hi = p.a;
  int guard = 0;
  while (torsion_moment_for_core(p, hi) > torque_nmm && guard++ < 80) hi *= 2.0;
  for (int it = 0; it < 120; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (torsion_moment_for_core(p, mid) > torque_nmm)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

void torsion_fields(const Patch& p, double torque_nmm, const GridSpec& grid,
                    std::vector<double>& fx, std::vector<double>& fy) {
  const std::size_t count = p.fz.size();
  fx.assign(count, 0.0);
  fy.assign(count, 0.0);
  if (torque_nmm == 0.0) return;
  const double m_slip = patch_full_slip_torque(p);
  const bool full_slip = torque_nmm >= m_slip * (1.0 - 1e-12);
  const double c = full_slip ? 0.0 : solve_torsion_core(p, torque_nmm);
  for (int r = 0; r < grid.n; ++r) {
    for (int col = 0; col < grid.n; ++col) {
      const std::size_t i = static_cast<std::size_t>(r) * grid.n + col;
      if (p.fz[i] <= 0.0 || p.rho[i] <= 0.0) continue;
      double tau;
      if (!full_slip && p.rho[i] < c) {
        tau = p.mu * p.fz[i] * (p.rho[i] / c);
      } else {
        tau = (1.0 + kTieBreakDelta) * p.mu * p.fz[i];
      }
      const double dx = grid.x_mm(col) - p.cx;
      const double dy = grid.y_mm(r) - p.cy;
      // Azimuthal unit vector about the patch center.
      fx[i] = tau * (-dy / p.rho[i]);
      fy[i] = tau * (dx / p.rho[i]);
    }
  }
}

}  // namespace

void ContactParams::validate(const GridSpec& grid) const {
  if (!(radius_mm > 0.0))
    throw std::invalid_argument("ContactParams: radius must be positive");
  if (!(load_n > 0.0))
    throw std::invalid_argument("ContactParams: load must be positive");
  if (!(mu > 0.0))
    throw std::invalid_argument("ContactParams: mu must be positive");
  const double offset = std::hypot(center_x_mm, center_y_mm);
  if (!(offset + radius_mm <= grid.half_side_mm()))
    throw std::invalid_argument(
        "ContactParams: contact disc does not fit inside the grid");
}

std::vector<double> hertz_pressure(const ContactParams& params,
                                   const GridSpec& grid) {
  return make_patch(params, grid).fz;
}

void cattaneo_mindlin_shear(const ContactParams& params, double tangential_n,
                            double dir_x, double dir_y, const GridSpec& grid,
                            std::vector<double>& fx, std::vector<double>& fy) {
  if (tangential_n < 0.0)
    throw std::invalid_argument("cattaneo_mindlin_shear: negative load");
  const double norm = std::hypot(dir_x, dir_y);
  if (!(norm > 0.0))
    throw std::invalid_argument("cattaneo_mindlin_shear: zero direction");
  const Patch p = make_patch(params, grid);
  cm_fields(p, tangential_n, dir_x / norm, dir_y / norm, fx, fy);
}

void torsional_partial_slip(const ContactParams& params, double torque_nmm,
                            const GridSpec& grid, std::vector<double>& fx,
                            std::vector<double>& fy) {
  if (torque_nmm < 0.0)
    throw std::invalid_argument("torsional_partial_slip: negative torque");
  const Patch p = make_patch(params, grid);
  torsion_fields(p, torque_nmm, grid, fx, fy);
}

double full_slip_torque(const ContactParams& params, const GridSpec& grid) {
  return patch_full_slip_torque(make_patch(params, grid));
}

double torsional_stick_core_mm(const ContactParams& params, double torque_nmm,
                               const GridSpec& grid) {
  if (torque_nmm < 0.0)
    throw std::invalid_argument("torsional_stick_core_mm: negative torque");
  const Patch p = make_patch(params, grid);
  if (torque_nmm == 0.0) return p.a;
  const double m_slip = patch_full_slip_torque(p);
  if (torque_nmm >= m_slip * (1.0 - 1e-12)) return 0.0;
  return std::min(p.a, solve_torsion_core(p, torque_nmm));
}

double analytic_stick_fraction(double tangential_n, double mu, double load_n) {
  if (!(mu > 0.0) || !(load_n > 0.0))
    throw std::invalid_argument("analytic_stick_fraction: mu*P must be positive");
  if (tangential_n < 0.0)
    throw std::invalid_argument("analytic_stick_fraction: negative load");
  const double ratio = tangential_n / (mu * load_n);
  if (ratio >= 1.0) return 0.0;
  return std::cbrt((1.0 - ratio) * (1.0 - ratio));
}

ForceFrame add_noise(const ForceFrame& frame, double sigma_n,
                     std::uint64_t seed) {
  if (sigma_n < 0.0) throw std::invalid_argument("add_noise: negative sigma");
  ForceFrame out = frame;
  if (sigma_n == 0.0) return out;
  GaussianSampler gauss(seed);
  for (auto* field : {&out.fx, &out.fy, &out.fz})
    for (double& v : *field) v += gauss.next(sigma_n);
  return out;
}

std::string to_string(PhaseKind kind) {
  switch (kind) {
    case PhaseKind::Grip: return "grip";
    case PhaseKind::Hold: return "hold";
    case PhaseKind::Translate: return "translate";
    case PhaseKind::Rotate: return "rotate";
  }
  return "?";
}

Phase Phase::grip(double duration_s, double target) {
  Phase p;
  p.kind = PhaseKind::Grip;
  p.duration_s = duration_s;
  p.peak = target;
  return p;
}

Phase Phase::hold(double duration_s) {
  Phase p;
  p.kind = PhaseKind::Hold;
  p.duration_s = duration_s;
  return p;
}

Phase Phase::translate(double dir_x, double dir_y, double peak,
                       double duration_s, double ramp_s) {
  Phase p;
  p.kind = PhaseKind::Translate;
  p.duration_s = duration_s;
  p.peak = peak;
  p.ramp_s = ramp_s;
  p.dir_x = dir_x;
  p.dir_y = dir_y;
  return p;
}

Phase Phase::rotate(double peak, double duration_s, double ramp_s) {
  Phase p;
  p.kind = PhaseKind::Rotate;
  p.duration_s = duration_s;
  p.peak = peak;
  p.ramp_s = ramp_s;
  return p;
}

void ScenarioSpec::validate() const {
  if (!(frame_rate_hz > 0.0))
    throw std::invalid_argument("ScenarioSpec: frame rate must be positive");
  if (!(noise_sigma_n >= 0.0))
    throw std::invalid_argument("ScenarioSpec: noise sigma must be >= 0");
  if (!(truth_threshold >= 0.0 && truth_threshold <= 1.0))
    throw std::invalid_argument("ScenarioSpec: truth threshold must be in [0, 1]");
  for (const Phase& p : phases) {
    if (!(p.duration_s > 0.0))
      throw std::invalid_argument("Phase: duration must be positive");
    switch (p.kind) {
      case PhaseKind::Grip:
        if (!(p.peak >= 0.0))
          throw std::invalid_argument("Phase: grip target must be >= 0");
        break;
      case PhaseKind::Hold:
        break;
      case PhaseKind::Translate:
      case PhaseKind::Rotate:
        if (!(p.peak > 1.0))
          throw std::invalid_argument(
              "Phase: motion peak must exceed the gross-slip bound");
        if (!(p.ramp_s > 0.0) || 2.0 * p.ramp_s > p.duration_s)
          throw std::invalid_argument(
              "Phase: need 0 < ramp and 2*ramp <= duration");
        if (p.kind == PhaseKind::Translate &&
            !(std::hypot(p.dir_x, p.dir_y) > 0.0))
          throw std::invalid_argument("Phase: zero shear direction");
        break;
    }
  }
}

double ScenarioSpec::duration_s() const {
  double t = 0.0;
  for (const Phase& p : phases) t += p.duration_s;
  return t;
}

const TruthInterval* LabeledSequence::truth_at(double timestamp_s) const {
  for (const TruthInterval& iv : truth) {
    if (timestamp_s >= iv.start_s && timestamp_s < iv.end_s) return &iv;
  }
  if (!truth.empty() && timestamp_s == truth.back().end_s)
    return &truth.back();
  return nullptr;
}

namespace {

struct PhaseWindow {
  Phase phase;
  double start_s = 0.0;
  double end_s = 0.0;
  double load_begin = 0.0;  // load factor entering the phase
  double load_end = 0.0;    // load factor leaving it
};

/// Trapezoid level in [0, peak]: linear rise over ramp_s, dwell, linear
/// fall over ramp_s.
double motion_level(const Phase& p, double tau) {
  if (tau <= 0.0 || tau >= p.duration_s) return 0.0;
  if (tau < p.ramp_s) return p.peak * tau / p.ramp_s;
  if (tau > p.duration_s - p.ramp_s)
    return p.peak * (p.duration_s - tau) / p.ramp_s;
  return p.peak;
}

double load_factor(const PhaseWindow& w, double t) {
  if (w.phase.kind != PhaseKind::Grip) return w.load_begin;
  const double frac = (t - w.start_s) / (w.end_s - w.start_s);
  return w.load_begin + (w.load_end - w.load_begin) * frac;
}

}  // namespace

LabeledSequence generate_scenario(const ScenarioSpec& spec,
                                  const ContactParams& params,
                                  const GridSpec& grid, std::uint64_t seed) {
  spec.validate();
  const Patch patch = make_patch(params, grid);

  std::vector<PhaseWindow> windows;
  double t = 0.0, load = 0.0;
  for (const Phase& p : spec.phases) {
    PhaseWindow w;
    w.phase = p;
    w.start_s = t;
    w.end_s = t + p.duration_s;
    w.load_begin = load;
    w.load_end = (p.kind == PhaseKind::Grip) ? p.peak : load;
    windows.push_back(w);
    t = w.end_s;
    load = w.load_end;
  }
  const double total_s = t;

  LabeledSequence seq;
  seq.grid = grid;
  seq.frame_rate_hz = spec.frame_rate_hz;

  // Full-slip torque of the full-load field, computed once on demand;
  // rotate phases command torque as a fraction of it.
  double m_slip = 0.0;
  bool m_slip_ready = false;
  auto full_slip = [&]() {
    if (!m_slip_ready) {
      m_slip = patch_full_slip_torque(patch);
      m_slip_ready = true;
    }
    return m_slip;
  };

  // Per-phase analytic marks. Crossing levels are exact for translation
  // and bisected for torsion.
  const double thr = spec.truth_threshold;
  for (const PhaseWindow& w : windows) {
    PhaseMark mark;
    mark.kind = w.phase.kind;
    mark.start_s = w.start_s;
    mark.end_s = w.end_s;
    const bool motion = w.phase.kind == PhaseKind::Translate ||
                        w.phase.kind == PhaseKind::Rotate;
    if (motion && w.load_begin > 0.0 && thr > 0.0) {
      double level_cross;  // level (fraction of the gross-slip bound) where
                           // the stick fraction meets the truth threshold
      if (w.phase.kind == PhaseKind::Translate) {
        level_cross = 1.0 - std::pow(thr, 1.5);
      } else {
        const double c_cross = patch.a * std::sqrt(thr);
        level_cross = torsion_moment_for_core(patch, c_cross) / full_slip();
      }
      if (level_cross < w.phase.peak) {
        const double dt = w.phase.ramp_s * level_cross / w.phase.peak;
        mark.slip_onset_s = w.start_s + dt;
        mark.slip_end_s = w.end_s - dt;
      }
      const double dt_full = w.phase.ramp_s / w.phase.peak;
      mark.full_slip_onset_s = w.start_s + dt_full;
      mark.full_slip_end_s = w.end_s - dt_full;
    }
    seq.phases.push_back(mark);
  }

  // Contact segments of the piecewise-linear load profile.
  std::vector<std::pair<double, double>> segments;
  bool in_contact = false;
  double seg_start = 0.0;
  for (const PhaseWindow& w : windows) {
    if (!in_contact && (w.load_begin > 0.0 || w.load_end > 0.0)) {
      in_contact = true;
      seg_start = w.start_s;
    }
    if (in_contact && w.load_begin > 0.0 && w.load_end == 0.0) {
      segments.emplace_back(seg_start, w.end_s);
      in_contact = false;
    }
  }
  if (in_contact) segments.emplace_back(seg_start, total_s);

  // Truth intervals: Stick everywhere in contact except between the
  // per-phase slip crossings.
  for (const auto& [seg_begin, seg_end] : segments) {
    double pos = seg_begin;
    for (const PhaseMark& mark : seq.phases) {
      if (!mark.slip_onset_s || *mark.slip_onset_s < seg_begin ||
          *mark.slip_onset_s >= seg_end)
        continue;
      if (*mark.slip_onset_s > pos)
        seq.truth.push_back({pos, *mark.slip_onset_s, SlipState::Stick});
      const double slip_end = std::min(*mark.slip_end_s, seg_end);
      seq.truth.push_back({*mark.slip_onset_s, slip_end, SlipState::Slip});
      pos = slip_end;
    }
    if (pos < seg_end) seq.truth.push_back({pos, seg_end, SlipState::Stick});
  }

  // Frames.
  const long frame_count = std::lround(total_s * spec.frame_rate_hz);
  seq.frames.reserve(frame_count);
  std::size_t cursor = 0;
  std::vector<double> fx, fy;
  for (long k = 0; k < frame_count; ++k) {
    const double tk = static_cast<double>(k) / spec.frame_rate_hz;
    while (cursor + 1 < windows.size() && tk >= windows[cursor].end_s)
      ++cursor;
    const PhaseWindow& w = windows[cursor];
    const double f = load_factor(w, tk);

    ForceFrame frame = ForceFrame::zero(grid.n, tk);
    if (f > 0.0) {
      const double level = motion_level(w.phase, tk - w.start_s);
      if (w.phase.kind == PhaseKind::Translate && level > 0.0) {
        const double norm = std::hypot(w.phase.dir_x, w.phase.dir_y);
        cm_fields(patch, level * patch.mu * patch.load, w.phase.dir_x / norm,
                  w.phase.dir_y / norm, fx, fy);
        frame.fx = fx;
        frame.fy = fy;
      } else if (w.phase.kind == PhaseKind::Rotate && level > 0.0) {
        torsion_fields(patch, level * full_slip(), grid, fx, fy);
        frame.fx = fx;
        frame.fy = fy;
      }
      for (std::size_t i = 0; i < patch.fz.size(); ++i)
        frame.fz[i] = f * patch.fz[i];
      if (f != 1.0) {
        for (double& v : frame.fx) v *= f;
        for (double& v : frame.fy) v *= f;
      }
    }
    if (spec.noise_sigma_n > 0.0) {
      const std::uint64_t frame_seed =
          splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(k) + 1));
      frame = add_noise(frame, spec.noise_sigma_n, frame_seed);
    }
    seq.frames.push_back(std::move(frame));
  }
  return seq;
}

ScenarioSpec preset_scenario(std::string_view name) {
  ScenarioSpec spec;
  if (name == "ttrtt") {
    spec.phases = {Phase::grip(),
                   Phase::hold(),
                   Phase::translate(1.0, 0.0),
                   Phase::hold(),
                   Phase::translate(0.0, 1.0),
                   Phase::hold(),
                   Phase::rotate(),
                   Phase::hold(),
                   Phase::translate(-1.0, 0.0),
                   Phase::hold(),
                   Phase::translate(0.0, -1.0),
                   Phase::hold()};
  } else if (name == "translate-only") {
    spec.phases = {Phase::grip(), Phase::hold(), Phase::translate(1.0, 0.0),
                   Phase::hold()};
  } else if (name == "rotate-only") {
    spec.phases = {Phase::grip(), Phase::hold(), Phase::rotate(),
                   Phase::hold()};
  } else {
    throw std::invalid_argument("unknown scenario preset: " +
                                std::string(name));
  }
  return spec;
}

std::vector<std::string> preset_names() {
  return {"ttrtt", "translate-only", "rotate-only"};
}

}  // namespace taxslip

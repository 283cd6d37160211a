#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "taxslip/force_frame.hpp"
#include "taxslip/grid.hpp"
#include "taxslip/slip_detector.hpp"

namespace taxslip {

/// Circular soft contact patch pressed into the sensing surface.
struct ContactParams {
  double radius_mm = 9.0;   ///< contact disc radius a
  double load_n = 5.0;      ///< total normal load P
  double mu = 0.45;         ///< friction coefficient of the pairing
  double center_x_mm = 0.0; ///< patch center offset from the grid center
  double center_y_mm = 0.0;

  /// Requires a > 0, P > 0 and the disc fully inside the grid.
  void validate(const GridSpec& grid) const;
};

/// Slip-region tractions are written at (1 + kTieBreakDelta) * mu * fz so
/// the non-strict per-taxel stick test resolves to slip wherever the
/// construction says sliding.
inline constexpr double kTieBreakDelta = 1e-6;

/// Hertz pressure discretized on the grid: fz(r) proportional to
/// sqrt(1 - r^2/a^2) inside the disc, zero outside, rescaled so the taxel
/// sum equals the load exactly.
std::vector<double> hertz_pressure(const ContactParams& params,
                                   const GridSpec& grid);

/// Cattaneo-Mindlin partial-slip shear under tangential load Q along the
/// given direction. For Q < mu*P the stick disc has radius
/// c = a * (1 - Q/(mu*P))^(1/3); traction follows the superposed-Hertz
/// form q(r) = mu*p0*[sqrt(1-r^2/a^2) - (c/a)*sqrt(1-r^2/c^2)] inside the
/// stick disc (Johnson, Contact Mechanics, ch. 7). In the slip annulus
/// q = mu*fz, tie-broken upward; for Q >= mu*P the whole patch slides.
void cattaneo_mindlin_shear(const ContactParams& params, double tangential_n,
                            double dir_x, double dir_y, const GridSpec& grid,
                            std::vector<double>& fx, std::vector<double>& fy);

/// Azimuthal partial-slip traction under a twisting moment about the patch
/// center. Taxels outside the stick core carry mu*fz (tie-broken upward);
/// inside, the magnitude ramps linearly with radius and stays strictly
/// below the local bound. The core radius is solved by bisection so the
/// net moment matches the commanded torque; at or above the full-slip
/// torque the whole patch slides.
void torsional_partial_slip(const ContactParams& params, double torque_nmm,
                            const GridSpec& grid, std::vector<double>& fx,
                            std::vector<double>& fy);

/// Torque at which the torsional stick core vanishes: taxel sum of
/// mu * fz_i * r_i over the contact disc.
double full_slip_torque(const ContactParams& params, const GridSpec& grid);

/// Stick core radius of the torsional construction for a commanded torque,
/// clamped to the contact radius. a at zero torque, 0 at full slip.
double torsional_stick_core_mm(const ContactParams& params, double torque_nmm,
                               const GridSpec& grid);

/// Closed-form stick fraction of the translational construction:
/// (1 - Q/(mu*P))^(2/3), 0 once Q exceeds mu*P.
double analytic_stick_fraction(double tangential_n, double mu, double load_n);

/// Adds i.i.d. zero-mean Gaussian noise to every component of every taxel.
/// Deterministic given the seed; sigma = 0 returns the frame unchanged.
ForceFrame add_noise(const ForceFrame& frame, double sigma_n,
                     std::uint64_t seed);

enum class PhaseKind { Grip, Hold, Translate, Rotate };

std::string to_string(PhaseKind kind);

/// One segment of a loading program. All ramps are piecewise-linear in
/// time. Motion phases rise to the peak over ramp_s, dwell, then fall
/// back to zero over ramp_s.
struct Phase {
  PhaseKind kind = PhaseKind::Hold;
  double duration_s = 1.0;
  /// Grip: target load as a fraction of P. Translate: peak Q in units of
  /// mu*P (must exceed 1). Rotate: peak torque in units of the full-slip
  /// torque (must exceed 1).
  double peak = 0.0;
  double ramp_s = 0.0;  ///< rise/fall time of motion phases
  double dir_x = 1.0, dir_y = 0.0;  ///< shear direction (Translate)

  static Phase grip(double duration_s = 1.0, double target = 1.0);
  static Phase hold(double duration_s = 1.0);
  static Phase translate(double dir_x, double dir_y, double peak = 1.3,
                         double duration_s = 2.5, double ramp_s = 0.15);
  static Phase rotate(double peak = 1.3, double duration_s = 2.5,
                      double ramp_s = 0.15);
};

struct ScenarioSpec {
  std::vector<Phase> phases;
  double frame_rate_hz = 100.0;
  double noise_sigma_n = 0.005;
  /// Ground-truth threshold on the analytic stick fraction; the default
  /// matches the detector threshold, making the labels the
  /// infinite-resolution limit of the detector.
  double truth_threshold = 0.5;

  void validate() const;
  double duration_s() const;
};

/// Ground-truth interval, Stick or Slip. Intervals are disjoint, ordered
/// and gap-free over the contact portion of the timeline.
struct TruthInterval {
  double start_s = 0.0;
  double end_s = 0.0;
  SlipState state = SlipState::Stick;
};

/// Analytic bookkeeping for one phase: when the stick fraction crossed the
/// truth threshold and when the load crossed the gross-slip bound.
struct PhaseMark {
  PhaseKind kind = PhaseKind::Hold;
  double start_s = 0.0;
  double end_s = 0.0;
  std::optional<double> slip_onset_s, slip_end_s;
  std::optional<double> full_slip_onset_s, full_slip_end_s;
};

/// Frames plus analytic ground truth. `phases` is in-memory bookkeeping
/// only; serialization keeps frames and truth.
struct LabeledSequence {
  GridSpec grid;
  double frame_rate_hz = 0.0;
  std::vector<ForceFrame> frames;
  std::vector<TruthInterval> truth;
  std::vector<PhaseMark> phases;

  /// Truth interval containing the timestamp, if any. Intervals are
  /// half-open [start, end) except the last, which is closed.
  const TruthInterval* truth_at(double timestamp_s) const;
};

/// Samples the loading program at the frame rate and labels each instant
/// from the analytic stick fraction. Deterministic given the seed.
LabeledSequence generate_scenario(const ScenarioSpec& spec,
                                  const ContactParams& params,
                                  const GridSpec& grid, std::uint64_t seed);

/// Named presets: "ttrtt", "translate-only", "rotate-only".
ScenarioSpec preset_scenario(std::string_view name);
std::vector<std::string> preset_names();

}  // namespace taxslip

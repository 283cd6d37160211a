#pragma once

#include <optional>
#include <string>

#include "taxslip/force_frame.hpp"

namespace taxslip {

/// Per-frame grasp state. NoContact is emitted if and only if the contact
/// set of a frame is empty.
enum class SlipState { Stick, Slip, NoContact };

std::string to_string(SlipState state);

enum class DetectorKind { CoulombBaseline, StickRatio };

std::string to_string(DetectorKind kind);

struct DetectorConfig {
  double mu = 0.45;              ///< friction coefficient
  double sr_threshold = 0.5;     ///< slip when stick ratio falls below this
  double contact_epsilon_n = 1e-3;  ///< normal force above which a taxel counts as contact
  int debounce_k = 1;            ///< consecutive identical raw states required to switch

  void validate() const;
  bool operator==(const DetectorConfig&) const = default;
};

/// Stick/contact census of one frame. `sr` is defined only when
/// contact_count > 0; contact_count == 0 is a valid result (no contact),
/// not an error.
struct StickRatioResult {
  int stick_count = 0;    ///< C: contacting taxels within the local friction bound
  int contact_count = 0;  ///< A: taxels with fz above the contact epsilon
  std::optional<double> sr;  ///< C/A when A > 0
};

/// Total-force Coulomb test: Slip when the total shear magnitude exceeds
/// mu times the total normal force, NoContact when the contact set is
/// empty, Stick otherwise.
SlipState coulomb_baseline_classify(const ForceFrame& frame,
                                    const DetectorConfig& config);

/// Per-taxel census: a contacting taxel sticks when its local shear
/// magnitude sqrt(fx^2 + fy^2) is at most mu times its normal force
/// (equality counts as stick).
StickRatioResult stick_ratio(const ForceFrame& frame,
                             const DetectorConfig& config);

/// Level rule on the stick ratio: NoContact when A == 0, Slip when
/// sr < sr_threshold (strict), Stick otherwise.
SlipState stick_ratio_classify(const StickRatioResult& result,
                               const DetectorConfig& config);

/// Sequential wrapper around one classifier with a k-of-k debounce.
///
/// The public state switches only after debounce_k consecutive identical
/// raw classifications; with debounce_k = 1 the output equals the raw
/// classifier. NoContact bypasses the debounce and takes effect
/// immediately. The first frame seeds the public state directly.
/// Frames must arrive in nondecreasing timestamp order.
class DebouncedDetector {
 public:
  DebouncedDetector(DetectorKind kind, DetectorConfig config);

  /// Consume one frame, return the debounced public state.
  SlipState step(const ForceFrame& frame);

  SlipState state() const { return state_; }
  DetectorKind kind() const { return kind_; }
  const DetectorConfig& config() const { return config_; }

  /// Most recent per-frame census (StickRatio kind only; empty result
  /// for the baseline).
  const StickRatioResult& last_ratio() const { return last_ratio_; }

  void reset();

 private:
  DetectorKind kind_;
  DetectorConfig config_;
  SlipState state_ = SlipState::NoContact;
  SlipState candidate_ = SlipState::NoContact;
  int run_length_ = 0;
  bool seen_frame_ = false;
  double last_timestamp_s_ = 0.0;
  StickRatioResult last_ratio_;
};

}  // namespace taxslip

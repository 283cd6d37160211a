#include "taxslip/slip_detector.hpp"

#include <cmath>
#include <stdexcept>

#include "taxslip/aggregates.hpp"

namespace taxslip {

std::string to_string(SlipState state) {
  switch (state) {
    case SlipState::Stick: return "STICK";
    case SlipState::Slip: return "SLIP";
    case SlipState::NoContact: return "NO_CONTACT";
  }
  return "?";
}

std::string to_string(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::CoulombBaseline: return "baseline";
    case DetectorKind::StickRatio: return "stick_ratio";
  }
  return "?";
}

void DetectorConfig::validate() const {
  if (!(mu > 0.0))
    throw std::invalid_argument("DetectorConfig: mu must be positive");
  if (!(sr_threshold >= 0.0 && sr_threshold <= 1.0))
    throw std::invalid_argument("DetectorConfig: sr_threshold must be in [0, 1]");
  if (!(contact_epsilon_n >= 0.0))
    throw std::invalid_argument("DetectorConfig: contact_epsilon must be >= 0");
  if (debounce_k < 1)
    throw std::invalid_argument("DetectorConfig: debounce_k must be >= 1");
}

namespace {

void require_shape(const ForceFrame& frame) {
  if (!frame.shape_ok())
    throw std::invalid_argument("ForceFrame: field sizes do not match n*n");
}

}  // namespace

SlipState coulomb_baseline_classify(const ForceFrame& frame,
                                    const DetectorConfig& config) {
  config.validate();
  require_shape(frame);
  bool any_contact = false;
  double normal = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < frame.fz.size(); ++i) {
    const double fz = frame.fz[i];
    normal += fz;
    sx += frame.fx[i];
    sy += frame.fy[i];
    any_contact |= fz > config.contact_epsilon_n;
  }
  if (!any_contact) return SlipState::NoContact;
  const double shear = std::hypot(sx, sy);
  return shear > config.mu * normal ? SlipState::Slip : SlipState::Stick;
}

StickRatioResult stick_ratio(const ForceFrame& frame,
                             const DetectorConfig& config) {
  config.validate();
  require_shape(frame);
  StickRatioResult result;
  for (std::size_t i = 0; i < frame.fz.size(); ++i) {
    const double fz = frame.fz[i];
    if (fz <= config.contact_epsilon_n) continue;
    ++result.contact_count;
    const double shear = std::hypot(frame.fx[i], frame.fy[i]);
    if (shear <= config.mu * fz) ++result.stick_count;
  }
  if (result.contact_count > 0)
    result.sr = static_cast<double>(result.stick_count) / result.contact_count;
  return result;
}

SlipState stick_ratio_classify(const StickRatioResult& result,
                               const DetectorConfig& config) {
  config.validate();
  if (result.contact_count == 0) return SlipState::NoContact;
  return *result.sr < config.sr_threshold ? SlipState::Slip : SlipState::Stick;
}

DebouncedDetector::DebouncedDetector(DetectorKind kind, DetectorConfig config)
    : kind_(kind), config_(config) {
  config_.validate();
}

void DebouncedDetector::reset() {
  state_ = SlipState::NoContact;
  candidate_ = SlipState::NoContact;
  run_length_ = 0;
  seen_frame_ = false;
  last_timestamp_s_ = 0.0;
  last_ratio_ = StickRatioResult{};
}

SlipState DebouncedDetector::step(const ForceFrame& frame) {
  if (seen_frame_ && frame.timestamp_s < last_timestamp_s_)
    throw std::invalid_argument("DebouncedDetector: frame timestamp regressed");
  last_timestamp_s_ = frame.timestamp_s;

  SlipState raw;
  if (kind_ == DetectorKind::CoulombBaseline) {
    raw = coulomb_baseline_classify(frame, config_);
  } else {
    last_ratio_ = stick_ratio(frame, config_);
    raw = stick_ratio_classify(last_ratio_, config_);
  }

  if (!seen_frame_ || raw == SlipState::NoContact) {
    // First observation and contact loss are published immediately.
    seen_frame_ = true;
    state_ = raw;
    candidate_ = raw;
    run_length_ = 0;
    return state_;
  }

  if (raw == state_) {
    run_length_ = 0;
    candidate_ = raw;
    return state_;
  }

  if (raw == candidate_) {
    ++run_length_;
  } else {
    candidate_ = raw;
    run_length_ = 1;
  }
  if (run_length_ >= config_.debounce_k) {
    state_ = candidate_;
    run_length_ = 0;
  }
  return state_;
}

}  // namespace taxslip

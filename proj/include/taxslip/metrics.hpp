#pragma once

#include <optional>
#include <string>
#include <vector>

#include "taxslip/contact_sim.hpp"
#include "taxslip/slip_detector.hpp"

namespace taxslip {

/// Frame-level classification counts with SLIP as the positive class.
/// Frames predicted NO_CONTACT, and frames whose timestamp no truth
/// interval covers, are excluded from scoring and tallied in `ignored`.
struct ConfusionCounts {
  long tp = 0;
  long fp = 0;
  long tn = 0;
  long fn = 0;
  long ignored = 0;

  long scored() const { return tp + fp + tn + fn; }
};

/// Scores of one detector over one or more runs. A ratio whose
/// denominator is zero is reported as absent, never coerced to 0.
struct MetricsReport {
  DetectorKind detector = DetectorKind::CoulombBaseline;
  DetectorConfig config;
  std::string run_id;
  int run_count = 1;
  ConfusionCounts counts;
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;
};

/// One row of the per-frame decision trace: the aggregate forces, the
/// stick ratio when defined, both detectors' published states, and the
/// ground-truth state when the frame is covered by a truth interval.
struct TraceRecord {
  double timestamp_s = 0.0;
  double normal_n = 0.0;
  double shear_mag_n = 0.0;
  double moment_z_nmm = 0.0;
  std::optional<double> sr;
  SlipState baseline_state = SlipState::NoContact;
  SlipState stick_ratio_state = SlipState::NoContact;
  std::optional<SlipState> truth;
};

struct ComparisonResult {
  MetricsReport baseline;
  MetricsReport stick_ratio;
  std::vector<TraceRecord> trace;
};

/// Compares per-frame predictions against the sequence's truth
/// intervals. Throws std::invalid_argument unless there is exactly one
/// prediction per frame.
MetricsReport score_run(const std::vector<SlipState>& predictions,
                        const LabeledSequence& sequence, DetectorKind detector,
                        const DetectorConfig& config,
                        const std::string& run_id = "");

/// Arithmetic mean of the metric values across runs; a metric absent in
/// some runs is averaged over the runs where it is defined. Counts are
/// summed for reference. Throws std::invalid_argument on an empty list
/// or mixed detector/config.
MetricsReport average_runs(const std::vector<MetricsReport>& runs);

/// Runs both detectors over the same frames and scores each against the
/// sequence's truth, returning the paired reports and the full decision
/// trace.
ComparisonResult compare_detectors(const LabeledSequence& sequence,
                                   const DetectorConfig& config);

}  // namespace taxslip

#include "taxslip/metrics.hpp"

#include <stdexcept>

#include "taxslip/aggregates.hpp"

namespace taxslip {

namespace {

void finalize_ratios(MetricsReport& report) {
  const ConfusionCounts& c = report.counts;
  if (c.scored() > 0)
    report.accuracy = static_cast<double>(c.tp + c.tn) / c.scored();
  if (c.tp + c.fp > 0)
    report.precision = static_cast<double>(c.tp) / (c.tp + c.fp);
  if (c.tp + c.fn > 0)
    report.recall = static_cast<double>(c.tp) / (c.tp + c.fn);
}

std::optional<double> mean_defined(
    const std::vector<MetricsReport>& runs,
    std::optional<double> MetricsReport::*metric) {
  double sum = 0.0;
  int defined = 0;
  for (const MetricsReport& r : runs) {
    if (r.*metric) {
      sum += *(r.*metric);
      ++defined;
    }
  }
  if (defined == 0) return std::nullopt;
  return sum / defined;
}

}  // namespace

MetricsReport score_run(const std::vector<SlipState>& predictions,
                        const LabeledSequence& sequence, DetectorKind detector,
                        const DetectorConfig& config,
                        const std::string& run_id) {
  if (predictions.size() != sequence.frames.size())
    throw std::invalid_argument(
        "score_run: prediction count does not match frame count");
  MetricsReport report;
  report.detector = detector;
  report.config = config;
  report.run_id = run_id;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const SlipState pred = predictions[i];
    if (pred == SlipState::NoContact) {
      ++report.counts.ignored;
      continue;
    }
    const TruthInterval* truth =
        sequence.truth_at(sequence.frames[i].timestamp_s);
    if (truth == nullptr) {
      ++report.counts.ignored;
      continue;
    }
    const bool pred_slip = pred == SlipState::Slip;
    const bool true_slip = truth->state == SlipState::Slip;
    if (pred_slip && true_slip)
      ++report.counts.tp;
    else if (pred_slip && !true_slip)
      ++report.counts.fp;
    else if (!pred_slip && true_slip)
      ++report.counts.fn;
    else
      ++report.counts.tn;
  }
  finalize_ratios(report);
  return report;
}

MetricsReport average_runs(const std::vector<MetricsReport>& runs) {
  if (runs.empty())
    throw std::invalid_argument("average_runs: empty report list");
  for (const MetricsReport& r : runs) {
    if (r.detector != runs.front().detector ||
        !(r.config == runs.front().config))
      throw std::invalid_argument("average_runs: mixed detector or config");
  }
  MetricsReport avg;
  avg.detector = runs.front().detector;
  avg.config = runs.front().config;
  avg.run_id = "average";
  avg.run_count = 0;
  for (const MetricsReport& r : runs) {
    avg.run_count += r.run_count;
    avg.counts.tp += r.counts.tp;
    avg.counts.fp += r.counts.fp;
    avg.counts.tn += r.counts.tn;
    avg.counts.fn += r.counts.fn;
    avg.counts.ignored += r.counts.ignored;
  }
  avg.accuracy = mean_defined(runs, &MetricsReport::accuracy);
  avg.precision = mean_defined(runs, &MetricsReport::precision);
  avg.recall = mean_defined(runs, &MetricsReport::recall);
  return avg;
}

ComparisonResult compare_detectors(const LabeledSequence& sequence,
                                   const DetectorConfig& config) {
  ComparisonResult result;
  DebouncedDetector baseline(DetectorKind::CoulombBaseline, config);
  DebouncedDetector ratio(DetectorKind::StickRatio, config);
  std::vector<SlipState> baseline_pred, ratio_pred;
  baseline_pred.reserve(sequence.frames.size());
  ratio_pred.reserve(sequence.frames.size());
  result.trace.reserve(sequence.frames.size());
  for (const ForceFrame& frame : sequence.frames) {
    TraceRecord rec;
    rec.timestamp_s = frame.timestamp_s;
    const AggregateForces agg = aggregate_forces(frame, sequence.grid);
    rec.normal_n = agg.normal_n;
    rec.shear_mag_n = agg.shear_mag_n;
    rec.moment_z_nmm = agg.moment_z_nmm;
    rec.sr = stick_ratio(frame, config).sr;
    rec.baseline_state = baseline.step(frame);
    rec.stick_ratio_state = ratio.step(frame);
    if (const TruthInterval* truth = sequence.truth_at(frame.timestamp_s))
      rec.truth = truth->state;
    baseline_pred.push_back(rec.baseline_state);
    ratio_pred.push_back(rec.stick_ratio_state);
    result.trace.push_back(rec);
  }
  result.baseline = score_run(baseline_pred, sequence,
                              DetectorKind::CoulombBaseline, config);
  result.stick_ratio =
      score_run(ratio_pred, sequence, DetectorKind::StickRatio, config);
  return result;
}

}  // namespace taxslip

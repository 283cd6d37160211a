#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "taxslip/aggregates.hpp"
#include "taxslip/contact_sim.hpp"
#include "taxslip/metrics.hpp"
#include "taxslip/sequence_io.hpp"
#include "taxslip/slip_detector.hpp"

namespace {

using namespace taxslip;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

struct SimOptions {
  std::string scenario = "ttrtt";
  std::string out;
  std::uint64_t seed = 0;
  int n = 20;
  double pitch_mm = 1.5;
  double radius_mm = 9.0;
  double load_n = 5.0;
  double mu = 0.45;
  double center_x_mm = 0.0;
  double center_y_mm = 0.0;
  double noise_sigma_n = 0.005;
  double rate_hz = 100.0;
  double truth_threshold = 0.5;
};

int run_sim(const SimOptions& opt) {
  ScenarioSpec spec;
  try {
    spec = preset_scenario(opt.scenario);
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\npresets:";
    for (const std::string& name : preset_names()) std::cerr << ' ' << name;
    std::cerr << '\n';
    return 2;
  }
  spec.noise_sigma_n = opt.noise_sigma_n;
  spec.frame_rate_hz = opt.rate_hz;
  spec.truth_threshold = opt.truth_threshold;

  const GridSpec grid{opt.n, opt.pitch_mm};
  ContactParams params;
  params.radius_mm = opt.radius_mm;
  params.load_n = opt.load_n;
  params.mu = opt.mu;
  params.center_x_mm = opt.center_x_mm;
  params.center_y_mm = opt.center_y_mm;

  const LabeledSequence seq = generate_scenario(spec, params, grid, opt.seed);
  write_sequence(seq, opt.out);

  long slip_intervals = 0;
  for (const TruthInterval& iv : seq.truth)
    if (iv.state == SlipState::Slip) ++slip_intervals;
  std::cout << "frames = " << seq.frames.size() << '\n'
            << "slip_intervals = " << slip_intervals << '\n'
            << "duration_s = " << fmt(spec.duration_s()) << '\n'
            << "out = " << opt.out << '\n';
  return 0;
}

struct DetectOptions {
  std::string in;
  std::string detector = "both";
  DetectorConfig config;
  bool realtime = false;
  std::string trace_out;
  std::string report_out;
};

int run_detect(const DetectOptions& opt) {
  if (opt.detector != "both" && opt.detector != "baseline" &&
      opt.detector != "stick-ratio") {
    std::cerr << "unknown detector \"" << opt.detector
              << "\"; expected baseline, stick-ratio, or both\n";
    return 2;
  }
  opt.config.validate();
  const LabeledSequence seq = read_sequence(opt.in);

  ComparisonResult result;
  if (opt.realtime) {
    // Pace the frames at the nominal rate, as a live sensor would
    // deliver them, and measure the achieved throughput.
    using clock = std::chrono::steady_clock;
    DebouncedDetector baseline(DetectorKind::CoulombBaseline, opt.config);
    DebouncedDetector ratio(DetectorKind::StickRatio, opt.config);
    std::vector<SlipState> base_pred, ratio_pred;
    const auto start = clock::now();
    const double t0 = seq.frames.empty() ? 0.0 : seq.frames[0].timestamp_s;
    for (const ForceFrame& frame : seq.frames) {
      std::this_thread::sleep_until(
          start + std::chrono::duration_cast<clock::duration>(
                      std::chrono::duration<double>(frame.timestamp_s - t0)));
      base_pred.push_back(baseline.step(frame));
      ratio_pred.push_back(ratio.step(frame));
    }
    const double elapsed =
        std::chrono::duration<double>(clock::now() - start).count();
    // The trace and reports come from a second, unpaced pass; the
    // detectors are deterministic, so the states match the paced run.
    result = compare_detectors(seq, opt.config);
    std::cout << "nominal_rate_hz = " << fmt(seq.frame_rate_hz) << '\n'
              << "achieved_fps = "
              << fmt(elapsed > 0.0 ? seq.frames.size() / elapsed : 0.0)
              << '\n';
  } else {
    result = compare_detectors(seq, opt.config);
  }

  std::vector<MetricsReport> reports;
  if (opt.detector != "stick-ratio") reports.push_back(result.baseline);
  if (opt.detector != "baseline") reports.push_back(result.stick_ratio);

  if (!opt.trace_out.empty()) write_trace_csv(result.trace, opt.trace_out);

  std::cout << "frames = " << seq.frames.size() << '\n';
  if (seq.truth.empty()) {
    std::cout << "truth = absent\n";
    if (!opt.report_out.empty()) {
      std::cerr << "--report needs a label sidecar with truth intervals\n";
      return 2;
    }
    return 0;
  }
  std::cout << format_report(reports);
  if (!opt.report_out.empty()) write_report(reports, opt.report_out);
  return 0;
}

struct BenchOptions {
  std::string in;
  int repetitions = 5;
};

int run_bench(const BenchOptions& opt) {
  const LabeledSequence seq = read_sequence(opt.in);
  if (seq.frames.empty()) {
    std::cerr << "bench needs at least one frame\n";
    return 2;
  }
  const DetectorConfig config;
  using clock = std::chrono::steady_clock;
  double mean_fps = 0.0, min_fps = 0.0;
  long slip_frames = 0;
  for (int rep = 0; rep < opt.repetitions; ++rep) {
    // Loop the sequence until enough wall time has passed for a stable
    // rate estimate; small files would otherwise time as pure jitter.
    DebouncedDetector detector(DetectorKind::StickRatio, config);
    long frames = 0;
    long slips = 0;
    double offset = 0.0;
    const double span =
        seq.frames.back().timestamp_s + 1.0 / seq.frame_rate_hz;
    const auto start = clock::now();
    double elapsed = 0.0;
    do {
      for (ForceFrame frame : seq.frames) {
        frame.timestamp_s += offset;
        if (detector.step(frame) == SlipState::Slip) ++slips;
        ++frames;
      }
      offset += span;
      elapsed = std::chrono::duration<double>(clock::now() - start).count();
    } while (elapsed < 0.05);
    const double fps = frames / elapsed;
    mean_fps += fps;
    min_fps = rep == 0 ? fps : std::min(min_fps, fps);
    slip_frames = slips;
  }
  mean_fps /= opt.repetitions;
  std::cout << "frames = " << seq.frames.size() << '\n'
            << "repetitions = " << opt.repetitions << '\n'
            << "mean_fps = " << fmt(mean_fps) << '\n'
            << "min_fps = " << fmt(min_fps) << '\n'
            << "slip_frames_last_rep = " << slip_frames << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tactile slip detection: simulate, detect, benchmark"};
  app.require_subcommand(1);

  SimOptions sim;
  CLI::App* sim_cmd =
      app.add_subcommand("sim", "generate a labeled scenario frame file");
  sim_cmd->add_option("--scenario", sim.scenario,
                      "preset: ttrtt, translate-only, rotate-only");
  sim_cmd->add_option("--out", sim.out, "output .taxfrm path")->required();
  sim_cmd->add_option("--seed", sim.seed, "noise seed");
  sim_cmd->add_option("--n", sim.n, "taxels per side");
  sim_cmd->add_option("--pitch", sim.pitch_mm, "taxel pitch [mm]");
  sim_cmd->add_option("--radius", sim.radius_mm, "contact radius [mm]");
  sim_cmd->add_option("--load", sim.load_n, "normal load [N]");
  sim_cmd->add_option("--mu", sim.mu, "friction coefficient");
  sim_cmd->add_option("--center-x", sim.center_x_mm, "patch center x [mm]");
  sim_cmd->add_option("--center-y", sim.center_y_mm, "patch center y [mm]");
  sim_cmd->add_option("--noise", sim.noise_sigma_n,
                      "force noise sigma [N], 0 disables");
  sim_cmd->add_option("--rate", sim.rate_hz, "frame rate [Hz]");
  sim_cmd->add_option("--truth-threshold", sim.truth_threshold,
                      "stick fraction below which truth says SLIP");

  DetectOptions det;
  CLI::App* det_cmd =
      app.add_subcommand("detect", "run detectors over a frame file");
  det_cmd->add_option("--in", det.in, "input .taxfrm path")->required();
  det_cmd->add_option("--detector", det.detector,
                      "baseline, stick-ratio, or both");
  det_cmd->add_option("--mu", det.config.mu, "friction coefficient");
  det_cmd->add_option("--sr-threshold", det.config.sr_threshold,
                      "stick ratio below which the state is SLIP");
  det_cmd->add_option("--epsilon", det.config.contact_epsilon_n,
                      "contact threshold on fz [N]");
  det_cmd->add_option("--debounce", det.config.debounce_k,
                      "consecutive frames required to switch state");
  det_cmd->add_flag("--realtime", det.realtime,
                    "pace frames at the nominal rate");
  det_cmd->add_option("--trace", det.trace_out, "per-frame trace CSV path");
  det_cmd->add_option("--report", det.report_out, "metrics report path");

  BenchOptions bench;
  CLI::App* bench_cmd =
      app.add_subcommand("bench", "measure stick-ratio pipeline throughput");
  bench_cmd->add_option("--in", bench.in, "input .taxfrm path")->required();
  bench_cmd->add_option("--repetitions", bench.repetitions, "timing runs")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(sim_cmd)) return run_sim(sim);
    if (app.got_subcommand(det_cmd)) return run_detect(det);
    if (app.got_subcommand(bench_cmd)) return run_bench(bench);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

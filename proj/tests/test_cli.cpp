#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct CmdResult {
  int status = -1;
  std::string output;  // stdout and stderr interleaved
};

CmdResult run_cmd(const std::string& args) {
  const std::string cmd = std::string(TAXSLIP_CLI) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CmdResult result;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0)
    result.output.append(buf, got);
  const int rc = pclose(pipe);
  result.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return result;
}

fs::path temp_path(const std::string& name) {
  return fs::temp_directory_path() / ("taxslip_cli_" + name);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

/// Values of "key = value" lines, keyed per report section. Keys before
/// the first "detector" line land in section "".
std::map<std::string, std::map<std::string, std::string>> parse_sections(
    const std::string& text) {
  std::map<std::string, std::map<std::string, std::string>> sections;
  std::string current;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    const std::size_t sep = line.find(" = ");
    if (sep == std::string::npos) continue;
    const std::string key = line.substr(0, sep);
    const std::string value = line.substr(sep + 3);
    if (key == "detector") current = value;
    sections[current][key] = value;
  }
  return sections;
}

double metric(const std::map<std::string, std::string>& section,
              const std::string& key) {
  const auto it = section.find(key);
  REQUIRE(it != section.end());
  REQUIRE(it->second != "absent");
  return std::stod(it->second);
}

long line_count(const std::string& text) {
  long lines = 0;
  for (char c : text) lines += c == '\n';
  return lines;
}

}  // namespace

TEST_CASE("unknown scenario preset exits nonzero and lists presets") {
  const CmdResult r = run_cmd("sim --scenario wiggle --out " +
                              temp_path("never.taxfrm").string());
  CHECK(r.status != 0);
  CHECK(r.output.find("ttrtt") != std::string::npos);
  CHECK(r.output.find("rotate-only") != std::string::npos);
}

TEST_CASE("sim writes the sequence and reports the slip intervals") {
  const fs::path out = temp_path("ttrtt.taxfrm");
  const CmdResult r = run_cmd("sim --scenario ttrtt --seed 7 --rate 25 --out " +
                              out.string());
  REQUIRE(r.status == 0);
  CHECK(r.output.find("slip_intervals = 5") != std::string::npos);
  CHECK(fs::exists(out));
  CHECK(fs::exists(temp_path("ttrtt.labels")));

  const CmdResult rot =
      run_cmd("sim --scenario rotate-only --seed 7 --rate 25 --out " +
              temp_path("rot.taxfrm").string());
  REQUIRE(rot.status == 0);
  CHECK(rot.output.find("slip_intervals = 1") != std::string::npos);
}

TEST_CASE("identical seeds give byte-identical files") {
  const fs::path a = temp_path("det_a.taxfrm");
  const fs::path b = temp_path("det_b.taxfrm");
  const std::string common =
      "sim --scenario translate-only --seed 11 --rate 25 --out ";
  REQUIRE(run_cmd(common + a.string()).status == 0);
  REQUIRE(run_cmd(common + b.string()).status == 0);
  CHECK(read_file(a) == read_file(b));
  CHECK(read_file(temp_path("det_a.labels")) ==
        read_file(temp_path("det_b.labels")));
}

TEST_CASE("detect runs both detectors and emits trace and report") {
  const fs::path in = temp_path("both.taxfrm");
  REQUIRE(run_cmd("sim --scenario translate-only --seed 3 --rate 20 --out " +
                  in.string())
              .status == 0);
  const fs::path trace = temp_path("both_trace.csv");
  const fs::path report = temp_path("both_report.txt");
  const CmdResult r =
      run_cmd("detect --in " + in.string() + " --trace " + trace.string() +
              " --report " + report.string());
  REQUIRE(r.status == 0);

  const std::string report_text = read_file(report);
  const auto sections = parse_sections(report_text);
  REQUIRE(sections.count("baseline") == 1);
  REQUIRE(sections.count("stick_ratio") == 1);
  CHECK(metric(sections.at("stick_ratio"), "accuracy") >= 0.0);

  // One header line plus one row per frame (5.5 s at 20 Hz).
  CHECK(line_count(read_file(trace)) == 1 + 110);

  SUBCASE("trace and report are deterministic") {
    const fs::path trace2 = temp_path("both_trace2.csv");
    const fs::path report2 = temp_path("both_report2.txt");
    REQUIRE(run_cmd("detect --in " + in.string() + " --trace " +
                    trace2.string() + " --report " + report2.string())
                .status == 0);
    CHECK(read_file(trace2) == read_file(trace));
    CHECK(read_file(report2) == read_file(report));
  }
}

TEST_CASE("single-detector selection filters the report") {
  const fs::path in = temp_path("single.taxfrm");
  REQUIRE(run_cmd("sim --scenario translate-only --seed 3 --rate 25 --out " +
                  in.string())
              .status == 0);
  const CmdResult r =
      run_cmd("detect --in " + in.string() + " --detector stick-ratio");
  REQUIRE(r.status == 0);
  const auto sections = parse_sections(r.output);
  CHECK(sections.count("stick_ratio") == 1);
  CHECK(sections.count("baseline") == 0);

  const CmdResult bad =
      run_cmd("detect --in " + in.string() + " --detector wobble");
  CHECK(bad.status != 0);
}

TEST_CASE("noiseless translate-only meets the oracle recall bound") {
  const fs::path in = temp_path("noiseless.taxfrm");
  REQUIRE(run_cmd("sim --scenario translate-only --noise 0 --n 40 "
                  "--pitch 0.75 --seed 1 --out " +
                  in.string())
              .status == 0);
  const CmdResult r = run_cmd("detect --in " + in.string());
  REQUIRE(r.status == 0);
  const auto sections = parse_sections(r.output);
  CHECK(metric(sections.at("baseline"), "recall") >= 0.95);
  CHECK(metric(sections.at("stick_ratio"), "recall") >= 0.95);
}

TEST_CASE("rotational slip splits the detectors") {
  const fs::path in = temp_path("rotonly.taxfrm");
  REQUIRE(run_cmd("sim --scenario rotate-only --noise 0 --rate 50 --seed 1 "
                  "--out " +
                  in.string())
              .status == 0);
  const CmdResult base =
      run_cmd("detect --in " + in.string() + " --detector baseline");
  REQUIRE(base.status == 0);
  CHECK(metric(parse_sections(base.output).at("baseline"), "recall") == 0.0);

  const CmdResult ratio =
      run_cmd("detect --in " + in.string() + " --detector stick-ratio");
  REQUIRE(ratio.status == 0);
  CHECK(metric(parse_sections(ratio.output).at("stick_ratio"), "recall") >
        0.0);
}

TEST_CASE("detect rejects a corrupted frame file") {
  const fs::path in = temp_path("corrupt.taxfrm");
  std::ofstream out(in, std::ios::binary);
  out << "NOTAFRMXjunk";
  out.close();
  const CmdResult r = run_cmd("detect --in " + in.string());
  CHECK(r.status != 0);
  CHECK(r.output.find("magic") != std::string::npos);
}

TEST_CASE("realtime replay paces to the nominal rate") {
  const fs::path in = temp_path("realtime.taxfrm");
  REQUIRE(run_cmd("sim --scenario translate-only --rate 100 --seed 2 --out " +
                  in.string())
              .status == 0);
  const CmdResult r =
      run_cmd("detect --in " + in.string() + " --realtime");
  REQUIRE(r.status == 0);
  const auto sections = parse_sections(r.output);
  const double fps = metric(sections.at(""), "achieved_fps");
  CHECK(fps > 50.0);
  CHECK(fps < 200.0);
}

TEST_CASE("bench reports throughput above the real-time bar") {
  const fs::path small = temp_path("bench20.taxfrm");
  REQUIRE(run_cmd("sim --scenario translate-only --rate 25 --seed 4 --out " +
                  small.string())
              .status == 0);
  const CmdResult r =
      run_cmd("bench --in " + small.string() + " --repetitions 3");
  REQUIRE(r.status == 0);
  const auto sections = parse_sections(r.output);
  const double mean = metric(sections.at(""), "mean_fps");
  const double min = metric(sections.at(""), "min_fps");
  CHECK(min <= mean);
  CHECK(min >= 50.0);

  SUBCASE("quadrupling the taxel count slows the pipeline down") {
    const fs::path big = temp_path("bench40.taxfrm");
    REQUIRE(run_cmd("sim --scenario translate-only --rate 25 --n 40 "
                    "--pitch 0.75 --seed 4 --out " +
                    big.string())
                .status == 0);
    const CmdResult r40 =
        run_cmd("bench --in " + big.string() + " --repetitions 3");
    REQUIRE(r40.status == 0);
    CHECK(metric(parse_sections(r40.output).at(""), "mean_fps") < mean);
  }
}

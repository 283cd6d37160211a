#include "taxslip/sequence_io.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "taxslip/aggregates.hpp"
#include "test_util.hpp"

using namespace taxslip;
namespace fs = std::filesystem;

namespace {

fs::path temp_path(const std::string& name) {
  return fs::temp_directory_path() / ("taxslip_io_" + name);
}

// Recorded when the committed fixture was generated; see data/README.
constexpr double kGoldenLoadedNormalN = 5.0828259566242195;
constexpr std::size_t kGoldenTruthIntervals = 3;

LabeledSequence small_sequence(std::uint64_t seed, int n, int frames) {
  std::mt19937_64 rng(seed);
  LabeledSequence seq;
  seq.grid = GridSpec{n, 1.25};
  seq.frame_rate_hz = 50.0;
  for (int k = 0; k < frames; ++k)
    seq.frames.push_back(
        testutil::random_frame(rng, n, static_cast<double>(k) / 50.0));
  seq.truth.push_back({0.0, 0.02 * frames, SlipState::Stick});
  return seq;
}

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

void write_bytes(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("label sidecar path") {
  CHECK(labels_path_for("run.taxfrm") == fs::path("run.labels"));
  CHECK(labels_path_for("/tmp/a/b.taxfrm") == fs::path("/tmp/a/b.labels"));
}

TEST_CASE("sequence round-trip") {
  const LabeledSequence seq = small_sequence(31, 6, 4);
  const fs::path path = temp_path("roundtrip.taxfrm");
  write_sequence(seq, path);
  const LabeledSequence back = read_sequence(path);

  CHECK(back.grid.n == seq.grid.n);
  CHECK(back.grid.pitch_mm == seq.grid.pitch_mm);  // 1.25 is exact in f32
  CHECK(back.frame_rate_hz == seq.frame_rate_hz);
  REQUIRE(back.frames.size() == seq.frames.size());
  for (std::size_t k = 0; k < seq.frames.size(); ++k) {
    CHECK(back.frames[k].timestamp_s == seq.frames[k].timestamp_s);
    for (std::size_t i = 0; i < seq.frames[k].taxel_count(); ++i) {
      // Payload quantizes to 32-bit floats, nothing more.
      CHECK(back.frames[k].fx[i] ==
            static_cast<double>(static_cast<float>(seq.frames[k].fx[i])));
      CHECK(back.frames[k].fz[i] ==
            static_cast<double>(static_cast<float>(seq.frames[k].fz[i])));
    }
  }
  REQUIRE(back.truth.size() == seq.truth.size());
  CHECK(back.truth[0].start_s == seq.truth[0].start_s);
  CHECK(back.truth[0].end_s == seq.truth[0].end_s);
  CHECK(back.truth[0].state == seq.truth[0].state);
}

TEST_CASE("empty sequence writes a bare header") {
  LabeledSequence seq;
  seq.grid = GridSpec{5, 2.0};
  seq.frame_rate_hz = 100.0;
  const fs::path path = temp_path("empty.taxfrm");
  write_sequence(seq, path);
  CHECK(fs::file_size(path) == kFrameFileHeaderBytes);
  const LabeledSequence back = read_sequence(path);
  CHECK(back.frames.empty());
  CHECK(back.grid.n == 5);
}

TEST_CASE("file size follows the fixed layout") {
  // 22 header bytes plus 100 frames of (8 + 3*400*4) bytes at n = 20.
  LabeledSequence seq;
  seq.grid = GridSpec{};
  seq.frame_rate_hz = 100.0;
  for (int k = 0; k < 100; ++k)
    seq.frames.push_back(ForceFrame::zero(20, 0.01 * k));
  const fs::path path = temp_path("layout.taxfrm");
  write_sequence(seq, path);
  CHECK(fs::file_size(path) == 22 + 100 * (8 + 3 * 400 * 4));
  CHECK(fs::file_size(path) == 480822);
}

TEST_CASE("header bytes are pinned") {
  LabeledSequence seq;
  seq.grid = GridSpec{};  // n = 20, pitch 1.5 mm
  seq.frame_rate_hz = 100.0;
  const fs::path path = temp_path("header.taxfrm");
  write_sequence(seq, path);
  const std::string bytes = read_bytes(path);
  REQUIRE(bytes.size() == 22);
  CHECK(bytes.substr(0, 8) == "TAXFRM01");
  const std::string expected_tail = {
      0x14, 0x00,                                            // n = 20
      0x00, 0x00, static_cast<char>(0xc0), 0x3f,             // 1.5f
      0x00, 0x00, 0x00, 0x00,                                // count = 0
      0x00, 0x00, static_cast<char>(0xc8), 0x42};            // 100.0f
  CHECK(bytes.substr(8) == expected_tail);
}

TEST_CASE("malformed files are rejected with the failure class") {
  const LabeledSequence seq = small_sequence(32, 5, 3);
  const fs::path good = temp_path("good.taxfrm");
  write_sequence(seq, good);
  const std::string bytes = read_bytes(good);

  SUBCASE("bad magic") {
    std::string bad = bytes;
    bad[0] = 'X';
    const fs::path path = temp_path("badmagic.taxfrm");
    write_bytes(path, bad);
    try {
      read_sequence(path);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.kind() == ParseError::Kind::BadMagic);
      CHECK(std::string(e.what()).find("magic") != std::string::npos);
    }
  }

  SUBCASE("truncated payload reports expected and actual sizes") {
    const std::string bad = bytes.substr(0, bytes.size() - 3);
    const fs::path path = temp_path("truncated.taxfrm");
    write_bytes(path, bad);
    try {
      read_sequence(path);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.kind() == ParseError::Kind::Truncated);
      CHECK(std::string(e.what()).find(std::to_string(bytes.size())) !=
            std::string::npos);
      CHECK(std::string(e.what()).find(std::to_string(bad.size())) !=
            std::string::npos);
    }
  }

  SUBCASE("trailing garbage is a size mismatch") {
    const fs::path path = temp_path("trailing.taxfrm");
    write_bytes(path, bytes + "xx");
    CHECK_THROWS_AS(read_sequence(path), ParseError);
  }

  SUBCASE("non-finite payload") {
    std::string bad = bytes;
    // First fx scalar of the first frame: after header and timestamp.
    const std::size_t off = kFrameFileHeaderBytes + 8;
    bad[off + 0] = 0x00;
    bad[off + 1] = 0x00;
    bad[off + 2] = static_cast<char>(0xc0);
    bad[off + 3] = 0x7f;  // quiet NaN
    const fs::path path = temp_path("nan.taxfrm");
    write_bytes(path, bad);
    try {
      read_sequence(path);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.kind() == ParseError::Kind::NonFinite);
    }
  }

  SUBCASE("zero taxel count in the header") {
    std::string bad = bytes.substr(0, kFrameFileHeaderBytes);
    bad[8] = 0x00;
    bad[9] = 0x00;  // n = 0
    bad[14] = 0x00;
    bad[15] = 0x00;
    bad[16] = 0x00;
    bad[17] = 0x00;  // count = 0 to keep sizes consistent
    const fs::path path = temp_path("badn.taxfrm");
    write_bytes(path, bad);
    try {
      read_sequence(path);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.kind() == ParseError::Kind::BadHeader);
    }
  }

  SUBCASE("missing file") {
    CHECK_THROWS_AS(read_sequence(temp_path("does_not_exist.taxfrm")),
                    std::runtime_error);
  }
}

TEST_CASE("label sidecar handling") {
  const LabeledSequence seq = small_sequence(33, 5, 3);
  const fs::path path = temp_path("labels.taxfrm");
  write_sequence(seq, path);

  SUBCASE("removing the sidecar yields empty truth") {
    fs::remove(labels_path_for(path));
    const LabeledSequence back = read_sequence(path);
    CHECK(back.truth.empty());
  }

  SUBCASE("malformed label line") {
    std::ofstream out(labels_path_for(path));
    out << "0.0,1.0\n";
    out.close();
    CHECK_THROWS_AS(read_sequence(path), ParseError);
  }

  SUBCASE("unknown state name") {
    std::ofstream out(labels_path_for(path));
    out << "0.0,1.0,WOBBLE\n";
    out.close();
    try {
      read_sequence(path);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.kind() == ParseError::Kind::BadLabels);
    }
  }
}

TEST_CASE("frame shape mismatches are rejected on write") {
  LabeledSequence seq = small_sequence(34, 5, 2);
  seq.frames[1] = ForceFrame::zero(6, 1.0);
  CHECK_THROWS_AS(write_sequence(seq, temp_path("mismatch.taxfrm")),
                  std::invalid_argument);
}

TEST_CASE("trace CSV layout") {
  std::vector<TraceRecord> trace(2);
  trace[0].timestamp_s = 0.0;
  trace[0].normal_n = 5.0;
  trace[0].shear_mag_n = 1.0;
  trace[0].moment_z_nmm = 0.25;
  trace[0].sr = 0.75;
  trace[0].baseline_state = SlipState::Stick;
  trace[0].stick_ratio_state = SlipState::Slip;
  trace[0].truth = SlipState::Slip;
  trace[1].timestamp_s = 0.01;  // sr and truth left absent
  const fs::path path = temp_path("trace.csv");
  write_trace_csv(trace, path);
  const std::string text = read_bytes(path);
  CHECK(text ==
        "timestamp_s,f_n,f_t,m_z,sr,state_baseline,state_stick_ratio,truth\n"
        "0,5,1,0.25,0.75,STICK,SLIP,SLIP\n"
        "0.01,0,0,0,,NO_CONTACT,NO_CONTACT,\n");
}

TEST_CASE("report formatting") {
  MetricsReport r;
  r.detector = DetectorKind::StickRatio;
  r.run_id = "avg";
  r.run_count = 3;
  r.counts = {10, 2, 30, 1, 4};
  r.accuracy = 40.0 / 43.0;
  r.precision = 10.0 / 12.0;
  const std::string text = format_report({r});
  CHECK(text.find("detector = stick_ratio\n") != std::string::npos);
  CHECK(text.find("run_id = avg\n") != std::string::npos);
  CHECK(text.find("runs = 3\n") != std::string::npos);
  CHECK(text.find("tp = 10\n") != std::string::npos);
  CHECK(text.find("ignored = 4\n") != std::string::npos);
  CHECK(text.find("accuracy = 0.930232558\n") != std::string::npos);
  CHECK(text.find("recall = absent\n") != std::string::npos);

  const fs::path path = temp_path("report.txt");
  write_report({r, r}, path);
  const std::string two = read_bytes(path);
  // Two sections, blank-line separated.
  CHECK(two.find("\n\ndetector = stick_ratio\n") != std::string::npos);
}

TEST_CASE("golden fixture stays readable and stable") {
  const fs::path fixture = fs::path(TAXSLIP_TEST_DATA) / "golden.taxfrm";
  REQUIRE(fs::exists(fixture));
  const LabeledSequence seq = read_sequence(fixture);
  CHECK(seq.grid.n == 20);
  CHECK(seq.grid.pitch_mm == 1.5);
  CHECK(seq.frame_rate_hz == 50.0);
  REQUIRE(seq.frames.size() == 275);
  REQUIRE(!seq.truth.empty());

  // Frozen at fixture creation: normal force of the first fully loaded
  // frame (t = 1.0 s, grip complete), and the truth interval count.
  const ForceFrame& loaded = seq.frames[50];
  CHECK(loaded.timestamp_s == 1.0);
  CHECK(total_normal_force(loaded) ==
        doctest::Approx(kGoldenLoadedNormalN).epsilon(1e-9));
  CHECK(seq.truth.size() == kGoldenTruthIntervals);
}

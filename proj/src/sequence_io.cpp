#include "taxslip/sequence_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace taxslip {

namespace {

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8)
    out.push_back(static_cast<char>((v >> shift) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int shift = 0; shift < 64; shift += 8)
    out.push_back(static_cast<char>((v >> shift) & 0xff));
}

void put_f32(std::string& out, float v) {
  put_u32(out, std::bit_cast<std::uint32_t>(v));
}

void put_f64(std::string& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

/// Checked little-endian reader over an in-memory file image.
struct Cursor {
  const unsigned char* p;
  std::size_t left;

  std::uint64_t take(int bytes) {
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i)
      v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    p += bytes;
    left -= static_cast<std::size_t>(bytes);
    return v;
  }

  std::uint16_t u16() { return static_cast<std::uint16_t>(take(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(take(4)); }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(take(8)); }
};

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_metric(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

SlipState parse_state(std::string_view token, const std::string& context) {
  if (token == "STICK") return SlipState::Stick;
  if (token == "SLIP") return SlipState::Slip;
  if (token == "NO_CONTACT") return SlipState::NoContact;
  throw ParseError(ParseError::Kind::BadLabels,
                   context + ": unknown state \"" + std::string(token) + "\"");
}

double parse_number(std::string_view token, const std::string& context) {
  double v = 0.0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw ParseError(ParseError::Kind::BadLabels,
                     context + ": bad number \"" + std::string(token) + "\"");
  return v;
}

void write_file(const std::filesystem::path& path, const std::string& bytes,
                bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out)
    throw std::runtime_error("cannot open for writing: " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_labels(const LabeledSequence& sequence,
                  const std::filesystem::path& path) {
  std::string text;
  for (const TruthInterval& iv : sequence.truth) {
    text += fmt_double(iv.start_s);
    text += ',';
    text += fmt_double(iv.end_s);
    text += ',';
    text += to_string(iv.state);
    text += '\n';
  }
  write_file(path, text, false);
}

std::vector<TruthInterval> read_labels(const std::filesystem::path& path) {
  std::vector<TruthInterval> truth;
  std::ifstream in(path);
  if (!in) return truth;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string context =
        path.filename().string() + ":" + std::to_string(line_no);
    const std::size_t c1 = line.find(',');
    const std::size_t c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos)
      throw ParseError(ParseError::Kind::BadLabels,
                       context + ": expected start_s,end_s,state");
    std::string_view view(line);
    TruthInterval iv;
    iv.start_s = parse_number(view.substr(0, c1), context);
    iv.end_s = parse_number(view.substr(c1 + 1, c2 - c1 - 1), context);
    iv.state = parse_state(view.substr(c2 + 1), context);
    truth.push_back(iv);
  }
  return truth;
}

void append_report(std::string& out, const MetricsReport& r) {
  auto metric_line = [&](const char* key, const std::optional<double>& v) {
    out += key;
    out += " = ";
    out += v ? fmt_metric(*v) : "absent";
    out += '\n';
  };
  out += "detector = " + to_string(r.detector) + '\n';
  if (!r.run_id.empty()) out += "run_id = " + r.run_id + '\n';
  out += "runs = " + std::to_string(r.run_count) + '\n';
  out += "mu = " + fmt_metric(r.config.mu) + '\n';
  out += "sr_threshold = " + fmt_metric(r.config.sr_threshold) + '\n';
  out += "contact_epsilon_n = " + fmt_metric(r.config.contact_epsilon_n) + '\n';
  out += "debounce_k = " + std::to_string(r.config.debounce_k) + '\n';
  out += "tp = " + std::to_string(r.counts.tp) + '\n';
  out += "fp = " + std::to_string(r.counts.fp) + '\n';
  out += "tn = " + std::to_string(r.counts.tn) + '\n';
  out += "fn = " + std::to_string(r.counts.fn) + '\n';
  out += "ignored = " + std::to_string(r.counts.ignored) + '\n';
  metric_line("accuracy", r.accuracy);
  metric_line("precision", r.precision);
  metric_line("recall", r.recall);
}

}  // namespace

std::filesystem::path labels_path_for(const std::filesystem::path& path) {
  std::filesystem::path p = path;
  p.replace_extension(".labels");
  return p;
}

void write_sequence(const LabeledSequence& sequence,
                    const std::filesystem::path& path) {
  const int n = sequence.grid.n;
  for (const ForceFrame& frame : sequence.frames) {
    if (frame.n != n || !frame.shape_ok())
      throw std::invalid_argument(
          "write_sequence: frame shape does not match the grid");
  }
  if (sequence.frames.size() > 0xffffffffu)
    throw std::invalid_argument("write_sequence: too many frames");

  std::string bytes;
  const std::size_t per_frame = 8 + 3 * static_cast<std::size_t>(n) * n * 4;
  bytes.reserve(kFrameFileHeaderBytes + sequence.frames.size() * per_frame);
  bytes += kFrameFileMagic;
  put_u16(bytes, static_cast<std::uint16_t>(n));
  put_f32(bytes, static_cast<float>(sequence.grid.pitch_mm));
  put_u32(bytes, static_cast<std::uint32_t>(sequence.frames.size()));
  put_f32(bytes, static_cast<float>(sequence.frame_rate_hz));
  for (const ForceFrame& frame : sequence.frames) {
    put_f64(bytes, frame.timestamp_s);
    for (const auto* field : {&frame.fx, &frame.fy, &frame.fz})
      for (double v : *field) put_f32(bytes, static_cast<float>(v));
  }
  write_file(path, bytes, true);
  write_labels(sequence, labels_path_for(path));
}

LabeledSequence read_sequence(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());

  if (bytes.size() < kFrameFileMagic.size() ||
      std::string_view(bytes).substr(0, kFrameFileMagic.size()) !=
          kFrameFileMagic) {
    std::string found(std::string_view(bytes).substr(
        0, std::min<std::size_t>(bytes.size(), 8)));
    for (char& c : found)
      if (static_cast<unsigned char>(c) < 0x20 ||
          static_cast<unsigned char>(c) > 0x7e)
        c = '?';
    throw ParseError(ParseError::Kind::BadMagic,
                     path.string() + ": bad magic \"" + found +
                         "\", expected \"" + std::string(kFrameFileMagic) +
                         "\"");
  }
  if (bytes.size() < kFrameFileHeaderBytes)
    throw ParseError(ParseError::Kind::Truncated,
                     path.string() + ": truncated header, expected " +
                         std::to_string(kFrameFileHeaderBytes) +
                         " bytes, got " + std::to_string(bytes.size()));

  Cursor cur{reinterpret_cast<const unsigned char*>(bytes.data()) +
                 kFrameFileMagic.size(),
             bytes.size() - kFrameFileMagic.size()};
  const int n = cur.u16();
  const float pitch = cur.f32();
  const std::uint32_t count = cur.u32();
  const float rate = cur.f32();
  if (n < 1)
    throw ParseError(ParseError::Kind::BadHeader,
                     path.string() + ": n must be >= 1, got " +
                         std::to_string(n));
  if (!std::isfinite(pitch) || !(pitch > 0.0f))
    throw ParseError(ParseError::Kind::BadHeader,
                     path.string() + ": pitch must be positive and finite");
  if (!std::isfinite(rate) || !(rate > 0.0f))
    throw ParseError(ParseError::Kind::BadHeader,
                     path.string() + ": frame rate must be positive and finite");

  const std::size_t taxels = static_cast<std::size_t>(n) * n;
  const std::size_t per_frame = 8 + 3 * taxels * 4;
  const std::size_t expected = kFrameFileHeaderBytes + count * per_frame;
  if (bytes.size() != expected)
    throw ParseError(ParseError::Kind::Truncated,
                     path.string() + ": payload size mismatch, expected " +
                         std::to_string(expected) + " bytes, got " +
                         std::to_string(bytes.size()));

  LabeledSequence seq;
  seq.grid = GridSpec{n, static_cast<double>(pitch)};
  seq.frame_rate_hz = static_cast<double>(rate);
  seq.frames.reserve(count);
  for (std::uint32_t k = 0; k < count; ++k) {
    ForceFrame frame = ForceFrame::zero(n, cur.f64());
    for (auto* field : {&frame.fx, &frame.fy, &frame.fz})
      for (double& v : *field) v = static_cast<double>(cur.f32());
    if (!std::isfinite(frame.timestamp_s) || !frame.finite())
      throw ParseError(ParseError::Kind::NonFinite,
                       path.string() + ": non-finite value in frame " +
                           std::to_string(k));
    seq.frames.push_back(std::move(frame));
  }
  seq.truth = read_labels(labels_path_for(path));
  return seq;
}

void write_trace_csv(const std::vector<TraceRecord>& trace,
                     const std::filesystem::path& path) {
  std::string text =
      "timestamp_s,f_n,f_t,m_z,sr,state_baseline,state_stick_ratio,truth\n";
  for (const TraceRecord& rec : trace) {
    text += fmt_metric(rec.timestamp_s);
    text += ',';
    text += fmt_metric(rec.normal_n);
    text += ',';
    text += fmt_metric(rec.shear_mag_n);
    text += ',';
    text += fmt_metric(rec.moment_z_nmm);
    text += ',';
    if (rec.sr) text += fmt_metric(*rec.sr);
    text += ',';
    text += to_string(rec.baseline_state);
    text += ',';
    text += to_string(rec.stick_ratio_state);
    text += ',';
    if (rec.truth) text += to_string(*rec.truth);
    text += '\n';
  }
  write_file(path, text, false);
}

std::string format_report(const std::vector<MetricsReport>& reports) {
  std::string out;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (i > 0) out += '\n';
    append_report(out, reports[i]);
  }
  return out;
}

void write_report(const std::vector<MetricsReport>& reports,
                  const std::filesystem::path& path) {
  write_file(path, format_report(reports), false);
}

}  // namespace taxslip

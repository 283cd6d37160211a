#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "taxslip/contact_sim.hpp"
#include "taxslip/metrics.hpp"

namespace taxslip {

/// Frame-file parse failure; the kind survives so callers can report
/// bad magic, truncation, non-finite payloads, and malformed headers or
/// label sidecars distinctly.
class ParseError : public std::runtime_error {
 public:
  enum class Kind { BadMagic, BadHeader, Truncated, NonFinite, BadLabels };

  ParseError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Binary frame-file layout (all little-endian):
///   magic "TAXFRM01" (8 bytes), n (u16), pitch_mm (f32),
///   frame_count (u32), frame_rate_hz (f32); 22 header bytes total.
/// Each frame: timestamp (f64), then 3*n*n f32 in component-major order
/// (all fx row-major, then all fy, then all fz).
inline constexpr std::string_view kFrameFileMagic = "TAXFRM01";
inline constexpr std::size_t kFrameFileHeaderBytes = 22;

/// Sibling label file of one frame file: same path with the extension
/// replaced by ".labels", one "start_s,end_s,STATE" line per interval.
std::filesystem::path labels_path_for(const std::filesystem::path& path);

void write_sequence(const LabeledSequence& sequence,
                    const std::filesystem::path& path);

/// Reads a frame file and its label sidecar; a missing sidecar yields
/// empty truth. Throws ParseError on malformed input.
LabeledSequence read_sequence(const std::filesystem::path& path);

void write_trace_csv(const std::vector<TraceRecord>& trace,
                     const std::filesystem::path& path);

std::string format_report(const std::vector<MetricsReport>& reports);
void write_report(const std::vector<MetricsReport>& reports,
                  const std::filesystem::path& path);

}  // namespace taxslip

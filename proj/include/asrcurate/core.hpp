#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace asrcurate {

/// Default training window, in seconds.
inline constexpr double kDefaultWindowSeconds = 30.0;

struct TranscriptLine {
  double start_time = 0.0;  // seconds
  double end_time = 0.0;    // seconds
  std::string text;         // one caption line, no line breaks

  friend bool operator==(const TranscriptLine&, const TranscriptLine&) = default;
};

struct TranscriptDocument {
  std::string doc_id;
  std::vector<TranscriptLine> lines;
  std::optional<std::string> text_lang;
  /// Corpus-relative path the document was read from; empty when built in
  /// memory. Used to mirror the input layout on write.
  std::string source_path;

  std::size_t char_count() const;
  /// Line texts joined with single spaces.
  std::string full_text() const;
  /// Stable sort of lines by start_time.
  void sort_lines();

  friend bool operator==(const TranscriptDocument&,
                         const TranscriptDocument&) = default;
};

struct AudioTextPair {
  std::string doc_id;
  double audio_duration = 0.0;
  std::optional<std::string> audio_lang;
  std::optional<double> audio_lang_confidence;
  TranscriptDocument manual;
  std::optional<TranscriptDocument> machine;

  friend bool operator==(const AudioTextPair&, const AudioTextPair&) = default;
};

enum class CaseTag { kUpper, kLower, kMixed };

std::string_view to_string(CaseTag tag);

struct FilterDecision {
  std::string doc_id;
  std::string stage;
  bool kept = true;
  std::string reason;  // machine-readable; required when !kept
  std::optional<double> score;

  friend bool operator==(const FilterDecision&, const FilterDecision&) = default;
};

FilterDecision keep(std::string doc_id, std::string stage,
                    std::string reason = {},
                    std::optional<double> score = std::nullopt);
FilterDecision drop(std::string doc_id, std::string stage, std::string reason,
                    std::optional<double> score = std::nullopt);

struct Segment {
  std::string doc_id;
  std::size_t window_index = 0;
  double window_start = 0.0;
  double window_duration = 0.0;
  std::vector<TranscriptLine> lines;  // rebased to window_start

  /// "<doc_id>#<window_index>", the identifier used in segment-level
  /// decisions and output manifests.
  std::string key() const;
  std::string full_text() const;

  friend bool operator==(const Segment&, const Segment&) = default;
};

enum class Severity { kWarning, kError };

struct Finding {
  Severity severity = Severity::kError;
  std::string field;  // e.g. "manual.lines[3].end_time"
  std::string message;
};

/// Checks every data-model invariant of a pair. An empty result means the
/// pair is well formed; audio shorter than the captions is a warning only.
std::vector<Finding> validate_pair(const AudioTextPair& pair);

/// Hour accounting works in integer microseconds so that sums are exact.
long long to_microseconds(double seconds);
double microseconds_to_hours(long long us);

}  // namespace asrcurate

#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "asrcurate/core.hpp"
#include "asrcurate/langid.hpp"
#include "asrcurate/wer.hpp"

namespace asrcurate {

namespace stage {
inline constexpr std::string_view kLanguageAlign = "language-align";
inline constexpr std::string_view kCase = "case";
inline constexpr std::string_view kRepeats = "repeats";
inline constexpr std::string_view kDocWer = "doc-wer";
inline constexpr std::string_view kDedup = "dedup";
inline constexpr std::string_view kDecontaminate = "decontaminate";
inline constexpr std::string_view kSegment = "segment";
inline constexpr std::string_view kSegmentWer = "segment-wer";
}  // namespace stage

struct FilterConfig {
  std::string required_lang = "en";
  double doc_wer_threshold = 0.5;
  double segment_wer_threshold = 0.7;
  std::set<CaseTag> case_drop_set = {CaseTag::kUpper};
  std::size_t repeat_min_run = 2;
  NormalizerProfile profile = NormalizerProfile::kBasic;

  /// Throws UsageError on negative thresholds or repeat_min_run < 2.
  void validate() const;
};

/// Kept iff both the audio and text tags equal cfg.required_lang. The text
/// tag comes from the manual transcript's own tag, else the detector.
FilterDecision language_align(const AudioTextPair& pair,
                              const FilterConfig& cfg,
                              const LanguageDetector& detector =
                                  default_detector());

struct CaseCounts {
  std::size_t upper = 0;
  std::size_t lower = 0;
  std::size_t mixed = 0;

  std::size_t total() const { return upper + lower + mixed; }
  friend bool operator==(const CaseCounts&, const CaseCounts&) = default;
};

struct CaseResult {
  CaseTag tag = CaseTag::kMixed;
  CaseCounts counts;
};

/// Majority case over lines that contain letters; ties go to Mixed.
CaseResult case_tag(const TranscriptDocument& doc);

FilterDecision filter_case(const AudioTextPair& pair, const FilterConfig& cfg);

struct RepeatRun {
  std::size_t start = 0;
  std::size_t length = 0;

  friend bool operator==(const RepeatRun&, const RepeatRun&) = default;
};

/// Maximal runs of >= min_run consecutive lines with identical (NFC) text.
std::vector<RepeatRun> detect_repeats(const TranscriptDocument& doc,
                                      std::size_t min_run);

/// Score is the fraction of lines that sit inside a repeat run.
FilterDecision filter_repeats(const AudioTextPair& pair,
                              const FilterConfig& cfg);

/// Manual-vs-machine WER over whole documents; dropped iff WER > threshold.
FilterDecision doc_wer_filter(const AudioTextPair& pair,
                              const FilterConfig& cfg);

struct SegmentPair {
  Segment manual;
  Segment machine;
};

/// One decision per window (doc_id is the segment key). Throws DataError if
/// a manual and machine window disagree on the grid.
std::vector<FilterDecision> segment_wer_filter(
    std::span<const SegmentPair> windows, const FilterConfig& cfg);

/// Dispatches one of the four pointwise document filters by stage name.
FilterDecision apply_pointwise_filter(std::string_view stage_name,
                                      const AudioTextPair& pair,
                                      const FilterConfig& cfg);

bool is_pointwise_stage(std::string_view stage_name);

CaseTag parse_case_tag(std::string_view name);

}  // namespace asrcurate

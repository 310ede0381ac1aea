#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "asrcurate/core.hpp"

namespace asrcurate {

enum class SubtitleFormat { kSrt, kVtt };

/// Timestamps at or beyond this many seconds are rejected as corrupt.
inline constexpr double kMaxTimestampSeconds = 99.0 * 3600.0;

/// Picks the format from a file extension (".srt" / ".vtt", any case).
std::optional<SubtitleFormat> format_from_path(std::string_view path);

/// Sniffs the content: a WEBVTT signature, else an SRT-style timing arrow.
std::optional<SubtitleFormat> detect_format(std::string_view content);

/// Parses SRT or WebVTT bytes into a document with an empty doc_id.
///
/// Multi-line cues become one TranscriptLine per physical line, all sharing
/// the cue span. Inline markup (<i>, <v Speaker>, {\an8}, ...) is stripped,
/// text is NFC normalized, and lines are stably sorted by start time.
/// Throws ParseError (with the offending line number) on bad input.
TranscriptDocument parse_subtitle(std::string_view bytes,
                                  std::optional<SubtitleFormat> hint = {});

/// Writes a document back out. Consecutive lines sharing a time span are
/// grouped into one cue. Timestamps are rounded to milliseconds.
std::string serialize_subtitle(const TranscriptDocument& doc,
                               SubtitleFormat format);

/// "HH:MM:SS,mmm" (SRT) or "HH:MM:SS.mmm" (VTT).
std::string format_timestamp(double seconds, SubtitleFormat format);

}  // namespace asrcurate

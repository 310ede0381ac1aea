#pragma once

#include <span>
#include <vector>

#include "asrcurate/core.hpp"
#include "asrcurate/filters.hpp"

namespace asrcurate {

/// Cuts a document into fixed-stride windows over [0, audio_duration).
///
/// Each line goes to the window containing its start time and is never
/// split; its end time is clipped to the window. Lines starting at or past
/// the end of the audio land in the final window. Windows without lines are
/// dropped unless `keep_empty`. Throws DataError if audio_duration <= 0 and
/// UsageError if window <= 0.
std::vector<Segment> segment_document(const TranscriptDocument& doc,
                                      double audio_duration,
                                      double window = kDefaultWindowSeconds,
                                      bool keep_empty = false);

std::vector<Segment> segment_document(const AudioTextPair& pair,
                                      double window = kDefaultWindowSeconds,
                                      bool keep_empty = false);

/// Manual and machine windows of a pair on a shared grid, every window
/// included. Requires a machine transcript.
std::vector<SegmentPair> segment_window_pairs(const AudioTextPair& pair,
                                              double window =
                                                  kDefaultWindowSeconds);

/// Total window duration in hours, accumulated in whole microseconds.
double segment_hours(std::span<const Segment> segments);
long long segment_microseconds(std::span<const Segment> segments);

}  // namespace asrcurate

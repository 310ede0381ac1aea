#include "asrcurate/segmenter.hpp"

#include <algorithm>
#include <cmath>

#include "asrcurate/errors.hpp"

namespace asrcurate {

std::vector<Segment> segment_document(const TranscriptDocument& doc,
                                      double audio_duration, double window,
                                      bool keep_empty) {
  if (!(window > 0.0)) throw UsageError("segment window must be > 0");
  if (!(audio_duration > 0.0) || !std::isfinite(audio_duration)) {
    throw DataError("cannot segment '" + doc.doc_id +
                    "': audio_duration must be > 0");
  }
  const auto count =
      static_cast<std::size_t>(std::ceil(audio_duration / window));
  std::vector<Segment> windows(std::max<std::size_t>(count, 1));
  for (std::size_t k = 0; k < windows.size(); ++k) {
    auto& w = windows[k];
    w.doc_id = doc.doc_id;
    w.window_index = k;
    w.window_start = static_cast<double>(k) * window;
    w.window_duration = std::min(window, audio_duration - w.window_start);
  }
  // ceil() can overshoot by one when duration is an exact multiple that
  // does not divide cleanly in floating point.
  while (windows.size() > 1 && !(windows.back().window_duration > 0.0)) {
    windows.pop_back();
  }

  for (const auto& line : doc.lines) {
    auto k = static_cast<std::size_t>(
        std::max(0.0, std::floor(line.start_time / window)));
    k = std::min(k, windows.size() - 1);
    auto& w = windows[k];
    TranscriptLine rebased = line;
    rebased.start_time =
        std::clamp(line.start_time - w.window_start, 0.0, w.window_duration);
    rebased.end_time = std::clamp(line.end_time - w.window_start,
                                  rebased.start_time, w.window_duration);
    w.lines.push_back(std::move(rebased));
  }

  if (!keep_empty) {
    std::erase_if(windows, [](const Segment& s) { return s.lines.empty(); });
  }
  return windows;
}

std::vector<Segment> segment_document(const AudioTextPair& pair, double window,
                                      bool keep_empty) {
  return segment_document(pair.manual, pair.audio_duration, window,
                          keep_empty);
}

std::vector<SegmentPair> segment_window_pairs(const AudioTextPair& pair,
                                              double window) {
  if (!pair.machine) {
    throw DataError("'" + pair.doc_id + "' has no machine transcript");
  }
  auto manual = segment_document(pair.manual, pair.audio_duration, window, true);
  auto machine =
      segment_document(*pair.machine, pair.audio_duration, window, true);
  std::vector<SegmentPair> out;
  out.reserve(manual.size());
  for (std::size_t k = 0; k < manual.size(); ++k) {
    out.push_back({std::move(manual[k]), std::move(machine[k])});
  }
  return out;
}

long long segment_microseconds(std::span<const Segment> segments) {
  long long total = 0;
  for (const auto& s : segments) total += to_microseconds(s.window_duration);
  return total;
}

double segment_hours(std::span<const Segment> segments) {
  return microseconds_to_hours(segment_microseconds(segments));
}

}  // namespace asrcurate

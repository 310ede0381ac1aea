#include "asrcurate/core.hpp"

#include <algorithm>
#include <cmath>

#include "asrcurate/text.hpp"

namespace asrcurate {

std::size_t TranscriptDocument::char_count() const {
  std::size_t n = 0;
  for (const auto& line : lines) n += text::decode_utf8(line.text).size();
  return n;
}

std::string TranscriptDocument::full_text() const {
  std::string out;
  for (const auto& line : lines) {
    if (!out.empty() && !line.text.empty()) out.push_back(' ');
    out += line.text;
  }
  return out;
}

void TranscriptDocument::sort_lines() {
  std::stable_sort(lines.begin(), lines.end(),
                   [](const TranscriptLine& a, const TranscriptLine& b) {
                     return a.start_time < b.start_time;
                   });
}

std::string_view to_string(CaseTag tag) {
  switch (tag) {
    case CaseTag::kUpper:
      return "upper";
    case CaseTag::kLower:
      return "lower";
    case CaseTag::kMixed:
      return "mixed";
  }
  return "mixed";
}

FilterDecision keep(std::string doc_id, std::string stage, std::string reason,
                    std::optional<double> score) {
  return {std::move(doc_id), std::move(stage), true, std::move(reason), score};
}

FilterDecision drop(std::string doc_id, std::string stage, std::string reason,
                    std::optional<double> score) {
  return {std::move(doc_id), std::move(stage), false, std::move(reason), score};
}

std::string Segment::key() const {
  return doc_id + "#" + std::to_string(window_index);
}

std::string Segment::full_text() const {
  std::string out;
  for (const auto& line : lines) {
    if (!out.empty() && !line.text.empty()) out.push_back(' ');
    out += line.text;
  }
  return out;
}

namespace {

void check_document(const TranscriptDocument& doc, const std::string& prefix,
                    std::vector<Finding>& findings) {
  for (std::size_t i = 0; i < doc.lines.size(); ++i) {
    const auto& line = doc.lines[i];
    const std::string path = prefix + ".lines[" + std::to_string(i) + "]";
    if (!std::isfinite(line.start_time) || line.start_time < 0.0) {
      findings.push_back({Severity::kError, path + ".start_time",
                          "start_time must be a non-negative number"});
    }
    if (!(line.start_time <= line.end_time)) {
      findings.push_back({Severity::kError, path,
                          "start_time is after end_time"});
    }
    if (text::contains_line_break(line.text)) {
      findings.push_back({Severity::kError, path + ".text",
                          "text contains a line break"});
    }
    if (i > 0 && line.start_time < doc.lines[i - 1].start_time) {
      findings.push_back({Severity::kError, path + ".start_time",
                          "lines are not sorted by start_time"});
    }
  }
}

}  // namespace

std::vector<Finding> validate_pair(const AudioTextPair& pair) {
  std::vector<Finding> findings;
  if (pair.doc_id.empty()) {
    findings.push_back({Severity::kError, "doc_id", "doc_id is empty"});
  }
  if (pair.manual.doc_id != pair.doc_id) {
    findings.push_back({Severity::kError, "manual.doc_id",
                        "manual transcript doc_id differs from pair doc_id"});
  }
  if (pair.machine && pair.machine->doc_id != pair.doc_id) {
    findings.push_back({Severity::kError, "machine.doc_id",
                        "machine transcript doc_id differs from pair doc_id"});
  }
  if (!std::isfinite(pair.audio_duration) || pair.audio_duration < 0.0) {
    findings.push_back({Severity::kError, "audio_duration",
                        "audio_duration must be a non-negative number"});
  }
  if (pair.audio_lang_confidence &&
      !(*pair.audio_lang_confidence >= 0.0 &&
        *pair.audio_lang_confidence <= 1.0)) {
    findings.push_back({Severity::kError, "audio_lang_confidence",
                        "confidence outside [0, 1]"});
  }

  check_document(pair.manual, "manual", findings);
  if (pair.machine) check_document(*pair.machine, "machine", findings);

  double max_end = 0.0;
  for (const auto& line : pair.manual.lines) {
    max_end = std::max(max_end, line.end_time);
  }
  if (max_end > pair.audio_duration) {
    findings.push_back({Severity::kWarning, "audio_duration",
                        "captions extend past the end of the audio"});
  }
  return findings;
}

long long to_microseconds(double seconds) {
  return std::llround(seconds * 1e6);
}

double microseconds_to_hours(long long us) {
  return static_cast<double>(us) / 3.6e9;
}

}  // namespace asrcurate

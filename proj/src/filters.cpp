#include "asrcurate/filters.hpp"

#include <cmath>

#include "asrcurate/errors.hpp"
#include "asrcurate/text.hpp"

namespace asrcurate {

void FilterConfig::validate() const {
  if (!(doc_wer_threshold >= 0.0)) {
    throw UsageError("doc-wer-threshold must be >= 0");
  }
  if (!(segment_wer_threshold >= 0.0)) {
    throw UsageError("segment-wer-threshold must be >= 0");
  }
  if (repeat_min_run < 2) throw UsageError("repeat-min-run must be >= 2");
  if (required_lang.empty()) throw UsageError("required-lang is empty");
}

CaseTag parse_case_tag(std::string_view name) {
  if (name == "upper") return CaseTag::kUpper;
  if (name == "lower") return CaseTag::kLower;
  if (name == "mixed") return CaseTag::kMixed;
  throw UsageError("unknown case tag '" + std::string(name) + "'");
}

FilterDecision language_align(const AudioTextPair& pair,
                              const FilterConfig& cfg,
                              const LanguageDetector& detector) {
  const std::string name(stage::kLanguageAlign);
  if (!pair.audio_lang || pair.audio_lang->empty()) {
    return drop(pair.doc_id, name, "missing-audio-lang");
  }
  if (*pair.audio_lang != cfg.required_lang) {
    return drop(pair.doc_id, name, "mismatched-audio-lang");
  }

  std::optional<LanguageGuess> guess;
  if (pair.manual.text_lang && !pair.manual.text_lang->empty()) {
    guess = LanguageGuess{*pair.manual.text_lang, 1.0, true};
  } else if (!text::trim(pair.manual.full_text()).empty()) {
    guess = tag_text_language(pair.manual, detector);
  }
  if (!guess || guess->undetermined()) {
    return drop(pair.doc_id, name, "missing-text-lang");
  }
  if (guess->tag != cfg.required_lang) {
    return drop(pair.doc_id, name, "mismatched-text-lang", guess->confidence);
  }
  return keep(pair.doc_id, name, {}, guess->confidence);
}

CaseResult case_tag(const TranscriptDocument& doc) {
  CaseResult result;
  for (const auto& line : doc.lines) {
    bool any = false;
    bool all_upper = true;
    bool all_lower = true;
    for (char32_t c : text::decode_utf8(line.text)) {
      if (!text::is_alphabetic(c)) continue;
      any = true;
      all_upper &= text::is_uppercase(c);
      all_lower &= text::is_lowercase(c);
    }
    if (!any) continue;
    if (all_upper) {
      ++result.counts.upper;
    } else if (all_lower) {
      ++result.counts.lower;
    } else {
      ++result.counts.mixed;
    }
  }
  const auto& c = result.counts;
  if (c.upper > c.lower && c.upper > c.mixed) {
    result.tag = CaseTag::kUpper;
  } else if (c.lower > c.upper && c.lower > c.mixed) {
    result.tag = CaseTag::kLower;
  } else {
    result.tag = CaseTag::kMixed;
  }
  return result;
}

FilterDecision filter_case(const AudioTextPair& pair, const FilterConfig& cfg) {
  const std::string name(stage::kCase);
  const CaseResult result = case_tag(pair.manual);
  if (cfg.case_drop_set.contains(result.tag)) {
    return drop(pair.doc_id, name, "case-" + std::string(to_string(result.tag)));
  }
  return keep(pair.doc_id, name);
}

std::vector<RepeatRun> detect_repeats(const TranscriptDocument& doc,
                                      std::size_t min_run) {
  if (min_run < 2) throw UsageError("repeat min_run must be >= 2");
  std::vector<std::string> normalized;
  normalized.reserve(doc.lines.size());
  for (const auto& line : doc.lines) normalized.push_back(text::nfc(line.text));

  std::vector<RepeatRun> runs;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= normalized.size(); ++i) {
    if (i < normalized.size() && normalized[i] == normalized[start]) continue;
    const std::size_t length = i - start;
    if (length >= min_run) runs.push_back({start, length});
    start = i;
  }
  return runs;
}

FilterDecision filter_repeats(const AudioTextPair& pair,
                              const FilterConfig& cfg) {
  const std::string name(stage::kRepeats);
  const auto& lines = pair.manual.lines;
  if (lines.empty()) return keep(pair.doc_id, name, "empty-document");

  const auto runs = detect_repeats(pair.manual, cfg.repeat_min_run);
  std::size_t repeated = 0;
  for (const auto& run : runs) repeated += run.length;
  const double score =
      static_cast<double>(repeated) / static_cast<double>(lines.size());
  if (!runs.empty()) return drop(pair.doc_id, name, "repeated-lines", score);
  return keep(pair.doc_id, name, {}, score);
}

FilterDecision doc_wer_filter(const AudioTextPair& pair,
                              const FilterConfig& cfg) {
  const std::string name(stage::kDocWer);
  if (!pair.machine) return keep(pair.doc_id, name, "no-machine-transcript");
  const std::string reference = pair.manual.full_text();
  if (normalized_tokens(reference, cfg.profile).empty()) {
    return keep(pair.doc_id, name, "empty-reference");
  }
  const WerBreakdown b =
      word_error_rate(reference, pair.machine->full_text(), cfg.profile);
  if (b.wer > cfg.doc_wer_threshold) {
    return drop(pair.doc_id, name, "doc-wer-above-threshold", b.wer);
  }
  return keep(pair.doc_id, name, {}, b.wer);
}

std::vector<FilterDecision> segment_wer_filter(
    std::span<const SegmentPair> windows, const FilterConfig& cfg) {
  const std::string name(stage::kSegmentWer);
  std::vector<FilterDecision> decisions;
  decisions.reserve(windows.size());
  for (const auto& [manual, machine] : windows) {
    if (manual.doc_id != machine.doc_id ||
        manual.window_index != machine.window_index ||
        manual.window_start != machine.window_start ||
        manual.window_duration != machine.window_duration) {
      throw DataError("manual and machine windows disagree for " +
                      manual.key() + " vs " + machine.key());
    }
    const std::string ref = manual.full_text();
    const std::string hyp = machine.full_text();
    const bool ref_empty = normalized_tokens(ref, cfg.profile).empty();
    const bool hyp_empty = normalized_tokens(hyp, cfg.profile).empty();
    if (ref_empty && hyp_empty) {
      decisions.push_back(keep(manual.key(), name, "empty-window"));
      continue;
    }
    if (ref_empty) {
      decisions.push_back(drop(manual.key(), name, "empty-reference"));
      continue;
    }
    const WerBreakdown b = word_error_rate(ref, hyp, cfg.profile);
    if (b.wer > cfg.segment_wer_threshold) {
      decisions.push_back(
          drop(manual.key(), name, "segment-wer-above-threshold", b.wer));
    } else {
      decisions.push_back(keep(manual.key(), name, {}, b.wer));
    }
  }
  return decisions;
}

bool is_pointwise_stage(std::string_view stage_name) {
  return stage_name == stage::kLanguageAlign || stage_name == stage::kCase ||
         stage_name == stage::kRepeats || stage_name == stage::kDocWer;
}

FilterDecision apply_pointwise_filter(std::string_view stage_name,
                                      const AudioTextPair& pair,
                                      const FilterConfig& cfg) {
  if (stage_name == stage::kLanguageAlign) return language_align(pair, cfg);
  if (stage_name == stage::kCase) return filter_case(pair, cfg);
  if (stage_name == stage::kRepeats) return filter_repeats(pair, cfg);
  if (stage_name == stage::kDocWer) return doc_wer_filter(pair, cfg);
  throw UsageError("not a pointwise filter stage: " + std::string(stage_name));
}

}  // namespace asrcurate

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "asrcurate/filters.hpp"
#include "asrcurate/minhash.hpp"
#include "asrcurate/report.hpp"

namespace asrcurate {

/// language-align, case, repeats, doc-wer, dedup, decontaminate, segment,
/// segment-wer.
const std::vector<std::string>& default_stage_order();
const std::vector<std::string>& known_stages();

/// Document-level stages may appear in any order but must all precede
/// "segment"; "segment-wer" requires an earlier "segment". No repeats.
/// Throws UsageError.
void validate_stage_order(const std::vector<std::string>& stages);

struct PipelineConfig {
  std::filesystem::path manifest;
  std::optional<std::filesystem::path> corpus_root;
  std::filesystem::path out_dir;

  std::vector<std::string> stages = default_stage_order();
  FilterConfig filters;
  MinHashParams minhash;
  /// Re-check band collisions against this estimated Jaccard before marking.
  std::optional<double> dedup_verify_threshold;
  std::vector<std::filesystem::path> decontam_references;
  std::size_t ngram_size = 10;
  double window_seconds = kDefaultWindowSeconds;
  bool keep_empty_windows = false;

  ReportMode report_mode = ReportMode::kRelativeToPrevious;
  std::size_t workers = 1;
  std::uint64_t seed = 0;

  /// Pick up from out_dir's checkpoint when its fingerprint matches.
  bool resume = false;
  /// Stop (leaving a checkpoint) once this stage has completed.
  std::optional<std::string> stop_after;

  void validate() const;
  /// Digest of every setting that affects results (not workers or resume).
  std::string fingerprint() const;
};

struct ErrorRecord {
  std::string doc_id;
  std::string stage;
  std::string message;
};

struct PipelineResult {
  std::vector<StageReport> reports;
  std::vector<FilterDecision> decisions;
  std::vector<ErrorRecord> errors;
  std::size_t kept_documents = 0;
  std::size_t kept_segments = 0;
  bool completed = false;  // false when halted by stop_after
  std::size_t resumed_from = 0;  // stages restored from a checkpoint
};

/// Runs the enabled stages in order and writes into out_dir:
/// manifest.jsonl (+ transcripts/ or segments/), decisions.jsonl,
/// errors.jsonl, reports.json, report.txt and flow.json. A checkpoint is
/// written after each stage and removed on completion.
PipelineResult run_pipeline(const PipelineConfig& config);

}  // namespace asrcurate

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "asrcurate/core.hpp"

namespace asrcurate {

/// relative-to-previous: each stage against its own input (flow-diagram
/// semantics). relative-to-baseline: every stage against the unfiltered
/// pool (ablation-table semantics).
enum class ReportMode { kRelativeToPrevious, kRelativeToBaseline };

std::string_view to_string(ReportMode mode);
ReportMode parse_report_mode(std::string_view name);

/// 100 * numerator / denominator rounded half-up to one decimal, computed
/// exactly on integers. An empty denominator reports 100.0.
double percent_remaining(long long numerator, long long denominator);

struct StageReport {
  std::string stage;
  std::string unit = "documents";  // unit of input_count
  std::string output_unit = "documents";
  std::size_t input_count = 0;
  long long input_us = 0;  // audio, in microseconds
  std::size_t output_count = 0;
  long long output_us = 0;
  std::size_t kept = 0;
  std::size_t dropped = 0;
  std::size_t errored = 0;
  /// Whether durations were known; otherwise percentages use counts.
  bool hours_known = true;
  double percent_remaining = 100.0;
  std::map<std::string, std::size_t> drop_reasons;

  double input_hours() const { return microseconds_to_hours(input_us); }
  double output_hours() const { return microseconds_to_hours(output_us); }
};

/// Fills percent_remaining on every report for the given mode.
void apply_report_mode(std::span<StageReport> reports, ReportMode mode);

std::string reports_to_json(std::span<const StageReport> reports,
                            ReportMode mode);
std::vector<StageReport> reports_from_json(std::string_view json);

/// Plain-text table, one row per stage plus a cumulative line.
std::string reports_to_text(std::span<const StageReport> reports,
                            ReportMode mode);

/// Sankey-style flow: nodes are "input", each stage, and "<stage>/dropped";
/// every stage contributes a kept edge and a dropped edge.
std::string flow_to_json(std::span<const StageReport> reports);

/// Rebuilds per-stage accounting from a decisions log. Stages appear in
/// first-seen order. `durations` (seconds by doc_id) supplies hours for
/// document-level stages; segment-level stages fall back to counts.
std::vector<StageReport> reports_from_decisions(
    std::span<const FilterDecision> decisions,
    const std::unordered_map<std::string, double>* durations = nullptr);

struct StatsDocument {
  std::string text;
  std::string json;
  std::string flow;
};

/// Accepts a reports.json from a run, or a decisions.jsonl (optionally with
/// the manifest it was produced from, to recover hours).
StatsDocument stats(const std::filesystem::path& input, ReportMode mode,
                    const std::optional<std::filesystem::path>& manifest =
                        std::nullopt);

StatsDocument render_stats(std::span<StageReport> reports, ReportMode mode);

}  // namespace asrcurate

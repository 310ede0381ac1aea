#include "asrcurate/report.hpp"

#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "asrcurate/errors.hpp"
#include "asrcurate/filters.hpp"
#include "asrcurate/manifest.hpp"
#include "asrcurate/text.hpp"

namespace asrcurate {

using ordered_json = nlohmann::ordered_json;

std::string_view to_string(ReportMode mode) {
  return mode == ReportMode::kRelativeToPrevious ? "relative-to-previous"
                                                 : "relative-to-baseline";
}

ReportMode parse_report_mode(std::string_view name) {
  if (name == "relative-to-previous") return ReportMode::kRelativeToPrevious;
  if (name == "relative-to-baseline") return ReportMode::kRelativeToBaseline;
  throw UsageError("unknown report mode '" + std::string(name) +
                   "' (expected relative-to-previous or relative-to-baseline)");
}

__extension__ using Int128 = __int128;

double percent_remaining(long long numerator, long long denominator) {
  if (denominator <= 0) return 100.0;
  const Int128 num = numerator;
  const Int128 den = denominator;
  // tenths = floor(1000 * num / den + 1/2)
  const Int128 tenths = (2000 * num + den) / (2 * den);
  return static_cast<double>(static_cast<long long>(tenths)) / 10.0;
}

void apply_report_mode(std::span<StageReport> reports, ReportMode mode) {
  std::map<std::string, long long> baseline_counts;
  long long baseline_us = -1;
  for (auto& r : reports) {
    baseline_counts.try_emplace(r.unit, static_cast<long long>(r.input_count));
    if (baseline_us < 0 && r.hours_known) baseline_us = r.input_us;
  }
  for (auto& r : reports) {
    if (r.hours_known) {
      const long long denom =
          mode == ReportMode::kRelativeToPrevious ? r.input_us : baseline_us;
      r.percent_remaining = percent_remaining(r.output_us, denom);
    } else {
      const long long denom = mode == ReportMode::kRelativeToPrevious
                                  ? static_cast<long long>(r.input_count)
                                  : baseline_counts[r.unit];
      // A stage that changes units is measured by the inputs it kept.
      const std::size_t out =
          r.unit == r.output_unit ? r.output_count : r.kept;
      r.percent_remaining =
          percent_remaining(static_cast<long long>(out), denom);
    }
  }
}

namespace {

ordered_json report_json(const StageReport& r) {
  ordered_json j;
  j["stage"] = r.stage;
  j["unit"] = r.unit;
  j["output_unit"] = r.output_unit;
  j["input_count"] = r.input_count;
  j["input_hours"] = r.hours_known ? ordered_json(r.input_hours()) : ordered_json(nullptr);
  j["output_count"] = r.output_count;
  j["output_hours"] = r.hours_known ? ordered_json(r.output_hours()) : ordered_json(nullptr);
  j["kept"] = r.kept;
  j["dropped"] = r.dropped;
  j["errored"] = r.errored;
  j["percent_remaining"] = r.percent_remaining;
  j["drop_reasons"] = r.drop_reasons;
  return j;
}

long long hours_to_us(const nlohmann::json& v) {
  return std::llround(v.get<double>() * 3.6e9);
}

}  // namespace

std::string reports_to_json(std::span<const StageReport> reports,
                            ReportMode mode) {
  ordered_json j;
  j["report_mode"] = to_string(mode);
  j["stages"] = ordered_json::array();
  for (const auto& r : reports) j["stages"].push_back(report_json(r));
  if (!reports.empty()) {
    const auto& first = reports.front();
    const auto& last = reports.back();
    ordered_json total;
    total["input_hours"] = first.input_hours();
    total["output_hours"] = last.output_hours();
    total["percent_remaining"] =
        percent_remaining(last.output_us, first.input_us);
    j["cumulative"] = total;
  }
  return j.dump(2) + "\n";
}

std::vector<StageReport> reports_from_json(std::string_view json) {
  std::vector<StageReport> reports;
  try {
    const auto j = nlohmann::json::parse(json);
    const auto& stages = j.is_array() ? j : j.at("stages");
    for (const auto& s : stages) {
      StageReport r;
      r.stage = s.at("stage").get<std::string>();
      r.unit = s.value("unit", std::string("documents"));
      r.output_unit = s.value("output_unit", r.unit);
      r.input_count = s.value("input_count", std::size_t{0});
      r.output_count = s.value("output_count", std::size_t{0});
      r.kept = s.value("kept", r.output_count);
      r.dropped = s.value("dropped", std::size_t{0});
      r.errored = s.value("errored", std::size_t{0});
      const bool has_hours = s.contains("input_hours") &&
                             !s["input_hours"].is_null() &&
                             s.contains("output_hours") &&
                             !s["output_hours"].is_null();
      r.hours_known = has_hours;
      if (has_hours) {
        r.input_us = hours_to_us(s["input_hours"]);
        r.output_us = hours_to_us(s["output_hours"]);
      }
      if (s.contains("drop_reasons")) {
        r.drop_reasons =
            s["drop_reasons"].get<std::map<std::string, std::size_t>>();
      }
      reports.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("invalid stage report JSON: ") + e.what());
  }
  return reports;
}

std::string reports_to_text(std::span<const StageReport> reports,
                            ReportMode mode) {
  std::ostringstream out;
  out << "report mode: " << to_string(mode) << "\n";
  std::size_t width = 5;
  for (const auto& r : reports) width = std::max(width, r.stage.size());
  char buf[512];
  std::snprintf(buf, sizeof(buf), "%-*s %10s %14s %10s %14s %9s %8s %9s\n",
                static_cast<int>(width), "stage", "in", "in_hours", "out",
                "out_hours", "dropped", "errored", "remain%");
  out << buf;
  for (const auto& r : reports) {
    std::string in_h = "-";
    std::string out_h = "-";
    if (r.hours_known) {
      char h[64];
      std::snprintf(h, sizeof(h), "%.3f", r.input_hours());
      in_h = h;
      std::snprintf(h, sizeof(h), "%.3f", r.output_hours());
      out_h = h;
    }
    std::snprintf(buf, sizeof(buf),
                  "%-*s %10zu %14s %10zu %14s %9zu %8zu %9.1f\n",
                  static_cast<int>(width), r.stage.c_str(), r.input_count,
                  in_h.c_str(), r.output_count, out_h.c_str(), r.dropped,
                  r.errored, r.percent_remaining);
    out << buf;
  }
  if (!reports.empty() && reports.front().hours_known &&
      reports.back().hours_known) {
    std::snprintf(buf, sizeof(buf),
                  "cumulative: %.3f of %.3f hours remain (%.1f%%)\n",
                  reports.back().output_hours(), reports.front().input_hours(),
                  percent_remaining(reports.back().output_us,
                                    reports.front().input_us));
    out << buf;
  }
  return out.str();
}

std::string flow_to_json(std::span<const StageReport> reports) {
  ordered_json j;
  j["nodes"] = ordered_json::array();
  j["edges"] = ordered_json::array();
  j["nodes"].push_back("input");
  std::string previous = "input";
  for (const auto& r : reports) {
    const std::string dropped_node = r.stage + "/dropped";
    j["nodes"].push_back(r.stage);
    j["nodes"].push_back(dropped_node);
    const bool hours = r.hours_known;
    const double kept =
        hours ? r.output_hours() : static_cast<double>(r.output_count);
    ordered_json kept_edge;
    kept_edge["from"] = previous;
    kept_edge["to"] = r.stage;
    kept_edge["kind"] = "kept";
    kept_edge["value"] = kept;
    kept_edge["measure"] = hours ? "hours" : r.output_unit;
    ordered_json drop_edge;
    drop_edge["from"] = previous;
    drop_edge["to"] = dropped_node;
    drop_edge["kind"] = "dropped";
    drop_edge["value"] =
        hours ? microseconds_to_hours(r.input_us - r.output_us)
              : static_cast<double>(r.dropped + r.errored);
    drop_edge["measure"] = hours ? "hours" : r.unit;
    j["edges"].push_back(std::move(kept_edge));
    j["edges"].push_back(std::move(drop_edge));
    previous = r.stage;
  }
  return j.dump(2) + "\n";
}

std::vector<StageReport> reports_from_decisions(
    std::span<const FilterDecision> decisions,
    const std::unordered_map<std::string, double>* durations) {
  std::vector<StageReport> reports;
  std::map<std::string, std::size_t> position;
  for (const auto& d : decisions) {
    auto [it, inserted] = position.try_emplace(d.stage, reports.size());
    if (inserted) {
      StageReport r;
      r.stage = d.stage;
      r.hours_known = durations != nullptr;
      if (d.stage == stage::kSegment) r.output_unit = "segments";
      if (d.stage == stage::kSegmentWer) r.unit = r.output_unit = "segments";
      reports.push_back(std::move(r));
    }
    auto& r = reports[it->second];
    ++r.input_count;
    long long us = 0;
    if (r.hours_known) {
      auto found = durations->find(d.doc_id);
      if (found == durations->end()) {
        r.hours_known = false;
        r.unit = r.output_unit = "segments";
      } else {
        us = to_microseconds(found->second);
      }
    }
    r.input_us += us;
    if (d.kept) {
      ++r.kept;
      ++r.output_count;
      r.output_us += us;
      // A kept segment decision carries its window count as the score.
      if (d.stage == stage::kSegment && d.score && *d.score >= 1.0) {
        r.output_count += static_cast<std::size_t>(*d.score) - 1;
      }
    } else {
      ++r.dropped;
      ++r.drop_reasons[d.reason];
    }
  }
  return reports;
}

StatsDocument render_stats(std::span<StageReport> reports, ReportMode mode) {
  apply_report_mode(reports, mode);
  return {reports_to_text(reports, mode), reports_to_json(reports, mode),
          flow_to_json(reports)};
}

StatsDocument stats(const std::filesystem::path& input, ReportMode mode,
                    const std::optional<std::filesystem::path>& manifest) {
  const std::string contents = read_file(input);
  std::vector<StageReport> reports;
  if (input.extension() == ".json") {
    reports = reports_from_json(contents);
  } else {
    std::vector<FilterDecision> decisions;
    std::istringstream in(contents);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (text::trim(line).empty()) continue;
      decisions.push_back(parse_decision(line, line_no));
    }
    std::unordered_map<std::string, double> durations;
    if (manifest) {
      const ManifestReader reader(*manifest, manifest->parent_path());
      for (const auto& r : reader.records()) {
        durations[r.doc_id] = r.audio_duration;
      }
    }
    reports = reports_from_decisions(decisions, manifest ? &durations : nullptr);
  }
  return render_stats(reports, mode);
}

}  // namespace asrcurate

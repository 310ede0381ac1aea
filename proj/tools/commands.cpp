#include <algorithm>
#include <cstdio>
#include <iostream>
#include <set>

#include <nlohmann/json.hpp>

#include "asrcurate/errors.hpp"
#include "asrcurate/eval.hpp"
#include "asrcurate/manifest.hpp"
#include "asrcurate/pipeline.hpp"
#include "asrcurate/report.hpp"
#include "asrcurate/subtitle_io.hpp"
#include "cli.hpp"

namespace asrcurate::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

void emit(const std::optional<std::string>& path, const std::string& body) {
  if (path) {
    write_file(*path, body);
  } else {
    std::cout << body;
  }
}

}  // namespace

Action add_parse(CLI::App& app, Globals&) {
  struct Opts {
    std::string input;
    std::optional<std::string> format;
    std::string to = "json";
    std::optional<std::string> out;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("parse", "Parse an SRT/VTT file into timed lines");
  sub->add_option("input", o->input, "Subtitle file")->required();
  sub->add_option("--format", o->format, "Force the input format")
      ->check(CLI::IsMember({"srt", "vtt"}));
  sub->add_option("--to", o->to, "Output: json, srt or vtt")
      ->check(CLI::IsMember({"json", "srt", "vtt"}))
      ->capture_default_str();
  sub->add_option("--out", o->out, "Write here instead of stdout");

  return [o] {
    std::optional<SubtitleFormat> hint;
    if (o->format) {
      hint = *o->format == "vtt" ? SubtitleFormat::kVtt : SubtitleFormat::kSrt;
    } else {
      hint = format_from_path(o->input);
    }
    const auto doc = parse_subtitle(read_file(o->input), hint);
    if (o->to == "json") {
      ordered_json j;
      j["source"] = o->input;
      j["lines"] = ordered_json::array();
      for (const auto& line : doc.lines) {
        j["lines"].push_back({{"start_time", line.start_time},
                              {"end_time", line.end_time},
                              {"text", line.text}});
      }
      emit(o->out, j.dump(2) + "\n");
    } else {
      emit(o->out, serialize_subtitle(doc, o->to == "vtt" ? SubtitleFormat::kVtt
                                                          : SubtitleFormat::kSrt));
    }
    return 0;
  };
}

Action add_pipeline_command(CLI::App& app, Globals& g, const std::string& name) {
  struct Opts {
    PipelineConfig config;
    std::string manifest;
    std::string out_dir;
    std::vector<std::string> stages;
    std::string profile = "basic";
    std::vector<std::string> case_drop = {"upper"};
    std::vector<std::string> references;
    std::optional<std::string> stop_after;
  };
  auto o = std::make_shared<Opts>();
  auto& c = o->config;

  static const std::map<std::string, std::pair<std::string, std::vector<std::string>>>
      kCommands = {
          {"filter",
           {"Run the pointwise quality filters",
            {"language-align", "case", "repeats", "doc-wer"}}},
          {"dedup", {"Drop near-duplicate documents", {"dedup"}}},
          {"decontaminate",
           {"Drop documents overlapping evaluation references", {"decontaminate"}}},
          {"segment",
           {"Cut documents into fixed windows", {"segment"}}},
          {"run", {"Run the full curation pipeline", default_stage_order()}},
      };
  const auto& [description, default_stages] = kCommands.at(name);
  o->stages = default_stages;
  auto* sub = app.add_subcommand(name, description);

  const bool all = name == "run";
  const auto has = [&](std::initializer_list<const char*> stages) {
    if (all) return true;
    for (const char* s : stages) {
      if (s == name) return true;
    }
    return false;
  };

  sub->add_option("--manifest", o->manifest, "Input manifest (JSONL)")->required();
  sub->add_option("--out-dir", o->out_dir, "Output directory")->required();
  sub->add_option("--stages", o->stages, "Stages to run, in order")
      ->delimiter(',')
      ->capture_default_str();
  sub->add_option("--profile", o->profile, "Text normalizer: basic or aggressive")
      ->check(CLI::IsMember({"basic", "aggressive"}))
      ->capture_default_str();
  if (has({"filter"})) {
    sub->add_option("--required-lang", c.filters.required_lang)->capture_default_str();
    sub->add_option("--doc-wer-threshold", c.filters.doc_wer_threshold)
        ->capture_default_str();
    sub->add_option("--case-drop", o->case_drop, "Case tags to drop")
        ->delimiter(',')
        ->capture_default_str();
    sub->add_option("--repeat-min-run", c.filters.repeat_min_run)
        ->capture_default_str();
  }
  if (has({"dedup"})) {
    sub->add_option("--shingle-size", c.minhash.shingle_size)->capture_default_str();
    sub->add_option("--num-hashes", c.minhash.num_hashes)->capture_default_str();
    sub->add_option("--num-bands", c.minhash.num_bands)->capture_default_str();
    sub->add_option("--rows-per-band", c.minhash.rows_per_band)
        ->capture_default_str();
    sub->add_option("--dedup-verify-threshold", c.dedup_verify_threshold,
                    "Confirm band collisions by estimated Jaccard");
  }
  if (has({"decontaminate"})) {
    sub->add_option("--references", o->references,
                    "Reference transcripts (.srt/.vtt, .jsonl or text)")
        ->delimiter(',');
    sub->add_option("--ngram-size", c.ngram_size)->capture_default_str();
  }
  if (has({"segment"})) {
    sub->add_option("--window", c.window_seconds, "Window length in seconds")
        ->capture_default_str();
    sub->add_flag("--keep-empty-windows", c.keep_empty_windows);
    sub->add_option("--segment-wer-threshold", c.filters.segment_wer_threshold)
        ->capture_default_str();
  }
  sub->add_flag("--resume", c.resume, "Continue from a checkpoint in --out-dir");
  sub->add_option("--stop-after", o->stop_after,
                  "Stop after this stage, leaving a checkpoint");

  return [o, &g] {
    auto& c = o->config;
    c.manifest = o->manifest;
    c.out_dir = o->out_dir;
    if (g.corpus_root) c.corpus_root = fs::path(*g.corpus_root);
    c.stages = o->stages;
    c.filters.profile = parse_profile(o->profile);
    c.minhash.profile = c.filters.profile;
    c.minhash.seed = g.seed;
    c.filters.case_drop_set.clear();
    for (const auto& t : o->case_drop) {
      if (t == "none") continue;
      c.filters.case_drop_set.insert(parse_case_tag(t));
    }
    c.decontam_references.assign(o->references.begin(), o->references.end());
    c.stop_after = o->stop_after;
    c.report_mode = parse_report_mode(g.report_mode);
    c.workers = g.workers;
    c.seed = g.seed;

    const auto result = run_pipeline(c);
    if (!result.completed) {
      if (!g.quiet) {
        std::cerr << "stopped after " << *c.stop_after
                  << "; rerun with --resume to continue\n";
      }
      return 0;
    }
    std::cout << reports_to_text(result.reports, c.report_mode);
    if (!g.quiet) {
      std::cerr << "kept " << (result.kept_segments ? result.kept_segments
                                                     : result.kept_documents)
                << (result.kept_segments ? " segments" : " documents") << ", "
                << result.errors.size() << " errors; outputs in " << o->out_dir
                << "\n";
    }
    return 0;
  };
}

Action add_stats(CLI::App& app, Globals& g) {
  struct Opts {
    std::string input;
    std::optional<std::string> manifest;
    std::optional<std::string> json_out;
    std::optional<std::string> flow_out;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand(
      "stats", "Per-stage accounting from decisions.jsonl or reports.json");
  sub->add_option("input", o->input, "decisions.jsonl or reports.json")->required();
  sub->add_option("--manifest", o->manifest,
                  "Manifest supplying audio durations for hour totals");
  sub->add_option("--json-out", o->json_out, "Write the JSON table here");
  sub->add_option("--flow-out", o->flow_out, "Write the flow graph here");

  return [o, &g] {
    const auto doc =
        stats(o->input, parse_report_mode(g.report_mode),
              o->manifest ? std::optional<fs::path>(*o->manifest) : std::nullopt);
    std::cout << doc.text;
    if (o->json_out) write_file(*o->json_out, doc.json);
    if (o->flow_out) write_file(*o->flow_out, doc.flow);
    return 0;
  };
}

Action add_eval(CLI::App& app, Globals&) {
  struct Opts {
    std::string input;
    std::string profile = "basic";
    std::vector<std::string> datasets;
    std::optional<std::string> json_out;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("eval", "Score hypotheses against references");
  sub->add_option("input", o->input,
                  "JSONL records or a directory of <dataset>/<utt>.{ref,hyp}.txt")
      ->required();
  sub->add_option("--profile", o->profile)
      ->check(CLI::IsMember({"basic", "aggressive"}))
      ->capture_default_str();
  sub->add_option("--datasets", o->datasets, "Expected dataset names")
      ->delimiter(',');
  sub->add_option("--json-out", o->json_out, "Write the JSON report here");

  return [o] {
    const auto records = load_eval_records(o->input);
    const auto report = evaluate(records, parse_profile(o->profile), o->datasets);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << to_text(report);
    if (o->json_out) write_file(*o->json_out, to_json(report));
    return 0;
  };
}

namespace {

std::vector<RobustnessPoint> load_points(const fs::path& path) {
  const std::string body = read_file(path);
  std::vector<nlohmann::json> items;
  try {
    const auto first = body.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && body[first] == '[') {
      for (auto& item : nlohmann::json::parse(body)) items.push_back(item);
    } else {
      std::size_t start = 0;
      while (start < body.size()) {
        std::size_t end = body.find('\n', start);
        if (end == std::string::npos) end = body.size();
        const std::string line = body.substr(start, end - start);
        if (line.find_first_not_of(" \t\r") != std::string::npos) {
          items.push_back(nlohmann::json::parse(line));
        }
        start = end + 1;
      }
    }
    std::vector<RobustnessPoint> points;
    for (const auto& j : items) {
      RobustnessPoint p;
      p.model = j.at("model").get<std::string>();
      p.id_wer = j.at("id_wer").get<double>();
      p.ood_wer = j.at("ood_wer").get<double>();
      p.is_intervention = j.value("intervention", false);
      p.ood_suite = j.value("ood_suite", std::vector<std::string>{});
      points.push_back(std::move(p));
    }
    return points;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace

Action add_robustness(CLI::App& app, Globals&) {
  struct Opts {
    std::string input;
    std::string domain = "log10";
    std::vector<std::string> compare;
    std::optional<std::string> json_out;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand(
      "robustness", "Effective and relative robustness from (ID, OOD) WER points");
  sub->add_option("input", o->input,
                  "JSON array or JSONL of {model, id_wer, ood_wer, intervention, "
                  "ood_suite}")
      ->required();
  sub->add_option("--domain", o->domain, "Fit in log10 or linear WER")
      ->check(CLI::IsMember({"log10", "linear"}))
      ->capture_default_str();
  sub->add_option("--compare", o->compare,
                  "WITH:WITHOUT model pairs for relative robustness");
  sub->add_option("--json-out", o->json_out, "Write the JSON report here");

  return [o] {
    const auto points = load_points(o->input);
    const auto report = effective_robustness(
        points, o->domain == "linear" ? FitDomain::kLinear : FitDomain::kLog10);

    ordered_json j;
    j["domain"] = to_string(report.fit.domain);
    j["intercept"] = report.fit.intercept;
    j["slope"] = report.fit.slope;
    j["baseline_points"] = report.baseline_points;
    j["models"] = ordered_json::array();
    char buf[256];
    std::snprintf(buf, sizeof buf, "fit (%s): ood = %.6f + %.6f * id over %zu points\n",
                  std::string(to_string(report.fit.domain)).c_str(),
                  report.fit.intercept, report.fit.slope, report.baseline_points);
    std::string text = buf;
    for (std::size_t i = 0; i < report.models.size(); ++i) {
      const auto& m = report.models[i];
      std::snprintf(buf, sizeof buf,
                    "%-24s id=%.4f ood=%.4f predicted=%.4f ER=%+.6f factor=%.4f%s\n",
                    m.model.c_str(), points[i].id_wer, points[i].ood_wer,
                    m.predicted_ood_wer, m.effective_robustness, m.factor,
                    m.is_intervention ? " (intervention)" : "");
      text += buf;
      j["models"].push_back({{"model", m.model},
                             {"intervention", m.is_intervention},
                             {"predicted_ood_wer", m.predicted_ood_wer},
                             {"effective_robustness", m.effective_robustness},
                             {"factor", m.factor}});
    }
    j["relative"] = ordered_json::array();
    for (const auto& spec : o->compare) {
      const auto colon = spec.find(':');
      if (colon == std::string::npos) {
        throw UsageError("--compare expects WITH:WITHOUT, got '" + spec + "'");
      }
      const auto find = [&](const std::string& model) -> const RobustnessPoint& {
        for (const auto& p : points) {
          if (p.model == model) return p;
        }
        throw UsageError("no point for model '" + model + "'");
      };
      const auto& with = find(spec.substr(0, colon));
      const auto& without = find(spec.substr(colon + 1));
      const double rr = relative_robustness(with, without);
      std::snprintf(buf, sizeof buf, "RR %s vs %s = %+.6f\n", with.model.c_str(),
                    without.model.c_str(), rr);
      text += buf;
      j["relative"].push_back(
          {{"with", with.model}, {"without", without.model}, {"rr", rr}});
    }
    std::cout << text;
    if (o->json_out) write_file(*o->json_out, j.dump(2) + "\n");
    return 0;
  };
}

}  // namespace asrcurate::cli

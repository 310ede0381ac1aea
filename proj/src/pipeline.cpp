#include "asrcurate/pipeline.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "asrcurate/decontam.hpp"
#include "asrcurate/errors.hpp"
#include "asrcurate/hashing.hpp"
#include "asrcurate/manifest.hpp"
#include "asrcurate/parallel.hpp"
#include "asrcurate/segmenter.hpp"

namespace asrcurate {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

const std::vector<std::string>& default_stage_order() {
  static const std::vector<std::string> order = {
      std::string(stage::kLanguageAlign), std::string(stage::kCase),
      std::string(stage::kRepeats),       std::string(stage::kDocWer),
      std::string(stage::kDedup),         std::string(stage::kDecontaminate),
      std::string(stage::kSegment),       std::string(stage::kSegmentWer)};
  return order;
}

const std::vector<std::string>& known_stages() { return default_stage_order(); }

void validate_stage_order(const std::vector<std::string>& stages) {
  if (stages.empty()) throw UsageError("no stages enabled");
  const auto& known = known_stages();
  std::set<std::string> seen;
  bool segmented = false;
  for (const auto& s : stages) {
    if (std::find(known.begin(), known.end(), s) == known.end()) {
      throw UsageError("unknown stage '" + s + "'");
    }
    if (!seen.insert(s).second) throw UsageError("stage '" + s + "' repeated");
    if (s == stage::kSegment) {
      segmented = true;
    } else if (s == stage::kSegmentWer) {
      if (!segmented) {
        throw UsageError("segment-wer must come after segment");
      }
    } else if (segmented) {
      throw UsageError("document-level stage '" + s +
                       "' cannot run after segment");
    }
  }
}

void PipelineConfig::validate() const {
  validate_stage_order(stages);
  filters.validate();
  minhash.validate();
  if (!(window_seconds > 0.0)) throw UsageError("window must be > 0");
  if (ngram_size == 0) throw UsageError("ngram size must be >= 1");
  if (workers == 0) throw UsageError("workers must be >= 1");
  if (dedup_verify_threshold &&
      !(*dedup_verify_threshold >= 0.0 && *dedup_verify_threshold <= 1.0)) {
    throw UsageError("dedup verify threshold must be in [0, 1]");
  }
  if (stop_after &&
      std::find(stages.begin(), stages.end(), *stop_after) == stages.end()) {
    throw UsageError("stop-after names a stage that is not enabled: " +
                     *stop_after);
  }
  if (std::find(stages.begin(), stages.end(), stage::kDecontaminate) !=
          stages.end() &&
      decontam_references.empty()) {
    throw UsageError("the decontaminate stage needs at least one reference");
  }
  if (manifest.empty()) throw UsageError("no manifest given");
  if (out_dir.empty()) throw UsageError("no output directory given");
}

std::string PipelineConfig::fingerprint() const {
  ordered_json j;
  j["manifest"] = manifest.string();
  j["corpus_root"] = corpus_root ? corpus_root->string() : "";
  j["stages"] = stages;
  j["required_lang"] = filters.required_lang;
  j["doc_wer_threshold"] = filters.doc_wer_threshold;
  j["segment_wer_threshold"] = filters.segment_wer_threshold;
  std::vector<std::string> drop;
  for (CaseTag t : filters.case_drop_set) drop.emplace_back(to_string(t));
  j["case_drop_set"] = drop;
  j["repeat_min_run"] = filters.repeat_min_run;
  j["profile"] = to_string(filters.profile);
  j["shingle_size"] = minhash.shingle_size;
  j["num_hashes"] = minhash.num_hashes;
  j["num_bands"] = minhash.num_bands;
  j["rows_per_band"] = minhash.rows_per_band;
  j["minhash_seed"] = minhash.seed;
  j["dedup_profile"] = to_string(minhash.profile);
  j["verify"] = dedup_verify_threshold ? *dedup_verify_threshold : -1.0;
  std::vector<std::string> refs;
  for (const auto& r : decontam_references) refs.push_back(r.string());
  j["references"] = refs;
  j["ngram_size"] = ngram_size;
  j["window"] = window_seconds;
  j["keep_empty"] = keep_empty_windows;
  j["report_mode"] = to_string(report_mode);
  j["seed"] = seed;
  return hashing::digest128(j.dump()).hex();
}

namespace {

constexpr const char* kCheckpointFile = "checkpoint.json";

struct SortedDecision {
  std::string doc_id;
  std::size_t window = 0;
  FilterDecision decision;
};

struct Outcome {
  std::optional<FilterDecision> decision;
  std::string error;
};

class Run {
 public:
  Run(const PipelineConfig& config, std::vector<AudioTextPair> pairs,
      std::vector<ErrorRecord> load_errors)
      : config_(config),
        pairs_(std::move(pairs)),
        errors_(std::move(load_errors)) {
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
      by_id_[pairs_[i].doc_id] = i;
      docs_.push_back(i);
    }
  }

  void run_stage(const std::string& name) {
    if (is_pointwise_stage(name)) {
      pointwise(name);
    } else if (name == stage::kDedup) {
      dedup();
    } else if (name == stage::kDecontaminate) {
      decontaminate_stage();
    } else if (name == stage::kSegment) {
      segment();
    } else if (name == stage::kSegmentWer) {
      segment_wer();
    } else {
      throw Error(ErrorKind::kInternal, "unhandled stage " + name);
    }
  }

  ordered_json checkpoint_json(std::size_t completed) const;
  void restore(const nlohmann::json& j);

  PipelineResult finish(bool completed, std::size_t resumed_from) const {
    PipelineResult result;
    result.reports = reports_;
    apply_report_mode(result.reports, config_.report_mode);
    result.decisions = decisions_;
    result.errors = errors_;
    result.completed = completed;
    result.resumed_from = resumed_from;
    result.kept_documents = segmented_ ? 0 : docs_.size();
    result.kept_segments = segmented_ ? segments_.size() : 0;
    return result;
  }

  void write_outputs_to(const fs::path& out) const;

 private:
  long long docs_us(const std::vector<std::size_t>& docs) const {
    long long us = 0;
    for (std::size_t i : docs) us += to_microseconds(pairs_[i].audio_duration);
    return us;
  }

  void record(std::vector<SortedDecision> batch) {
    std::sort(batch.begin(), batch.end(),
              [](const SortedDecision& a, const SortedDecision& b) {
                return std::tie(a.doc_id, a.window) <
                       std::tie(b.doc_id, b.window);
              });
    for (auto& d : batch) decisions_.push_back(std::move(d.decision));
  }

  // Shared accounting for document-granular stages.
  void finish_doc_stage(const std::string& name,
                        std::vector<Outcome> outcomes) {
    StageReport report;
    report.stage = name;
    report.input_count = docs_.size();
    report.input_us = docs_us(docs_);
    std::vector<std::size_t> survivors;
    std::vector<SortedDecision> batch;
    for (std::size_t k = 0; k < docs_.size(); ++k) {
      const auto& pair = pairs_[docs_[k]];
      auto& outcome = outcomes[k];
      if (!outcome.decision) {
        ++report.errored;
        errors_.push_back({pair.doc_id, name, outcome.error});
        continue;
      }
      if (outcome.decision->kept) {
        ++report.kept;
        survivors.push_back(docs_[k]);
      } else {
        ++report.dropped;
        ++report.drop_reasons[outcome.decision->reason];
      }
      batch.push_back({pair.doc_id, 0, std::move(*outcome.decision)});
    }
    docs_ = std::move(survivors);
    report.output_count = docs_.size();
    report.output_us = docs_us(docs_);
    reports_.push_back(std::move(report));
    record(std::move(batch));
  }

  template <typename Fn>
  std::vector<Outcome> map_docs_indexed(Fn&& fn) const {
    return parallel_map<Outcome>(
        docs_.size(), config_.workers, [&](std::size_t k) {
          Outcome o;
          try {
            o.decision = fn(k, pairs_[docs_[k]]);
          } catch (const DataError& e) {
            o.error = e.what();
          }
          return o;
        });
  }

  template <typename Fn>
  std::vector<Outcome> map_docs(Fn&& fn) const {
    return map_docs_indexed(
        [&](std::size_t, const AudioTextPair& pair) { return fn(pair); });
  }

  void pointwise(const std::string& name) {
    finish_doc_stage(name, map_docs([&](const AudioTextPair& pair) {
                       return apply_pointwise_filter(name, pair,
                                                     config_.filters);
                     }));
  }

  void dedup() {
    const std::string name(stage::kDedup);
    const MinHasher hasher(config_.minhash);
    struct Sig {
      std::optional<MinHashSignature> sig;
      bool too_short = false;
      std::string error;
    };
    auto sigs = parallel_map<Sig>(
        docs_.size(), config_.workers, [&](std::size_t k) {
          Sig s;
          const auto& pair = pairs_[docs_[k]];
          const auto tokens =
              normalized_tokens(pair.manual.full_text(), config_.minhash.profile);
          if (tokens.size() < config_.minhash.shingle_size) {
            s.too_short = true;
          } else {
            s.sig = hasher.signature_of_tokens(pair.doc_id, tokens);
          }
          return s;
        });

    std::vector<MinHashSignature> candidates;
    std::unordered_map<std::string, std::size_t> sig_of;
    for (auto& s : sigs) {
      if (s.sig) {
        sig_of[s.sig->doc_id] = candidates.size();
        candidates.push_back(*s.sig);
      }
    }
    const DedupResult result =
        find_duplicates(candidates, config_.dedup_verify_threshold);
    std::unordered_map<std::string, std::string> representative_of;
    for (const auto& cluster : result.clusters) {
      for (std::size_t m = 1; m < cluster.members.size(); ++m) {
        representative_of[cluster.members[m]] = cluster.representative;
      }
    }

    write_file(config_.out_dir / "signatures.bin",
               encode_signature_table(candidates));
    std::string clusters;
    for (const auto& cluster : result.clusters) {
      ordered_json j;
      j["representative"] = cluster.representative;
      j["members"] = cluster.members;
      clusters += j.dump() + "\n";
    }
    write_file(config_.out_dir / "clusters.jsonl", clusters);

    std::vector<Outcome> outcomes(docs_.size());
    for (std::size_t k = 0; k < docs_.size(); ++k) {
      const std::string& id = pairs_[docs_[k]].doc_id;
      if (sigs[k].too_short) {
        outcomes[k].decision = keep(id, name, "too-short-to-shingle");
        continue;
      }
      auto rep = representative_of.find(id);
      if (rep == representative_of.end()) {
        outcomes[k].decision = keep(id, name);
      } else {
        const double similarity =
            estimate_jaccard(candidates[sig_of.at(id)],
                             candidates[sig_of.at(rep->second)]);
        outcomes[k].decision = drop(id, name, "duplicate", similarity);
      }
    }
    finish_doc_stage(name, std::move(outcomes));
  }

  void decontaminate_stage() {
    const std::string name(stage::kDecontaminate);
    if (!index_) {
      std::vector<LabeledReference> refs;
      for (const auto& path : config_.decontam_references) {
        auto loaded = load_references(path);
        refs.insert(refs.end(), std::make_move_iterator(loaded.begin()),
                    std::make_move_iterator(loaded.end()));
      }
      index_ = build_ngram_index(refs, config_.ngram_size,
                                 config_.filters.profile);
    }
    std::vector<std::optional<ContaminationVerdict>> verdicts(docs_.size());
    auto outcomes = map_docs_indexed([&](std::size_t k, const AudioTextPair& pair) {
      auto verdict = decontaminate(pair.manual, *index_);
      const bool hit = verdict.contaminated;
      verdicts[k] = std::move(verdict);
      return hit ? drop(pair.doc_id, name, "contaminated")
                 : keep(pair.doc_id, name);
    });
    std::string lines;
    for (std::size_t k = 0; k < docs_.size(); ++k) {
      if (!verdicts[k] || !verdicts[k]->contaminated) continue;
      ordered_json j;
      j["doc_id"] = pairs_[docs_[k]].doc_id;
      j["sources"] = verdicts[k]->sources;
      j["first_offset"] = *verdicts[k]->first_offset;
      lines += j.dump() + "\n";
    }
    write_file(config_.out_dir / "contamination.jsonl", lines);
    finish_doc_stage(name, std::move(outcomes));
  }

  void segment() {
    const std::string name(stage::kSegment);
    struct Cut {
      std::vector<Segment> segments;
      std::string error;
      bool ok = false;
    };
    auto cuts = parallel_map<Cut>(
        docs_.size(), config_.workers, [&](std::size_t k) {
          Cut c;
          try {
            c.segments = segment_document(pairs_[docs_[k]],
                                          config_.window_seconds,
                                          config_.keep_empty_windows);
            c.ok = true;
          } catch (const DataError& e) {
            c.error = e.what();
          }
          return c;
        });

    StageReport report;
    report.stage = name;
    report.output_unit = "segments";
    report.input_count = docs_.size();
    report.input_us = docs_us(docs_);
    std::vector<SortedDecision> batch;
    std::vector<std::size_t> parents;
    for (std::size_t k = 0; k < docs_.size(); ++k) {
      const auto& pair = pairs_[docs_[k]];
      auto& cut = cuts[k];
      if (!cut.ok) {
        ++report.errored;
        errors_.push_back({pair.doc_id, name, cut.error});
        continue;
      }
      if (cut.segments.empty()) {
        ++report.dropped;
        ++report.drop_reasons["no-segments"];
        batch.push_back({pair.doc_id, 0, drop(pair.doc_id, name, "no-segments")});
        continue;
      }
      ++report.kept;
      parents.push_back(docs_[k]);
      batch.push_back({pair.doc_id, 0,
                       keep(pair.doc_id, name, {},
                            static_cast<double>(cut.segments.size()))});
      for (auto& s : cut.segments) segments_.push_back(std::move(s));
    }
    docs_ = std::move(parents);
    segmented_ = true;
    report.output_count = segments_.size();
    report.output_us = segment_microseconds(segments_);
    reports_.push_back(std::move(report));
    record(std::move(batch));
  }

  void segment_wer() {
    const std::string name(stage::kSegmentWer);
    // Segments are grouped by parent document, in parent order.
    std::vector<std::pair<std::size_t, std::size_t>> groups;  // begin, end
    for (std::size_t i = 0; i < segments_.size();) {
      std::size_t j = i;
      while (j < segments_.size() && segments_[j].doc_id == segments_[i].doc_id)
        ++j;
      groups.emplace_back(i, j);
      i = j;
    }
    struct GroupOutcome {
      std::vector<FilterDecision> decisions;
      std::string error;
      bool ok = false;
    };
    auto outcomes = parallel_map<GroupOutcome>(
        groups.size(), config_.workers, [&](std::size_t g) {
          GroupOutcome out;
          const auto [begin, end] = groups[g];
          const auto& pair = pairs_[by_id_.at(segments_[begin].doc_id)];
          try {
            if (!pair.machine) {
              for (std::size_t s = begin; s < end; ++s) {
                out.decisions.push_back(
                    keep(segments_[s].key(), name, "no-machine-transcript"));
              }
            } else {
              auto windows =
                  segment_window_pairs(pair, config_.window_seconds);
              std::vector<SegmentPair> selected;
              for (std::size_t s = begin; s < end; ++s) {
                auto& w = windows.at(segments_[s].window_index);
                selected.push_back({segments_[s], std::move(w.machine)});
              }
              out.decisions = segment_wer_filter(selected, config_.filters);
            }
            out.ok = true;
          } catch (const DataError& e) {
            out.error = e.what();
          }
          return out;
        });

    StageReport report;
    report.stage = name;
    report.unit = report.output_unit = "segments";
    report.input_count = segments_.size();
    report.input_us = segment_microseconds(segments_);
    std::vector<Segment> survivors;
    std::vector<SortedDecision> batch;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const auto [begin, end] = groups[g];
      auto& out = outcomes[g];
      if (!out.ok) {
        report.errored += end - begin;
        for (std::size_t s = begin; s < end; ++s) {
          errors_.push_back({segments_[s].key(), name, out.error});
        }
        continue;
      }
      for (std::size_t s = begin; s < end; ++s) {
        auto& d = out.decisions[s - begin];
        if (d.kept) {
          ++report.kept;
          survivors.push_back(segments_[s]);
        } else {
          ++report.dropped;
          ++report.drop_reasons[d.reason];
        }
        batch.push_back(
            {segments_[s].doc_id, segments_[s].window_index, std::move(d)});
      }
    }
    segments_ = std::move(survivors);
    report.output_count = segments_.size();
    report.output_us = segment_microseconds(segments_);
    reports_.push_back(std::move(report));
    record(std::move(batch));
  }

  const PipelineConfig& config_;
  std::vector<AudioTextPair> pairs_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::vector<std::size_t> docs_;  // surviving documents, input order
  bool segmented_ = false;
  std::vector<Segment> segments_;  // surviving segments once segmented
  std::vector<StageReport> reports_;
  std::vector<FilterDecision> decisions_;
  std::vector<ErrorRecord> errors_;
  std::optional<NgramIndex> index_;
};

ordered_json decision_json(const FilterDecision& d) {
  return ordered_json::parse(to_json_line(d));
}

ordered_json Run::checkpoint_json(std::size_t completed) const {
  ordered_json j;
  j["fingerprint"] = config_.fingerprint();
  j["completed_stages"] = completed;
  std::vector<std::string> docs;
  for (std::size_t i : docs_) docs.push_back(pairs_[i].doc_id);
  j["documents"] = docs;
  j["segmented"] = segmented_;
  std::vector<std::string> keys;
  for (const auto& s : segments_) keys.push_back(s.key());
  j["segments"] = keys;
  j["decisions"] = ordered_json::array();
  for (const auto& d : decisions_) j["decisions"].push_back(decision_json(d));
  j["errors"] = ordered_json::array();
  for (const auto& e : errors_) {
    j["errors"].push_back({{"doc_id", e.doc_id},
                           {"stage", e.stage},
                           {"message", e.message}});
  }
  j["reports"] = ordered_json::array();
  for (const auto& r : reports_) {
    ordered_json rj;
    rj["stage"] = r.stage;
    rj["unit"] = r.unit;
    rj["output_unit"] = r.output_unit;
    rj["input_count"] = r.input_count;
    rj["input_us"] = r.input_us;
    rj["output_count"] = r.output_count;
    rj["output_us"] = r.output_us;
    rj["kept"] = r.kept;
    rj["dropped"] = r.dropped;
    rj["errored"] = r.errored;
    rj["drop_reasons"] = r.drop_reasons;
    j["reports"].push_back(std::move(rj));
  }
  return j;
}

void Run::restore(const nlohmann::json& j) {
  docs_.clear();
  for (const auto& id : j.at("documents")) {
    docs_.push_back(by_id_.at(id.get<std::string>()));
  }
  segmented_ = j.at("segmented").get<bool>();
  segments_.clear();
  if (segmented_) {
    std::unordered_set<std::string> keys;
    for (const auto& k : j.at("segments")) keys.insert(k.get<std::string>());
    for (std::size_t i : docs_) {
      for (auto& s : segment_document(pairs_[i], config_.window_seconds,
                                      config_.keep_empty_windows)) {
        if (keys.contains(s.key())) segments_.push_back(std::move(s));
      }
    }
  }
  decisions_.clear();
  for (const auto& d : j.at("decisions")) {
    decisions_.push_back(parse_decision(d.dump(), 0));
  }
  errors_.clear();
  for (const auto& e : j.at("errors")) {
    errors_.push_back({e.at("doc_id").get<std::string>(),
                       e.at("stage").get<std::string>(),
                       e.at("message").get<std::string>()});
  }
  reports_.clear();
  for (const auto& rj : j.at("reports")) {
    StageReport r;
    r.stage = rj.at("stage").get<std::string>();
    r.unit = rj.at("unit").get<std::string>();
    r.output_unit = rj.at("output_unit").get<std::string>();
    r.input_count = rj.at("input_count").get<std::size_t>();
    r.input_us = rj.at("input_us").get<long long>();
    r.output_count = rj.at("output_count").get<std::size_t>();
    r.output_us = rj.at("output_us").get<long long>();
    r.kept = rj.at("kept").get<std::size_t>();
    r.dropped = rj.at("dropped").get<std::size_t>();
    r.errored = rj.at("errored").get<std::size_t>();
    r.drop_reasons =
        rj.at("drop_reasons").get<std::map<std::string, std::size_t>>();
    reports_.push_back(std::move(r));
  }
}

void Run::write_outputs_to(const fs::path& out) const {
  if (segmented_) {
    write_outputs(decisions_, std::span<const Segment>(segments_), out);
  } else {
    std::vector<AudioTextPair> kept;
    kept.reserve(docs_.size());
    for (std::size_t i : docs_) kept.push_back(pairs_[i]);
    write_outputs(decisions_, std::span<const AudioTextPair>(kept), out);
  }
  std::string errors;
  for (const auto& e : errors_) {
    ordered_json j;
    j["doc_id"] = e.doc_id;
    j["stage"] = e.stage;
    j["error"] = e.message;
    errors += j.dump() + "\n";
  }
  write_file(out / "errors.jsonl", errors);

  std::vector<StageReport> reports = reports_;
  apply_report_mode(reports, config_.report_mode);
  write_file(out / "reports.json",
             reports_to_json(reports, config_.report_mode));
  write_file(out / "report.txt", reports_to_text(reports, config_.report_mode));
  write_file(out / "flow.json", flow_to_json(reports));
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config) {
  config.validate();

  const ManifestReader reader(config.manifest, config.corpus_root);
  const auto items = parallel_map<ManifestItem>(
      reader.size(), config.workers,
      [&](std::size_t i) { return reader.resolve(i); });

  std::vector<AudioTextPair> pairs;
  std::vector<ErrorRecord> load_errors;
  std::string warnings;
  for (const auto& item : items) {
    if (!item.ok()) {
      load_errors.push_back({item.record.doc_id, "load", item.error});
      continue;
    }
    bool invalid = false;
    for (const auto& f : validate_pair(*item.pair)) {
      if (f.severity == Severity::kError) {
        load_errors.push_back(
            {item.record.doc_id, "validate", f.field + ": " + f.message});
        invalid = true;
        break;
      }
      ordered_json w;
      w["doc_id"] = item.record.doc_id;
      w["field"] = f.field;
      w["warning"] = f.message;
      warnings += w.dump() + "\n";
    }
    if (!invalid) pairs.push_back(*item.pair);
  }

  Run run(config, std::move(pairs), std::move(load_errors));

  const fs::path checkpoint = config.out_dir / kCheckpointFile;
  std::size_t start = 0;
  if (config.resume && fs::exists(checkpoint)) {
    nlohmann::json saved;
    try {
      saved = nlohmann::json::parse(read_file(checkpoint));
    } catch (const nlohmann::json::exception& e) {
      throw DataError("corrupt checkpoint " + checkpoint.string() + ": " +
                      e.what());
    }
    if (saved.value("fingerprint", std::string()) != config.fingerprint()) {
      throw UsageError("checkpoint in " + config.out_dir.string() +
                       " was written with a different configuration");
    }
    run.restore(saved);
    start = saved.at("completed_stages").get<std::size_t>();
  }

  for (std::size_t s = start; s < config.stages.size(); ++s) {
    const std::string& name = config.stages[s];
    run.run_stage(name);
    write_file(checkpoint, run.checkpoint_json(s + 1).dump() + "\n");
    if (config.stop_after && *config.stop_after == name &&
        s + 1 < config.stages.size()) {
      return run.finish(false, start);
    }
  }

  run.write_outputs_to(config.out_dir);
  write_file(config.out_dir / "warnings.jsonl", warnings);
  std::error_code ec;
  fs::remove(checkpoint, ec);
  return run.finish(true, start);
}

}  // namespace asrcurate

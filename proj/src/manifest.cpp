#include "asrcurate/manifest.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "asrcurate/errors.hpp"
#include "asrcurate/hashing.hpp"
#include "asrcurate/parallel.hpp"
#include "asrcurate/subtitle_io.hpp"
#include "asrcurate/text.hpp"

namespace asrcurate {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

void check_relative_path(const std::string& path) {
  if (path.empty()) throw DataError("empty transcript path");
  const fs::path p(path);
  if (p.is_absolute() || p.has_root_name() || p.has_root_directory()) {
    throw DataError("transcript path must be relative: " + path);
  }
  for (const auto& part : p) {
    if (part == "..") {
      throw DataError("transcript path escapes the corpus root: " + path);
    }
  }
}

namespace {

std::string context(std::size_t line_no) {
  return "manifest line " + std::to_string(line_no) + ": ";
}

std::optional<std::string> optional_string(const nlohmann::json& j,
                                           const char* key,
                                           std::size_t line_no) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw DataError(context(line_no) + "'" + key + "' must be a string");
  }
  return it->get<std::string>();
}

}  // namespace

ManifestRecord parse_manifest_record(std::string_view json_line,
                                     std::size_t line_no) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_line);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(context(line_no) + "invalid JSON: " + e.what());
  }
  if (!j.is_object()) throw DataError(context(line_no) + "expected an object");

  ManifestRecord r;
  auto id = optional_string(j, "doc_id", line_no);
  if (!id || id->empty()) throw DataError(context(line_no) + "missing doc_id");
  r.doc_id = *id;

  auto duration = j.find("audio_duration");
  if (duration == j.end() || !duration->is_number()) {
    throw DataError(context(line_no) + "missing numeric audio_duration");
  }
  r.audio_duration = duration->get<double>();

  r.audio_lang = optional_string(j, "audio_lang", line_no);
  r.text_lang = optional_string(j, "text_lang", line_no);
  if (auto conf = j.find("audio_lang_confidence");
      conf != j.end() && !conf->is_null()) {
    if (!conf->is_number()) {
      throw DataError(context(line_no) +
                      "'audio_lang_confidence' must be a number");
    }
    r.audio_lang_confidence = conf->get<double>();
  }

  auto manual = optional_string(j, "manual_path", line_no);
  if (!manual) throw DataError(context(line_no) + "missing manual_path");
  r.manual_path = *manual;
  r.machine_path = optional_string(j, "machine_path", line_no);

  try {
    check_relative_path(r.manual_path);
    if (r.machine_path) check_relative_path(*r.machine_path);
  } catch (const DataError& e) {
    throw DataError(context(line_no) + e.what());
  }
  return r;
}

std::string to_json_line(const ManifestRecord& r) {
  ordered_json j;
  j["doc_id"] = r.doc_id;
  j["audio_duration"] = r.audio_duration;
  if (r.audio_lang) j["audio_lang"] = *r.audio_lang;
  if (r.audio_lang_confidence) {
    j["audio_lang_confidence"] = *r.audio_lang_confidence;
  }
  if (r.text_lang) j["text_lang"] = *r.text_lang;
  j["manual_path"] = r.manual_path;
  if (r.machine_path) j["machine_path"] = *r.machine_path;
  return j.dump();
}

std::string to_json_line(const FilterDecision& d) {
  ordered_json j;
  j["doc_id"] = d.doc_id;
  j["stage"] = d.stage;
  j["kept"] = d.kept;
  j["reason"] = d.reason;
  j["score"] = d.score ? ordered_json(*d.score) : ordered_json(nullptr);
  return j.dump();
}

FilterDecision parse_decision(std::string_view json_line, std::size_t line_no) {
  const std::string where = "decisions line " + std::to_string(line_no) + ": ";
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_line);
    FilterDecision d;
    d.doc_id = j.at("doc_id").get<std::string>();
    d.stage = j.at("stage").get<std::string>();
    d.kept = j.at("kept").get<bool>();
    d.reason = j.value("reason", std::string());
    if (auto s = j.find("score"); s != j.end() && !s->is_null()) {
      d.score = s->get<double>();
    }
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(where + e.what());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw DataError("error reading " + path.string());
  return buf.str();
}

void write_file(const fs::path& path, std::string_view contents) {
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) {
      throw DataError("cannot create " + path.parent_path().string() + ": " +
                      ec.message());
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.close();
  if (!out) throw DataError("error writing " + path.string());
}

TranscriptDocument load_transcript(const fs::path& corpus_root,
                                   const std::string& relative_path) {
  check_relative_path(relative_path);
  const fs::path full = corpus_root / relative_path;
  const std::string bytes = read_file(full);
  try {
    TranscriptDocument doc =
        parse_subtitle(bytes, format_from_path(relative_path));
    doc.source_path = relative_path;
    return doc;
  } catch (const DataError& e) {
    throw DataError(relative_path + ": " + e.what());
  }
}

AudioTextPair load_pair(const ManifestRecord& record,
                        const fs::path& corpus_root) {
  AudioTextPair pair;
  pair.doc_id = record.doc_id;
  pair.audio_duration = record.audio_duration;
  pair.audio_lang = record.audio_lang;
  pair.audio_lang_confidence = record.audio_lang_confidence;
  pair.manual = load_transcript(corpus_root, record.manual_path);
  pair.manual.doc_id = record.doc_id;
  pair.manual.text_lang = record.text_lang;
  if (record.machine_path) {
    pair.machine = load_transcript(corpus_root, *record.machine_path);
    pair.machine->doc_id = record.doc_id;
  }
  return pair;
}

ManifestReader::ManifestReader(const fs::path& manifest_path,
                               std::optional<fs::path> corpus_root) {
  if (corpus_root) {
    corpus_root_ = *corpus_root;
  } else if (const char* env = std::getenv(kCorpusRootEnv);
             env != nullptr && *env != '\0') {
    corpus_root_ = env;
  } else {
    corpus_root_ = manifest_path.parent_path();
  }

  const std::string contents = read_file(manifest_path);
  std::unordered_set<std::string> seen;
  std::istringstream in(contents);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    ManifestRecord record = parse_manifest_record(line, line_no);
    if (!seen.insert(record.doc_id).second) {
      throw DataError(context(line_no) + "duplicate doc_id '" +
                      record.doc_id + "'");
    }
    records_.push_back(std::move(record));
  }
}

ManifestItem ManifestReader::resolve(std::size_t index) const {
  ManifestItem item;
  item.index = index;
  item.record = records_.at(index);
  try {
    item.pair = load_pair(item.record, corpus_root_);
  } catch (const DataError& e) {
    item.error = e.what();
  }
  return item;
}

std::optional<ManifestItem> ManifestReader::next() {
  if (cursor_ >= records_.size()) return std::nullopt;
  return resolve(cursor_++);
}

std::vector<ManifestItem> load_manifest(const fs::path& manifest_path,
                                        std::optional<fs::path> corpus_root,
                                        std::size_t workers) {
  const ManifestReader reader(manifest_path, std::move(corpus_root));
  return parallel_map<ManifestItem>(
      reader.size(), workers, [&](std::size_t i) { return reader.resolve(i); });
}

std::string safe_file_stem(const std::string& doc_id) {
  std::string stem;
  bool changed = doc_id.empty();
  for (char c : doc_id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_' ||
                    c == '.';
    stem.push_back(ok ? c : '_');
    changed |= !ok;
  }
  if (stem.find_first_not_of('.') == std::string::npos) changed = true;
  if (changed) {
    stem += "-" + hashing::digest128(doc_id).hex().substr(0, 12);
  }
  return stem;
}

namespace {

std::string decisions_jsonl(std::span<const FilterDecision> decisions) {
  std::string out;
  for (const auto& d : decisions) {
    out += to_json_line(d);
    out += '\n';
  }
  return out;
}

std::string output_path_for(const TranscriptDocument& doc,
                            std::string_view role) {
  if (!doc.source_path.empty()) return "transcripts/" + doc.source_path;
  return "transcripts/" + safe_file_stem(doc.doc_id) + "." +
         std::string(role) + ".srt";
}

SubtitleFormat format_for(const std::string& path) {
  return format_from_path(path).value_or(SubtitleFormat::kSrt);
}

}  // namespace

OutputSummary write_outputs(std::span<const FilterDecision> decisions,
                            std::span<const AudioTextPair> kept,
                            const fs::path& out_dir) {
  OutputSummary summary;
  std::string manifest;
  for (const auto& pair : kept) {
    ManifestRecord r;
    r.doc_id = pair.doc_id;
    r.audio_duration = pair.audio_duration;
    r.audio_lang = pair.audio_lang;
    r.audio_lang_confidence = pair.audio_lang_confidence;
    r.text_lang = pair.manual.text_lang;
    r.manual_path = output_path_for(pair.manual, "manual");
    write_file(out_dir / r.manual_path,
               serialize_subtitle(pair.manual, format_for(r.manual_path)));
    ++summary.transcripts;
    if (pair.machine) {
      r.machine_path = output_path_for(*pair.machine, "machine");
      write_file(out_dir / *r.machine_path,
                 serialize_subtitle(*pair.machine, format_for(*r.machine_path)));
      ++summary.transcripts;
    }
    manifest += to_json_line(r);
    manifest += '\n';
    ++summary.kept;
  }
  write_file(out_dir / "manifest.jsonl", manifest);
  write_file(out_dir / "decisions.jsonl", decisions_jsonl(decisions));
  summary.decisions = decisions.size();
  return summary;
}

OutputSummary write_outputs(std::span<const FilterDecision> decisions,
                            std::span<const Segment> kept,
                            const fs::path& out_dir) {
  OutputSummary summary;
  std::string manifest;
  for (const auto& segment : kept) {
    char index[16];
    std::snprintf(index, sizeof(index), "%05zu", segment.window_index);
    const std::string rel =
        "segments/" + safe_file_stem(segment.doc_id) + "/" + index + ".srt";
    TranscriptDocument doc;
    doc.doc_id = segment.key();
    doc.lines = segment.lines;
    write_file(out_dir / rel, serialize_subtitle(doc, SubtitleFormat::kSrt));
    ++summary.transcripts;

    ordered_json j;
    j["doc_id"] = segment.key();
    j["source_doc_id"] = segment.doc_id;
    j["window_index"] = segment.window_index;
    j["window_start"] = segment.window_start;
    j["audio_duration"] = segment.window_duration;
    j["manual_path"] = rel;
    manifest += j.dump();
    manifest += '\n';
    ++summary.kept;
  }
  write_file(out_dir / "manifest.jsonl", manifest);
  write_file(out_dir / "decisions.jsonl", decisions_jsonl(decisions));
  summary.decisions = decisions.size();
  return summary;
}

}  // namespace asrcurate

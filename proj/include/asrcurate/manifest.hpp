#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "asrcurate/core.hpp"

namespace asrcurate {

/// Environment variable that overrides the corpus root.
inline constexpr const char* kCorpusRootEnv = "ASRCURATE_CORPUS_ROOT";

/// One line of the line-delimited JSON manifest.
struct ManifestRecord {
  std::string doc_id;
  double audio_duration = 0.0;
  std::optional<std::string> audio_lang;
  std::optional<double> audio_lang_confidence;
  /// Precomputed transcript language; takes precedence over detection.
  std::optional<std::string> text_lang;
  std::string manual_path;
  std::optional<std::string> machine_path;

  friend bool operator==(const ManifestRecord&, const ManifestRecord&) = default;
};

/// Rejects absolute paths and any ".." component.
void check_relative_path(const std::string& path);

ManifestRecord parse_manifest_record(std::string_view json_line,
                                     std::size_t line_no);
std::string to_json_line(const ManifestRecord& record);
std::string to_json_line(const FilterDecision& decision);
FilterDecision parse_decision(std::string_view json_line, std::size_t line_no);

/// A manifest entry after resolution: either a loaded pair or an error
/// message tagged with the record's doc_id.
struct ManifestItem {
  std::size_t index = 0;
  ManifestRecord record;
  std::optional<AudioTextPair> pair;
  std::string error;

  bool ok() const { return pair.has_value(); }
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Reads and parses one transcript file relative to `corpus_root`.
TranscriptDocument load_transcript(const std::filesystem::path& corpus_root,
                                   const std::string& relative_path);

/// Builds the pair for a record; throws DataError when a transcript cannot be
/// read or parsed.
AudioTextPair load_pair(const ManifestRecord& record,
                        const std::filesystem::path& corpus_root);

/// Streams a manifest in file order. Records are validated (schema, paths,
/// unique doc_id) up front; transcript files are only parsed in next().
class ManifestReader {
 public:
  /// Throws DataError on unreadable manifests, malformed records and
  /// duplicate doc_ids. `corpus_root` defaults to the manifest's directory.
  explicit ManifestReader(
      const std::filesystem::path& manifest_path,
      std::optional<std::filesystem::path> corpus_root = std::nullopt);

  std::size_t size() const { return records_.size(); }
  const std::vector<ManifestRecord>& records() const { return records_; }
  const std::filesystem::path& corpus_root() const { return corpus_root_; }

  /// Resolves record `index`; per-record failures become error items.
  ManifestItem resolve(std::size_t index) const;

  /// Next item in file order, or nullopt at the end.
  std::optional<ManifestItem> next();

 private:
  std::vector<ManifestRecord> records_;
  std::filesystem::path corpus_root_;
  std::size_t cursor_ = 0;
};

/// Eagerly resolves every record, in file order, using `workers` threads.
std::vector<ManifestItem> load_manifest(
    const std::filesystem::path& manifest_path,
    std::optional<std::filesystem::path> corpus_root = std::nullopt,
    std::size_t workers = 1);

struct OutputSummary {
  std::size_t decisions = 0;
  std::size_t kept = 0;
  std::size_t transcripts = 0;
};

/// Writes decisions.jsonl plus a manifest.jsonl of kept pairs whose
/// transcripts are mirrored under out_dir/transcripts/.
OutputSummary write_outputs(std::span<const FilterDecision> decisions,
                            std::span<const AudioTextPair> kept,
                            const std::filesystem::path& out_dir);

/// Segment variant: one manifest row and one SRT file per segment.
OutputSummary write_outputs(std::span<const FilterDecision> decisions,
                            std::span<const Segment> kept,
                            const std::filesystem::path& out_dir);

/// File-system safe stem for a doc_id (suffixed with a digest whenever
/// characters had to be replaced).
std::string safe_file_stem(const std::string& doc_id);

}  // namespace asrcurate

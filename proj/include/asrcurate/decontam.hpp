#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "asrcurate/core.hpp"
#include "asrcurate/hashing.hpp"
#include "asrcurate/wer.hpp"

namespace asrcurate {

/// A reference text to decontaminate against, with a label naming its
/// origin (e.g. "tedlium3/utt-0042").
struct LabeledReference {
  std::string label;
  std::string text;
};

/// Set of n-token windows drawn from evaluation references. Lookups go
/// through a 128-bit digest and are then confirmed token by token.
class NgramIndex {
 public:
  NgramIndex(std::size_t n, NormalizerProfile profile);

  void add(const LabeledReference& reference);

  std::size_t n() const { return n_; }
  NormalizerProfile profile() const { return profile_; }
  /// Distinct n-gram digests.
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  /// References shorter than n tokens.
  std::size_t skipped() const { return skipped_; }
  std::size_t reference_count() const { return references_.size(); }

  /// Labels of references containing exactly this token window (empty when
  /// the window is not in the index). `window.size()` must equal n().
  std::vector<std::string> lookup(std::span<const std::string> window) const;

 private:
  struct Occurrence {
    std::size_t reference = 0;
    std::size_t offset = 0;
  };
  struct Reference {
    std::string label;
    std::vector<std::string> tokens;
  };

  std::size_t n_;
  NormalizerProfile profile_;
  std::size_t skipped_ = 0;
  std::vector<Reference> references_;
  std::unordered_map<hashing::Digest128, std::vector<Occurrence>,
                     hashing::Digest128Hash>
      entries_;
};

/// Throws UsageError if n == 0.
NgramIndex build_ngram_index(std::span<const LabeledReference> references,
                             std::size_t n = 10,
                             NormalizerProfile profile =
                                 NormalizerProfile::kBasic);

/// Documents are labeled with their doc_id.
NgramIndex build_ngram_index(std::span<const TranscriptDocument> references,
                             std::size_t n = 10,
                             NormalizerProfile profile =
                                 NormalizerProfile::kBasic);

struct ContaminationVerdict {
  bool contaminated = false;
  std::vector<std::string> sources;          // sorted, unique
  std::optional<std::size_t> first_offset;  // token offset of first match
};

ContaminationVerdict decontaminate(const TranscriptDocument& doc,
                                   const NgramIndex& index);

/// Loads references from .srt/.vtt (one reference per file), .jsonl (the
/// "reference" field of each record, labeled dataset/id) or plain text (one
/// reference per non-empty line, labeled file:line).
std::vector<LabeledReference> load_references(
    const std::filesystem::path& path);

}  // namespace asrcurate

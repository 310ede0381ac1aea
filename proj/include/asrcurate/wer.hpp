#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace asrcurate {

/// basic: lowercase, drop [bracketed]/(parenthesized) annotations, strip
/// punctuation except intra-word apostrophes and hyphens, collapse spaces.
/// aggressive: basic plus contraction expansion, standalone "&" -> "and",
/// and intra-word hyphens split into separate words.
enum class NormalizerProfile { kBasic, kAggressive };

std::string_view to_string(NormalizerProfile profile);
/// Accepts "basic" / "aggressive"; throws UsageError otherwise.
NormalizerProfile parse_profile(std::string_view name);

std::string normalize_text(std::string_view raw, NormalizerProfile profile);

/// normalize_text followed by a whitespace split.
std::vector<std::string> normalized_tokens(std::string_view raw,
                                           NormalizerProfile profile);

struct EditCounts {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;

  std::size_t total() const { return substitutions + deletions + insertions; }
  friend bool operator==(const EditCounts&, const EditCounts&) = default;
};

/// Minimum edit alignment with unit costs. Backtrace prefers
/// substitution/match, then deletion, then insertion.
EditCounts align_tokens(std::span<const std::string> reference,
                        std::span<const std::string> hypothesis);

struct WerBreakdown {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t reference_words = 0;
  double wer = 0.0;  // fraction, may exceed 1

  std::size_t errors() const { return substitutions + deletions + insertions; }
  friend bool operator==(const WerBreakdown&, const WerBreakdown&) = default;
};

/// Throws DataError when the reference is empty after normalization.
WerBreakdown word_error_rate(std::string_view reference,
                             std::string_view hypothesis,
                             NormalizerProfile profile);

/// Pooled WER: S, D, I and N are summed over all pairs before dividing.
WerBreakdown corpus_wer(
    std::span<const std::pair<std::string, std::string>> pairs,
    NormalizerProfile profile);

}  // namespace asrcurate

#include "asrcurate/wer.hpp"

#include <algorithm>
#include <unordered_map>

#include "asrcurate/errors.hpp"
#include "asrcurate/text.hpp"

namespace asrcurate {
namespace {

// Approximates the common English contractions handled by Whisper-style
// normalizers. Keys are lowercase with ASCII apostrophes.
const std::unordered_map<std::string, std::string>& contractions() {
  static const std::unordered_map<std::string, std::string> table = {
      {"can't", "can not"},       {"won't", "will not"},
      {"shan't", "shall not"},    {"don't", "do not"},
      {"doesn't", "does not"},    {"didn't", "did not"},
      {"isn't", "is not"},        {"aren't", "are not"},
      {"wasn't", "was not"},      {"weren't", "were not"},
      {"haven't", "have not"},    {"hasn't", "has not"},
      {"hadn't", "had not"},      {"wouldn't", "would not"},
      {"shouldn't", "should not"}, {"couldn't", "could not"},
      {"mustn't", "must not"},    {"needn't", "need not"},
      {"i'm", "i am"},            {"you're", "you are"},
      {"we're", "we are"},        {"they're", "they are"},
      {"i've", "i have"},         {"you've", "you have"},
      {"we've", "we have"},       {"they've", "they have"},
      {"i'll", "i will"},         {"you'll", "you will"},
      {"he'll", "he will"},       {"she'll", "she will"},
      {"it'll", "it will"},       {"we'll", "we will"},
      {"they'll", "they will"},   {"that'll", "that will"},
      {"i'd", "i would"},         {"you'd", "you would"},
      {"he'd", "he would"},       {"she'd", "she would"},
      {"we'd", "we would"},       {"they'd", "they would"},
      {"it's", "it is"},          {"that's", "that is"},
      {"there's", "there is"},    {"here's", "here is"},
      {"what's", "what is"},      {"who's", "who is"},
      {"where's", "where is"},    {"how's", "how is"},
      {"he's", "he is"},          {"she's", "she is"},
      {"let's", "let us"},        {"y'all", "you all"},
  };
  return table;
}

bool is_apostrophe(char32_t c) {
  return c == U'\'' || c == U'\u2019' || c == U'\u2018' || c == U'\u02BC';
}

bool is_hyphen(char32_t c) {
  return c == U'-' || c == U'\u2010' || c == U'\u2011';
}

// Replaces every balanced [..] and (..) span with a single space. An opening
// bracket without a partner is left for the punctuation pass.
std::u32string strip_annotations(const std::u32string& s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const char32_t c = s[i];
    if (c == U'[' || c == U'(') {
      const char32_t close = c == U'[' ? U']' : U')';
      int depth = 0;
      std::size_t j = i;
      for (; j < s.size(); ++j) {
        if (s[j] == c) ++depth;
        if (s[j] == close && --depth == 0) break;
      }
      if (j < s.size()) {
        out.push_back(U' ');
        i = j + 1;
        continue;
      }
    }
    out.push_back(c);
    ++i;
  }
  return out;
}

bool is_standalone(const std::u32string& s, std::size_t i) {
  const bool left = i == 0 || text::is_whitespace(s[i - 1]);
  const bool right = i + 1 == s.size() || text::is_whitespace(s[i + 1]);
  return left && right;
}

}  // namespace

std::string_view to_string(NormalizerProfile profile) {
  return profile == NormalizerProfile::kBasic ? "basic" : "aggressive";
}

NormalizerProfile parse_profile(std::string_view name) {
  if (name == "basic") return NormalizerProfile::kBasic;
  if (name == "aggressive") return NormalizerProfile::kAggressive;
  throw UsageError("unknown normalizer profile '" + std::string(name) +
                   "' (expected basic or aggressive)");
}

std::string normalize_text(std::string_view raw, NormalizerProfile profile) {
  const bool aggressive = profile == NormalizerProfile::kAggressive;
  std::u32string s = strip_annotations(text::decode_utf8(text::to_lower(raw)));

  std::u32string cleaned;
  cleaned.reserve(s.size() + 8);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char32_t c = s[i];
    if (text::is_word_char(c)) {
      cleaned.push_back(c);
      continue;
    }
    if (aggressive && c == U'&' && is_standalone(s, i)) {
      cleaned += U"and";
      continue;
    }
    const bool inner = i > 0 && i + 1 < s.size() &&
                       text::is_word_char(s[i - 1]) &&
                       text::is_word_char(s[i + 1]);
    if (inner && is_apostrophe(c)) {
      cleaned.push_back(U'\'');
    } else if (inner && is_hyphen(c) && !aggressive) {
      cleaned.push_back(U'-');
    } else {
      cleaned.push_back(U' ');
    }
  }

  auto tokens = text::split_whitespace(text::encode_utf8(cleaned));
  if (aggressive) {
    const auto& table = contractions();
    for (auto& token : tokens) {
      if (auto it = table.find(token); it != table.end()) token = it->second;
    }
  }
  return text::join(tokens, " ");
}

std::vector<std::string> normalized_tokens(std::string_view raw,
                                           NormalizerProfile profile) {
  return text::split_whitespace(normalize_text(raw, profile));
}

EditCounts align_tokens(std::span<const std::string> reference,
                        std::span<const std::string> hypothesis) {
  // Two-row DP carrying the counts of the preferred path into each cell. The
  // per-cell choice (diagonal, then up, then left among equal costs) is the
  // same choice a full-matrix backtrace would make, so the counts match it.
  struct Cell {
    std::size_t cost = 0;
    EditCounts counts;
  };
  const std::size_t m = hypothesis.size();
  std::vector<Cell> prev(m + 1);
  std::vector<Cell> curr(m + 1);
  for (std::size_t j = 1; j <= m; ++j) {
    prev[j].cost = j;
    prev[j].counts.insertions = j;
  }
  for (std::size_t i = 1; i <= reference.size(); ++i) {
    curr[0].cost = i;
    curr[0].counts = {0, i, 0};
    for (std::size_t j = 1; j <= m; ++j) {
      const bool match = reference[i - 1] == hypothesis[j - 1];
      const std::size_t diag = prev[j - 1].cost + (match ? 0 : 1);
      const std::size_t up = prev[j].cost + 1;        // deletion
      const std::size_t left = curr[j - 1].cost + 1;  // insertion
      Cell cell;
      if (diag <= up && diag <= left) {
        cell.cost = diag;
        cell.counts = prev[j - 1].counts;
        if (!match) ++cell.counts.substitutions;
      } else if (up <= left) {
        cell.cost = up;
        cell.counts = prev[j].counts;
        ++cell.counts.deletions;
      } else {
        cell.cost = left;
        cell.counts = curr[j - 1].counts;
        ++cell.counts.insertions;
      }
      curr[j] = cell;
    }
    std::swap(prev, curr);
  }
  return prev[m].counts;
}

namespace {

WerBreakdown breakdown_of(const EditCounts& counts, std::size_t ref_words) {
  WerBreakdown b;
  b.substitutions = counts.substitutions;
  b.deletions = counts.deletions;
  b.insertions = counts.insertions;
  b.reference_words = ref_words;
  b.wer = ref_words == 0 ? 0.0
                         : static_cast<double>(counts.total()) /
                               static_cast<double>(ref_words);
  return b;
}

}  // namespace

WerBreakdown word_error_rate(std::string_view reference,
                             std::string_view hypothesis,
                             NormalizerProfile profile) {
  const auto ref = normalized_tokens(reference, profile);
  if (ref.empty()) {
    throw DataError("WER is undefined for an empty reference");
  }
  const auto hyp = normalized_tokens(hypothesis, profile);
  return breakdown_of(align_tokens(ref, hyp), ref.size());
}

WerBreakdown corpus_wer(
    std::span<const std::pair<std::string, std::string>> pairs,
    NormalizerProfile profile) {
  EditCounts total;
  std::size_t ref_words = 0;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto ref = normalized_tokens(pairs[k].first, profile);
    if (ref.empty()) {
      throw DataError("WER is undefined for an empty reference (pair " +
                      std::to_string(k) + ")");
    }
    const auto hyp = normalized_tokens(pairs[k].second, profile);
    const EditCounts c = align_tokens(ref, hyp);
    total.substitutions += c.substitutions;
    total.deletions += c.deletions;
    total.insertions += c.insertions;
    ref_words += ref.size();
  }
  if (ref_words == 0) {
    throw DataError("corpus WER is undefined for an empty corpus");
  }
  return breakdown_of(total, ref_words);
}

}  // namespace asrcurate

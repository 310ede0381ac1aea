#include "asrcurate/langid.hpp"

#include <unicode/uscript.h>

#include <algorithm>
#include <array>
#include <map>
#include <unordered_set>

#include "asrcurate/errors.hpp"
#include "asrcurate/text.hpp"
#include "asrcurate/wer.hpp"

namespace asrcurate {
namespace {

struct StopwordList {
  std::string_view tag;
  std::unordered_set<std::string> words;
};

const std::vector<StopwordList>& stopword_lists() {
  static const std::vector<StopwordList> lists = {
      {"en",
       {"the",   "and",   "of",    "to",    "a",     "in",    "is",
        "it",    "you",   "that",  "he",    "was",   "for",   "on",
        "are",   "with",  "as",    "i",     "his",   "they",  "be",
        "at",    "have",  "this",  "from",  "or",    "had",   "by",
        "but",   "what",  "we",    "can",   "were",  "all",   "there",
        "when",  "your",  "how",   "said",  "an",    "she",   "which",
        "do",    "their", "if",    "will",  "about", "then",  "them",
        "would", "so",    "her",   "him",   "has",   "over",  "just",
        "not",   "my",    "me",    "no",    "our",   "into",  "been",
        "very",  "yeah",  "okay",  "know",  "like",  "it's",  "don't",
        "i'm",   "because", "going", "these", "out",   "up"}},
      {"es",
       {"el", "la", "de", "que", "y", "en", "un", "una", "es", "los",
        "las", "por", "con", "para", "no", "se", "del", "lo", "al", "como",
        "pero", "su", "m\u00e1s", "muy", "yo", "est\u00e1"}},
      {"fr",
       {"le", "la", "les", "de", "des", "et", "est", "un", "une", "du",
        "que", "qui", "dans", "pour", "pas", "ce", "il", "je", "vous",
        "nous", "sur", "avec", "mais", "au", "ne", "c'est"}},
      {"de",
       {"der", "die", "das", "und", "ist", "nicht", "ein", "eine", "zu",
        "den", "von", "mit", "sich", "des", "auf", "f\u00fcr", "im", "dem",
        "ich", "es", "sie", "wir", "auch", "aber", "wie"}},
      {"it",
       {"il", "di", "che", "e", "la", "per", "un", "una", "non", "sono",
        "del", "della", "con", "mi", "ma", "si", "lo", "ho", "gli", "le",
        "questo"}},
      {"pt",
       {"o", "a", "de", "que", "e", "do", "da", "em", "um", "uma", "para",
        "com", "n\u00e3o", "os", "as", "no", "na", "por", "mais", "se",
        "eu", "voc\u00ea"}},
      {"nl",
       {"de", "het", "een", "en", "van", "ik", "te", "dat", "die", "in",
        "is", "niet", "je", "op", "zijn", "met", "voor", "maar", "wat",
        "er"}},
  };
  return lists;
}

std::string_view tag_for_script(UScriptCode script) {
  switch (script) {
    case USCRIPT_HAN:
      return "zh";
    case USCRIPT_HIRAGANA:
    case USCRIPT_KATAKANA:
      return "ja";
    case USCRIPT_HANGUL:
      return "ko";
    case USCRIPT_CYRILLIC:
      return "ru";
    case USCRIPT_ARABIC:
      return "ar";
    case USCRIPT_DEVANAGARI:
      return "hi";
    case USCRIPT_GREEK:
      return "el";
    case USCRIPT_HEBREW:
      return "he";
    case USCRIPT_THAI:
      return "th";
    default:
      return kUndetermined;
  }
}

}  // namespace

LanguageGuess StopwordDetector::detect(std::string_view input) const {
  std::map<int, std::size_t> letters_by_script;
  std::size_t letters = 0;
  for (char32_t c : text::decode_utf8(input)) {
    if (!text::is_alphabetic(c)) continue;
    UErrorCode status = U_ZERO_ERROR;
    const UScriptCode script =
        uscript_getScript(static_cast<UChar32>(c), &status);
    if (U_FAILURE(status)) continue;
    ++letters_by_script[script];
    ++letters;
  }
  if (letters == 0) return {std::string(kUndetermined), 0.0, false};

  const std::size_t latin = letters_by_script[USCRIPT_LATIN];
  if (2 * latin < letters) {
    auto best = std::max_element(
        letters_by_script.begin(), letters_by_script.end(),
        [](const auto& a, const auto& b) { return a.second < b.second; });
    const double share =
        static_cast<double>(best->second) / static_cast<double>(letters);
    const auto tag = tag_for_script(static_cast<UScriptCode>(best->first));
    return {std::string(tag), share,
            tag != kUndetermined && share >= 0.5};
  }

  const auto tokens = normalized_tokens(input, NormalizerProfile::kBasic);
  const auto& lists = stopword_lists();
  std::vector<std::size_t> hits(lists.size(), 0);
  std::size_t stop_tokens = 0;  // tokens found in at least one list
  for (const auto& token : tokens) {
    bool any = false;
    for (std::size_t k = 0; k < lists.size(); ++k) {
      if (lists[k].words.contains(token)) {
        ++hits[k];
        any = true;
      }
    }
    if (any) ++stop_tokens;
  }
  if (stop_tokens == 0) return {std::string(kUndetermined), 0.0, false};

  // Ties go to the earlier list (English first) but are never reliable.
  const std::size_t best = static_cast<std::size_t>(
      std::max_element(hits.begin(), hits.end()) - hits.begin());
  const bool unique =
      std::count(hits.begin(), hits.end(), hits[best]) == 1;
  const double confidence =
      static_cast<double>(hits[best]) / static_cast<double>(stop_tokens);
  const double coverage =
      static_cast<double>(hits[best]) / static_cast<double>(tokens.size());
  return {std::string(lists[best].tag), confidence,
          unique && confidence >= 0.5 && coverage >= 0.05};
}

const LanguageDetector& default_detector() {
  static const StopwordDetector detector;
  return detector;
}

LanguageGuess tag_text_language(const TranscriptDocument& doc,
                                const LanguageDetector& detector) {
  if (doc.text_lang && !doc.text_lang->empty()) {
    return {*doc.text_lang, 1.0, true};
  }
  const std::string full = doc.full_text();
  if (text::trim(full).empty()) {
    throw DataError("cannot tag the language of an empty transcript '" +
                    doc.doc_id + "'");
  }
  return detector.detect(full);
}

}  // namespace asrcurate

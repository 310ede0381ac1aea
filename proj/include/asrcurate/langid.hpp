#pragma once

#include <string>
#include <string_view>

#include "asrcurate/core.hpp"

namespace asrcurate {

inline constexpr std::string_view kUndetermined = "und";

struct LanguageGuess {
  std::string tag;          // ISO-639-1, or "und"
  double confidence = 0.0;  // [0, 1]
  bool reliable = false;

  bool undetermined() const { return !reliable || tag == kUndetermined; }
};

/// Pluggable top-1 text language identifier.
class LanguageDetector {
 public:
  virtual ~LanguageDetector() = default;
  virtual LanguageGuess detect(std::string_view text) const = 0;
};

/// Built-in detector: a script profile for non-Latin text and stopword hit
/// rates for a handful of Latin-script languages. Good enough to separate
/// English from everything else; not a general-purpose identifier.
class StopwordDetector final : public LanguageDetector {
 public:
  LanguageGuess detect(std::string_view text) const override;
};

const LanguageDetector& default_detector();

/// Top-1 language of a document. A tag already carried by the document
/// (e.g. from the manifest) wins over detection. Throws DataError when the
/// document has no text.
LanguageGuess tag_text_language(const TranscriptDocument& doc,
                                const LanguageDetector& detector =
                                    default_detector());

}  // namespace asrcurate

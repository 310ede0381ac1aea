#include "asrcurate/decontam.hpp"

#include <algorithm>
#include <sstream>

#include <nlohmann/json.hpp>

#include "asrcurate/errors.hpp"
#include "asrcurate/manifest.hpp"
#include "asrcurate/subtitle_io.hpp"
#include "asrcurate/text.hpp"

namespace asrcurate {

NgramIndex::NgramIndex(std::size_t n, NormalizerProfile profile)
    : n_(n), profile_(profile) {
  if (n == 0) throw UsageError("n-gram size must be >= 1");
}

void NgramIndex::add(const LabeledReference& reference) {
  auto tokens = normalized_tokens(reference.text, profile_);
  if (tokens.size() < n_) {
    ++skipped_;
    return;
  }
  const std::size_t ref = references_.size();
  references_.push_back({reference.label, std::move(tokens)});
  const auto& stored = references_.back().tokens;
  const std::span<const std::string> all(stored);
  for (std::size_t i = 0; i + n_ <= stored.size(); ++i) {
    entries_[hashing::digest128_tokens(all.subspan(i, n_))].push_back({ref, i});
  }
}

std::vector<std::string> NgramIndex::lookup(
    std::span<const std::string> window) const {
  std::vector<std::string> labels;
  if (window.size() != n_) return labels;
  auto it = entries_.find(hashing::digest128_tokens(window));
  if (it == entries_.end()) return labels;
  for (const auto& occ : it->second) {
    const auto& ref = references_[occ.reference];
    if (std::equal(window.begin(), window.end(),
                   ref.tokens.begin() + static_cast<std::ptrdiff_t>(occ.offset))) {
      labels.push_back(ref.label);
    }
  }
  return labels;
}

NgramIndex build_ngram_index(std::span<const LabeledReference> references,
                             std::size_t n, NormalizerProfile profile) {
  NgramIndex index(n, profile);
  for (const auto& ref : references) index.add(ref);
  return index;
}

NgramIndex build_ngram_index(std::span<const TranscriptDocument> references,
                             std::size_t n, NormalizerProfile profile) {
  NgramIndex index(n, profile);
  for (const auto& doc : references) index.add({doc.doc_id, doc.full_text()});
  return index;
}

ContaminationVerdict decontaminate(const TranscriptDocument& doc,
                                   const NgramIndex& index) {
  ContaminationVerdict verdict;
  if (index.empty()) return verdict;
  const auto tokens = normalized_tokens(doc.full_text(), index.profile());
  const std::span<const std::string> all(tokens);
  const std::size_t n = index.n();
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    auto labels = index.lookup(all.subspan(i, n));
    if (labels.empty()) continue;
    if (!verdict.contaminated) {
      verdict.contaminated = true;
      verdict.first_offset = i;
    }
    verdict.sources.insert(verdict.sources.end(), labels.begin(), labels.end());
  }
  std::sort(verdict.sources.begin(), verdict.sources.end());
  verdict.sources.erase(
      std::unique(verdict.sources.begin(), verdict.sources.end()),
      verdict.sources.end());
  return verdict;
}

std::vector<LabeledReference> load_references(
    const std::filesystem::path& path) {
  const std::string contents = read_file(path);
  const std::string name = path.filename().string();
  std::vector<LabeledReference> out;

  if (auto format = format_from_path(name)) {
    const auto doc = parse_subtitle(contents, format);
    out.push_back({name, doc.full_text()});
    return out;
  }

  std::istringstream in(contents);
  std::string line;
  std::size_t line_no = 0;
  const bool jsonl = path.extension() == ".jsonl";
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    if (!jsonl) {
      out.push_back({name + ":" + std::to_string(line_no),
                     std::string(text::trim(line))});
      continue;
    }
    try {
      const auto j = nlohmann::json::parse(line);
      const std::string dataset = j.value("dataset", name);
      const std::string id = j.value("id", std::to_string(line_no));
      out.push_back({dataset + "/" + id, j.at("reference").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + " line " + std::to_string(line_no) +
                      ": " + e.what());
    }
  }
  return out;
}

}  // namespace asrcurate

#include "doctest.h"

#include <algorithm>
#include <random>

#include "asrcurate/errors.hpp"
#include "asrcurate/filters.hpp"
#include "asrcurate/langid.hpp"
#include "asrcurate/segmenter.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace asrcurate;
using fixtures::pair;

namespace {

AudioTextPair tagged(std::optional<std::string> audio, std::optional<std::string> text) {
  auto p = pair("p", {"this is one of the lines in the file"});
  p.audio_lang = std::move(audio);
  p.manual.text_lang = std::move(text);
  return p;
}

// Reference of n words and a hypothesis with `wrong` of them substituted.
std::pair<std::vector<std::string>, std::vector<std::string>> planted(int n, int wrong) {
  std::vector<std::string> ref, hyp;
  for (int i = 0; i < n; ++i) {
    ref.push_back("word" + std::to_string(i));
    hyp.push_back(i < wrong ? "miss" + std::to_string(i) : ref.back());
  }
  return {ref, hyp};
}

}  // namespace

TEST_CASE("language alignment") {
  const FilterConfig cfg;
  CHECK(language_align(tagged("en", "en"), cfg).kept);
  auto d = language_align(tagged("en", "es"), cfg);
  CHECK_FALSE(d.kept);
  CHECK(d.reason == "mismatched-text-lang");
  d = language_align(tagged(std::nullopt, "en"), cfg);
  CHECK(d.reason == "missing-audio-lang");
  d = language_align(tagged("fr", "en"), cfg);
  CHECK(d.reason == "mismatched-audio-lang");
  d = language_align(tagged("en", std::nullopt), cfg);
  CHECK(d.kept);  // detected as English
  auto numeric = pair("n", {"12345"});
  d = language_align(numeric, cfg);
  CHECK(d.reason == "missing-text-lang");
}

TEST_CASE("text language detection") {
  auto doc = fixtures::doc("d", {"the quick brown fox jumped over the lazy dog"});
  auto g = tag_text_language(doc);
  CHECK(g.tag == "en");
  CHECK_FALSE(g.undetermined());
  doc.text_lang = "fr";
  CHECK(tag_text_language(doc).tag == "fr");
  g = tag_text_language(fixtures::doc("d", {"12345"}));
  CHECK(g.undetermined());
  g = tag_text_language(fixtures::doc("d", {"el perro come la comida en la casa de los amigos"}));
  CHECK(g.tag == "es");
  CHECK_FALSE(g.undetermined());
  g = tag_text_language(fixtures::doc("d", {"\xE4\xBD\xA0\xE5\xA5\xBD\xE4\xB8\x96\xE7\x95\x8C"}));
  CHECK(g.tag == "zh");
  CHECK_THROWS_AS(tag_text_language(fixtures::doc("d", {})), DataError);
}

TEST_CASE("case tags") {
  auto r = case_tag(fixtures::doc("d", {"AAA", "BBB", "CCC", "Mixed Line"}));
  CHECK(r.tag == CaseTag::kUpper);
  CHECK(r.counts == CaseCounts{3, 0, 1});
  r = case_tag(fixtures::doc("d", {"hello there", "hello there", "Hello There"}));
  CHECK(r.tag == CaseTag::kLower);
  CHECK(r.counts == CaseCounts{0, 2, 1});
  r = case_tag(fixtures::doc("d", {"UP", "down"}));
  CHECK(r.tag == CaseTag::kMixed);
  r = case_tag(fixtures::doc("d", {"123", "...", "ok"}));
  CHECK(r.counts.total() == 1);
  CHECK(r.tag == CaseTag::kLower);
}

TEST_CASE("case counts cover every line with letters") {
  std::mt19937_64 rng(3);
  const std::vector<std::string> pool = {"ABC", "abc", "Abc", "12", "", "--", "\xC3\x89T\xC3\x89", "\xC3\xA9t\xC3\xA9"};
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  for (int t = 0; t < 500; ++t) {
    std::vector<std::string> lines(rng() % 9);
    std::size_t with_letters = 0;
    for (auto& l : lines) {
      l = pool[pick(rng)];
      with_letters += std::any_of(l.begin(), l.end(), [](char c) {
        return std::isalpha(static_cast<unsigned char>(c)) || (c & 0x80);
      });
    }
    CHECK(case_tag(fixtures::doc("d", lines)).counts.total() == with_letters);
  }
}

TEST_CASE("case filter") {
  FilterConfig cfg;
  CHECK_FALSE(filter_case(pair("u", {"LOUD", "NOISE"}), cfg).kept);
  CHECK(filter_case(pair("l", {"quiet", "calm"}), cfg).kept);
  cfg.case_drop_set = {CaseTag::kUpper, CaseTag::kLower};
  const auto d = filter_case(pair("l", {"quiet", "calm"}), cfg);
  CHECK_FALSE(d.kept);
  CHECK(d.reason == "case-lower");
}

TEST_CASE("repeat detection") {
  using R = std::vector<RepeatRun>;
  CHECK(detect_repeats(fixtures::doc("d", {"a", "a", "b"}), 2) == R{{0, 2}});
  CHECK(detect_repeats(fixtures::doc("d", {"a", "b", "a"}), 2).empty());
  CHECK(detect_repeats(fixtures::doc("d", {"a", "a", "a", "b", "c", "c"}), 2) ==
        R{{0, 3}, {4, 2}});
  CHECK(detect_repeats(fixtures::doc("d", {"a", "a", "a", "b", "c", "c"}), 3) == R{{0, 3}});
  // Canonically equivalent spellings compare equal.
  CHECK(detect_repeats(fixtures::doc("d", {"\xC3\xA9", "e\xCC\x81"}), 2).size() == 1);
  CHECK_THROWS_AS(detect_repeats(fixtures::doc("d", {}), 1), UsageError);
}

TEST_CASE("repeat detection matches the brute-force scan") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> len(0, 8), sym(0, 2), run(2, 4);
  for (int t = 0; t < 10000; ++t) {
    std::vector<std::string> lines(len(rng));
    for (auto& l : lines) l = std::string(1, static_cast<char>('a' + sym(rng)));
    const std::size_t min_run = run(rng);
    std::vector<std::pair<std::size_t, std::size_t>> got;
    for (const auto& r : detect_repeats(fixtures::doc("d", lines), min_run)) {
      got.emplace_back(r.start, r.length);
    }
    CHECK(got == oracles::repeat_runs(lines, min_run));
  }
}

TEST_CASE("repeat filter") {
  const FilterConfig cfg;
  auto d = filter_repeats(pair("r", {"x", "x", "y", "z"}), cfg);
  CHECK_FALSE(d.kept);
  CHECK(d.reason == "repeated-lines");
  CHECK(*d.score == 0.5);
  CHECK(filter_repeats(pair("r", {"x", "y"}), cfg).kept);
  d = filter_repeats(pair("r", {}), cfg);
  CHECK(d.kept);
  CHECK(d.reason == "empty-document");
}

TEST_CASE("document WER filter") {
  const FilterConfig cfg;
  auto d = doc_wer_filter(pair("w", {"same text"}, std::vector<std::string>{"same text"}), cfg);
  CHECK(d.kept);
  CHECK(*d.score == 0.0);
  d = doc_wer_filter(pair("w", {"some text"}), cfg);
  CHECK(d.kept);
  CHECK(d.reason == "no-machine-transcript");
  for (auto [wrong, kept] : {std::pair{49, true}, {50, true}, {51, false}, {60, false}}) {
    auto [ref, hyp] = planted(100, wrong);
    d = doc_wer_filter(pair("w", ref, hyp), cfg);
    CHECK(d.kept == kept);
    CHECK(*d.score == wrong / 100.0);
    if (!kept) CHECK(d.reason == "doc-wer-above-threshold");
  }
}

TEST_CASE("raising the document threshold never shrinks the kept set") {
  std::mt19937_64 rng(9);
  std::vector<AudioTextPair> pairs;
  for (int i = 0; i < 60; ++i) {
    auto [ref, hyp] = planted(20, static_cast<int>(rng() % 21));
    pairs.push_back(pair("p" + std::to_string(i), ref, hyp));
  }
  std::size_t previous = 0;
  for (double tau = 0.0; tau <= 1.01; tau += 0.05) {
    FilterConfig cfg;
    cfg.doc_wer_threshold = tau;
    std::size_t kept = 0;
    for (const auto& p : pairs) kept += doc_wer_filter(p, cfg).kept;
    CHECK(kept >= previous);
    previous = kept;
  }
}

TEST_CASE("segment WER filter") {
  const FilterConfig cfg;
  auto make = [](const std::vector<std::string>& manual,
                 const std::vector<std::string>& machine) {
    std::vector<SegmentPair> out;
    for (std::size_t i = 0; i < manual.size(); ++i) {
      SegmentPair sp;
      sp.manual.doc_id = sp.machine.doc_id = "s";
      sp.manual.window_index = sp.machine.window_index = i;
      sp.manual.window_start = sp.machine.window_start = 30.0 * i;
      sp.manual.window_duration = sp.machine.window_duration = 30.0;
      if (!manual[i].empty()) sp.manual.lines = {{0, 1, manual[i]}};
      if (!machine[i].empty()) sp.machine.lines = {{0, 1, machine[i]}};
      out.push_back(sp);
    }
    return out;
  };
  auto d = segment_wer_filter(make({"same words"}, {"same words"}), cfg);
  REQUIRE(d.size() == 1);
  CHECK(d[0].kept);
  CHECK(d[0].doc_id == "s#0");
  d = segment_wer_filter(make({""}, {"hello"}), cfg);
  CHECK_FALSE(d[0].kept);
  CHECK(d[0].reason == "empty-reference");
  d = segment_wer_filter(make({""}, {""}), cfg);
  CHECK(d[0].kept);

  // WERs 0.2, 0.9, 0.4 over ten-word windows.
  const auto p1 = planted(10, 2), p2 = planted(10, 9), p3 = planted(10, 4);
  d = segment_wer_filter(
      make({fixtures::join(p1.first), fixtures::join(p2.first), fixtures::join(p3.first)},
           {fixtures::join(p1.second), fixtures::join(p2.second), fixtures::join(p3.second)}),
      cfg);
  REQUIRE(d.size() == 3);
  CHECK(d[0].kept);
  CHECK_FALSE(d[1].kept);
  CHECK(d[1].reason == "segment-wer-above-threshold");
  CHECK(d[2].kept);

  for (auto [wrong, kept] : {std::pair{69, true}, {70, true}, {71, false}}) {
    auto [ref, hyp] = planted(100, wrong);
    d = segment_wer_filter(make({fixtures::join(ref)}, {fixtures::join(hyp)}), cfg);
    CHECK(d[0].kept == kept);
  }

  auto grid = make({"a"}, {"a"});
  grid[0].machine.window_start = 5.0;
  CHECK_THROWS_AS(segment_wer_filter(grid, cfg), DataError);
}

TEST_CASE("segment windows from a pair share a grid") {
  auto p = pair("g", {"one", "two"}, std::vector<std::string>{"one"}, 65.0);
  p.manual.lines = {{5, 6, "one"}, {62, 64, "two"}};
  p.machine->lines = {{5, 6, "one"}};
  const auto windows = segment_window_pairs(p);
  REQUIRE(windows.size() == 3);
  const FilterConfig cfg;
  const auto d = segment_wer_filter(windows, cfg);
  CHECK(d[0].kept);
  CHECK(d[1].kept);  // empty on both sides
  CHECK_FALSE(d[2].kept);  // "two" vs nothing
}

TEST_CASE("config validation") {
  FilterConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.repeat_min_run = 1;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  cfg = {};
  cfg.doc_wer_threshold = -0.1;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  CHECK(parse_case_tag("upper") == CaseTag::kUpper);
  CHECK_THROWS_AS(parse_case_tag("title"), UsageError);
  CHECK(is_pointwise_stage("case"));
  CHECK_FALSE(is_pointwise_stage("dedup"));
}

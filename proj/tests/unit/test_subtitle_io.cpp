#include "doctest.h"

#include "asrcurate/errors.hpp"
#include "asrcurate/manifest.hpp"
#include "asrcurate/subtitle_io.hpp"
#include "fixtures.hpp"

using namespace asrcurate;

TEST_CASE("simple SRT cue") {
  const auto d = parse_subtitle("1\n00:00:01,000 --> 00:00:02,500\nhello\n");
  REQUIRE(d.lines.size() == 1);
  CHECK(d.lines[0] == TranscriptLine{1.0, 2.5, "hello"});
}

TEST_CASE("VTT short timestamps and voice tags") {
  const auto d = parse_subtitle("WEBVTT\n\n00:01.000 --> 00:02.000\n<v Roger>hi</v>\n");
  REQUIRE(d.lines.size() == 1);
  CHECK(d.lines[0] == TranscriptLine{1.0, 2.0, "hi"});
}

TEST_CASE("start after end is a parse error with a line number") {
  try {
    parse_subtitle("1\n00:00:02,000 --> 00:00:01,000\nx\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("malformed input") {
  CHECK_THROWS_AS(parse_subtitle(""), ParseError);
  CHECK_THROWS_AS(parse_subtitle("just some words\n"), DataError);
  CHECK_THROWS_AS(parse_subtitle("1\n00:00:0x,000 --> 00:00:01,000\nx\n",
                                 SubtitleFormat::kSrt),
                  ParseError);
  CHECK_THROWS_AS(parse_subtitle("1\n100:00:00,000 --> 100:00:01,000\nx\n",
                                 SubtitleFormat::kSrt),
                  ParseError);
}

TEST_CASE("multi-line cues, BOM, markup and ordering") {
  const std::string srt =
      "\xEF\xBB\xBF"
      "2\n00:00:05,000 --> 00:00:06,000\n<i>later</i>\n\n"
      "1\n00:00:01,000 --> 00:00:02,000\nfirst {\\an8}line\nsecond line\n";
  const auto d = parse_subtitle(srt);
  REQUIRE(d.lines.size() == 3);
  CHECK(d.lines[0].text == "first line");
  CHECK(d.lines[1].text == "second line");
  CHECK(d.lines[1].start_time == 1.0);
  CHECK(d.lines[2].text == "later");
}

TEST_CASE("VTT notes, identifiers and entities") {
  const std::string vtt =
      "WEBVTT - title\n\nNOTE a comment\nspanning lines\n\n"
      "cue-1\n00:00:00.500 --> 00:00:01.250 align:start\nfish &amp; chips\n";
  const auto d = parse_subtitle(vtt);
  REQUIRE(d.lines.size() == 1);
  CHECK(d.lines[0].start_time == 0.5);
  CHECK(d.lines[0].text == "fish & chips");
}

TEST_CASE("text is NFC normalized") {
  const auto d = parse_subtitle("1\n00:00:01,000 --> 00:00:02,000\ne\xCC\x81t\xC3\xA9\n");
  CHECK(d.lines[0].text == "\xC3\xA9t\xC3\xA9");
}

TEST_CASE("parse then serialize then parse is a fixed point") {
  const std::string srt =
      "1\n00:00:01,000 --> 00:00:02,000\nA <b>bold</b> line\nsecond\n\n"
      "2\n00:00:01,000 --> 00:00:03,000\nfish & chips\n";
  TranscriptDocument awkward;
  awkward.lines = {{0.25, 1.0, "--> arrow & 1 < 2 > 0"}, {0.25, 1.0, "same span"}};
  for (auto fmt : {SubtitleFormat::kSrt, SubtitleFormat::kVtt}) {
    const auto escaped = parse_subtitle(serialize_subtitle(awkward, fmt), fmt);
    REQUIRE(escaped.lines.size() == 2);
    CHECK(escaped.lines[1].text == "same span");
    CHECK(serialize_subtitle(parse_subtitle(serialize_subtitle(escaped, fmt), fmt), fmt) ==
          serialize_subtitle(escaped, fmt));
    const auto first = parse_subtitle(srt);
    const auto text = serialize_subtitle(first, fmt);
    const auto second = parse_subtitle(text, fmt);
    CHECK(second.lines == first.lines);
    CHECK(serialize_subtitle(second, fmt) == text);
  }
}

TEST_CASE("format detection") {
  CHECK(format_from_path("a/b.VTT") == SubtitleFormat::kVtt);
  CHECK(format_from_path("a/b.srt") == SubtitleFormat::kSrt);
  CHECK_FALSE(format_from_path("a/b.txt"));
  CHECK(detect_format("WEBVTT\n") == SubtitleFormat::kVtt);
  CHECK(format_timestamp(3723.004, SubtitleFormat::kSrt) == "01:02:03,004");
  CHECK(format_timestamp(3723.004, SubtitleFormat::kVtt) == "01:02:03.004");
}

TEST_CASE("manifest records") {
  const auto r = parse_manifest_record(
      R"({"doc_id":"a","audio_duration":3.5,"audio_lang":"en","manual_path":"x/a.srt"})", 1);
  CHECK(r.doc_id == "a");
  CHECK(r.audio_duration == 3.5);
  CHECK(*r.audio_lang == "en");
  CHECK_FALSE(r.machine_path);
  CHECK(parse_manifest_record(to_json_line(r), 1) == r);
  CHECK_THROWS_AS(parse_manifest_record(R"({"doc_id":"a","audio_duration":1,"manual_path":"/abs.srt"})", 1), DataError);
  CHECK_THROWS_AS(parse_manifest_record(R"({"doc_id":"a","audio_duration":1,"manual_path":"../up.srt"})", 1), DataError);
  CHECK_THROWS_AS(parse_manifest_record(R"({"doc_id":"a","manual_path":"a.srt"})", 1), DataError);
  CHECK_THROWS_AS(parse_manifest_record("{not json", 1), DataError);
}

TEST_CASE("load_manifest keeps order and isolates bad records") {
  fixtures::TempDir dir("manifest");
  std::vector<AudioTextPair> pairs = {fixtures::pair("c", {"one"}),
                                      fixtures::pair("a", {"two"}),
                                      fixtures::pair("b", {"three"})};
  const auto manifest = fixtures::write_corpus(dir.path(), pairs);
  auto items = load_manifest(manifest, std::nullopt, 3);
  REQUIRE(items.size() == 3);
  CHECK(items[0].pair->doc_id == "c");
  CHECK(items[1].pair->doc_id == "a");
  CHECK(items[2].pair->manual.lines[0].text == "three");

  std::filesystem::remove(dir / "transcripts/a.manual.srt");
  items = load_manifest(manifest, std::nullopt, 2);
  REQUIRE(items.size() == 3);
  CHECK(items[0].ok());
  CHECK_FALSE(items[1].ok());
  CHECK(items[1].record.doc_id == "a");
  CHECK(items[2].ok());
}

TEST_CASE("duplicate doc ids are a hard error naming the id") {
  fixtures::TempDir dir("dup");
  const auto manifest = fixtures::write_corpus(
      dir.path(), {fixtures::pair("same", {"x"}), fixtures::pair("same", {"y"})});
  try {
    ManifestReader reader(manifest);
    FAIL("expected an error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("same") != std::string::npos);
  }
}

TEST_CASE("corpus root from environment") {
  fixtures::TempDir dir("env");
  const auto manifest = fixtures::write_corpus(dir / "corpus", {fixtures::pair("a", {"x"})});
  std::filesystem::rename(manifest, dir / "m.jsonl");
  ::setenv("ASRCURATE_CORPUS_ROOT", (dir / "corpus").c_str(), 1);
  const auto items = load_manifest(dir / "m.jsonl", std::nullopt, 1);
  ::unsetenv("ASRCURATE_CORPUS_ROOT");
  REQUIRE(items.size() == 1);
  CHECK(items[0].ok());
}

TEST_CASE("write_outputs counts and layout") {
  fixtures::TempDir dir("out");
  std::vector<FilterDecision> decisions;
  for (int i = 0; i < 5; ++i) {
    decisions.push_back(i < 3 ? keep("d" + std::to_string(i), "case")
                              : drop("d" + std::to_string(i), "case", "case-upper"));
  }
  std::vector<AudioTextPair> kept = {fixtures::pair("d0", {"a"}),
                                     fixtures::pair("d1", {"b"}),
                                     fixtures::pair("d2", {"c"}, std::vector<std::string>{"c"})};
  const auto summary = write_outputs(decisions, std::span<const AudioTextPair>(kept), dir.path());
  CHECK(summary.decisions == 5);
  CHECK(summary.kept == 3);
  const auto count_lines = [](const std::string& s) {
    return std::count(s.begin(), s.end(), '\n');
  };
  CHECK(count_lines(fixtures::slurp(dir / "decisions.jsonl")) == 5);
  CHECK(count_lines(fixtures::slurp(dir / "manifest.jsonl")) == 3);

  // Round trip through the written manifest.
  const auto items = load_manifest(dir / "manifest.jsonl", std::nullopt, 1);
  REQUIRE(items.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    REQUIRE(items[i].ok());
    auto back = *items[i].pair;
    back.manual.source_path.clear();
    if (back.machine) back.machine->source_path.clear();
    CHECK(back == kept[i]);
  }

  fixtures::TempDir again("out2");
  write_outputs(decisions, std::span<const AudioTextPair>(kept), again.path());
  for (const char* f : {"decisions.jsonl", "manifest.jsonl"}) {
    CHECK(fixtures::slurp(dir / f) == fixtures::slurp(again / f));
  }
}

TEST_CASE("write_outputs with nothing kept") {
  fixtures::TempDir dir("empty");
  const auto summary = write_outputs({}, std::span<const AudioTextPair>(), dir.path());
  CHECK(summary.kept == 0);
  CHECK(std::filesystem::exists(dir / "manifest.jsonl"));
  CHECK(fixtures::slurp(dir / "manifest.jsonl").empty());
}

TEST_CASE("decision JSON round trip") {
  const auto d = drop("x", "doc-wer", "doc-wer-above-threshold", 0.75);
  CHECK(to_json_line(d) ==
        R"({"doc_id":"x","stage":"doc-wer","kept":false,"reason":"doc-wer-above-threshold","score":0.75})");
  CHECK(parse_decision(to_json_line(d), 1) == d);
  const auto k = keep("y", "case");
  CHECK(parse_decision(to_json_line(k), 1) == k);
}

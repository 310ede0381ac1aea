#include "doctest.h"

#include "asrcurate/core.hpp"
#include "fixtures.hpp"

using namespace asrcurate;

TEST_CASE("well-formed pair has no findings") {
  const auto p = fixtures::pair("doc", {"hello there", "general kenobi"},
                                std::vector<std::string>{"hello there"});
  CHECK(validate_pair(p).empty());
}

TEST_CASE("start after end is an error on that line") {
  auto p = fixtures::pair("doc", {"a", "b"});
  p.manual.lines[1].start_time = 5.0;
  p.manual.lines[1].end_time = 4.0;
  const auto findings = validate_pair(p);
  REQUIRE(findings.size() == 1);
  CHECK(findings[0].severity == Severity::kError);
  CHECK(findings[0].field.find("lines[1]") != std::string::npos);
}

TEST_CASE("captions past the audio end are a warning") {
  auto p = fixtures::pair("doc", {"a"}, std::nullopt, 10.0);
  p.manual.lines[0] = {1.0, 12.0, "a"};
  const auto findings = validate_pair(p);
  REQUIRE(findings.size() == 1);
  CHECK(findings[0].severity == Severity::kWarning);
}

TEST_CASE("line breaks and id mismatches are errors") {
  auto p = fixtures::pair("doc", {"a"}, std::vector<std::string>{"a"});
  p.manual.lines[0].text = "two\nlines";
  p.machine->doc_id = "other";
  const auto findings = validate_pair(p);
  CHECK(findings.size() == 2);
  for (const auto& f : findings) CHECK(f.severity == Severity::kError);
}

TEST_CASE("unsorted lines are an error") {
  auto p = fixtures::pair("doc", {"a", "b"});
  std::swap(p.manual.lines[0], p.manual.lines[1]);
  CHECK_FALSE(validate_pair(p).empty());
}

TEST_CASE("document helpers") {
  auto d = fixtures::doc("d", {"héllo", "", "world"});
  CHECK(d.full_text() == "héllo world");
  CHECK(d.char_count() == 10);
  d.lines = {{3, 4, "c"}, {1, 2, "a"}, {1, 2, "b"}};
  d.sort_lines();
  CHECK(d.lines[0].text == "a");
  CHECK(d.lines[1].text == "b");
  CHECK(d.lines[2].text == "c");
}

TEST_CASE("decision helpers and segment key") {
  const auto k = keep("x", "case");
  CHECK(k.kept);
  CHECK(k.reason.empty());
  const auto d = drop("x", "case", "case-upper", 0.5);
  CHECK_FALSE(d.kept);
  CHECK(d.reason == "case-upper");
  CHECK(*d.score == 0.5);
  Segment s;
  s.doc_id = "abc";
  s.window_index = 3;
  CHECK(s.key() == "abc#3");
  CHECK(to_string(CaseTag::kMixed) == "mixed");
}

TEST_CASE("microsecond accounting") {
  CHECK(to_microseconds(1.5) == 1500000);
  CHECK(to_microseconds(0.0000004) == 0);
  CHECK(microseconds_to_hours(3600LL * 1000000) == doctest::Approx(1.0));
}

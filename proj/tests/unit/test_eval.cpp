#include "doctest.h"

#include <cmath>

#include "asrcurate/errors.hpp"
#include "asrcurate/eval.hpp"
#include "fixtures.hpp"

using namespace asrcurate;

namespace {
constexpr auto kBasic = NormalizerProfile::kBasic;

RobustnessPoint point(const std::string& model, double id, double ood,
                      bool intervention = false) {
  return {model, id, ood, intervention, {"ood-a", "ood-b"}};
}
}  // namespace

TEST_CASE("perfect hypotheses score zero") {
  const std::vector<EvalRecord> records = {{"ds1", "u1", "a b", "a b"},
                                           {"ds2", "u1", "c d", "c d"}};
  const auto report = evaluate(records, kBasic);
  REQUIRE(report.datasets.size() == 2);
  for (const auto& d : report.datasets) CHECK(d.wer.wer == 0.0);
  CHECK(report.macro_average == 0.0);
}

TEST_CASE("macro average is the unweighted mean of pooled dataset WERs") {
  std::vector<EvalRecord> records;
  // ds1: 1 error in 10 words. ds2: 3 errors in 10 words over two utterances.
  records.push_back({"ds1", "u1", "a b c d e f g h i j", "a b c d e f g h i x"});
  records.push_back({"ds2", "u1", "a b", "x y"});
  records.push_back({"ds2", "u2", "a b c d e f g h", "a b c d e f g x"});
  const auto report = evaluate(records, kBasic);
  CHECK(report.find("ds1")->wer.wer == doctest::Approx(0.1));
  CHECK(report.find("ds2")->wer.wer == doctest::Approx(0.3));
  CHECK(report.macro_average == doctest::Approx(0.2));
  CHECK(report.find("nope") == nullptr);
}

TEST_CASE("a single dataset equals corpus WER") {
  const std::vector<EvalRecord> records = {{"d", "1", "the cat sat", "the bat sat down"},
                                           {"d", "2", "on the mat", "on mat"}};
  const std::vector<std::pair<std::string, std::string>> pairs = {
      {"the cat sat", "the bat sat down"}, {"on the mat", "on mat"}};
  CHECK(evaluate(records, kBasic).datasets[0].wer == corpus_wer(pairs, kBasic));
}

TEST_CASE("expected datasets without records are warned about") {
  const std::vector<EvalRecord> records = {{"have", "1", "a", "a"}};
  const std::vector<std::string> expected = {"have", "missing"};
  const auto report = evaluate(records, kBasic, expected);
  CHECK(report.datasets.size() == 1);
  REQUIRE(report.warnings.size() == 1);
  CHECK(report.warnings[0].find("missing") != std::string::npos);
}

TEST_CASE("macro average of table rows") {
  const std::vector<double> medium = {3.5, 5.7, 5.0, 3.6, 14.3, 12.7, 11.3,
                                      7.5, 18.7, 28.5, 16.9, 38.3, 8.4, 4.4};
  CHECK(std::abs(macro_average(medium) - 12.8) <= 0.05);
  CHECK(macro_average({}) == 0.0);
}

TEST_CASE("loading records from JSONL and directories") {
  fixtures::TempDir dir("eval");
  fixtures::write(dir / "r.jsonl",
                  R"({"dataset":"a","utterance_id":"1","reference":"x y","hypothesis":"x"})" "\n");
  auto records = load_eval_records(dir / "r.jsonl");
  REQUIRE(records.size() == 1);
  CHECK(records[0].hypothesis == "x");

  fixtures::write(dir / "tree/ds/u1.ref.txt", "hello world\n");
  fixtures::write(dir / "tree/ds/u1.hyp.txt", "hello word\n");
  records = load_eval_records(dir / "tree");
  REQUIRE(records.size() == 1);
  CHECK(records[0].dataset == "ds");
  CHECK(records[0].utterance_id == "u1");

  fixtures::write(dir / "tree/ds/u2.ref.txt", "orphan\n");
  CHECK_THROWS_AS(load_eval_records(dir / "tree"), DataError);
}

TEST_CASE("effective robustness") {
  // Baselines on ood = 2 * id in linear terms.
  std::vector<RobustnessPoint> pts = {point("b1", 0.10, 0.20), point("b2", 0.20, 0.40),
                                      point("c", 0.10, 0.10, true),
                                      point("on", 0.15, 0.30, true)};
  const auto r = effective_robustness(pts);
  CHECK(r.baseline_points == 2);
  CHECK(r.fit.slope == doctest::Approx(1.0));
  CHECK(std::abs(r.models[2].effective_robustness - std::log10(2.0)) <= 1e-9);
  CHECK(r.models[2].factor == doctest::Approx(2.0));
  CHECK(std::abs(r.models[3].effective_robustness) <= 1e-12);
  pts.push_back(point("worse", 0.10, 0.40, true));
  CHECK(effective_robustness(pts).models.back().effective_robustness < 0);
}

TEST_CASE("baseline residuals sum to zero") {
  std::vector<RobustnessPoint> pts = {point("a", 0.05, 0.12), point("b", 0.08, 0.15),
                                      point("c", 0.12, 0.31), point("d", 0.2, 0.33)};
  const auto r = effective_robustness(pts);
  double sum = 0;
  for (const auto& m : r.models) sum += m.effective_robustness;
  CHECK(std::abs(sum) <= 1e-12);
}

TEST_CASE("candidate ER does not depend on the other candidates") {
  std::vector<RobustnessPoint> pts = {point("a", 0.05, 0.12), point("b", 0.08, 0.15),
                                      point("c", 0.12, 0.31), point("x", 0.1, 0.1, true)};
  const double alone = effective_robustness(pts).models[3].effective_robustness;
  pts.insert(pts.begin(), point("y", 0.3, 0.2, true));
  CHECK(effective_robustness(pts).models[4].effective_robustness == doctest::Approx(alone));
}

TEST_CASE("robustness errors") {
  std::vector<RobustnessPoint> one = {point("a", 0.1, 0.2), point("b", 0.2, 0.3, true)};
  CHECK_THROWS_AS(effective_robustness(one), DataError);
  std::vector<RobustnessPoint> same = {point("a", 0.1, 0.2), point("b", 0.1, 0.3)};
  CHECK_THROWS_AS(effective_robustness(same), DataError);
  std::vector<RobustnessPoint> zero = {point("a", 0.0, 0.2), point("b", 0.1, 0.3)};
  CHECK_THROWS_AS(effective_robustness(zero), DataError);
  CHECK_NOTHROW(effective_robustness(zero, FitDomain::kLinear));
}

TEST_CASE("linear-domain fit") {
  std::vector<RobustnessPoint> pts = {point("a", 0.1, 0.3), point("b", 0.2, 0.5),
                                      point("c", 0.1, 0.2, true)};
  const auto r = effective_robustness(pts, FitDomain::kLinear);
  CHECK(r.fit.slope == doctest::Approx(2.0));
  CHECK(r.fit.intercept == doctest::Approx(0.1));
  CHECK(r.models[2].effective_robustness == doctest::Approx(0.1));
}

TEST_CASE("relative robustness") {
  CHECK(relative_robustness(point("w", .1, .3), point("o", .1, .3)) == 0.0);
  CHECK(relative_robustness(point("w", .1, .22), point("o", .1, .30)) == doctest::Approx(0.08));
  CHECK(relative_robustness(point("w", .1, .35), point("o", .1, .30)) < 0);
  auto other = point("o", .1, .3);
  other.ood_suite = {"different"};
  CHECK_THROWS_AS(relative_robustness(point("w", .1, .3), other), DataError);
}

TEST_CASE("robustness points from an evaluation") {
  const std::vector<EvalRecord> records = {{"id", "1", "a b c d", "a b c x"},
                                           {"o1", "1", "a b", "a x"},
                                           {"o2", "1", "a b", "a b"}};
  const auto report = evaluate(records, kBasic);
  const std::vector<std::string> ood = {"o1", "o2"};
  const auto p = make_robustness_point("m", report, "id", ood, false);
  CHECK(p.id_wer == doctest::Approx(0.25));
  CHECK(p.ood_wer == doctest::Approx(0.25));
  CHECK(p.ood_suite == ood);
}

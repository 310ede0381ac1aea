#include "asrcurate/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "asrcurate/errors.hpp"
#include "asrcurate/manifest.hpp"
#include "asrcurate/text.hpp"

namespace asrcurate {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kRefSuffix = ".ref.txt";
constexpr std::string_view kHypSuffix = ".hyp.txt";

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

std::string file_text(const fs::path& path) {
  std::string contents = read_file(path);
  std::string joined;
  std::istringstream in(contents);
  std::string line;
  while (std::getline(in, line)) {
    auto t = text::trim(line);
    if (t.empty()) continue;
    if (!joined.empty()) joined.push_back(' ');
    joined.append(t);
  }
  return joined;
}

std::vector<EvalRecord> load_directory(const fs::path& root) {
  std::vector<EvalRecord> records;
  for (const auto& dataset_dir : fs::directory_iterator(root)) {
    if (!dataset_dir.is_directory()) continue;
    const std::string dataset = dataset_dir.path().filename().string();
    for (const auto& entry : fs::directory_iterator(dataset_dir.path())) {
      const std::string name = entry.path().filename().string();
      if (!entry.is_regular_file() || !ends_with(name, kRefSuffix)) continue;
      const std::string utt = name.substr(0, name.size() - kRefSuffix.size());
      const fs::path hyp = dataset_dir.path() / (utt + std::string(kHypSuffix));
      if (!fs::exists(hyp)) {
        throw DataError("missing hypothesis " + hyp.string());
      }
      records.push_back({dataset, utt, file_text(entry.path()), file_text(hyp)});
    }
  }
  std::sort(records.begin(), records.end(),
            [](const EvalRecord& a, const EvalRecord& b) {
              return std::tie(a.dataset, a.utterance_id) <
                     std::tie(b.dataset, b.utterance_id);
            });
  return records;
}

std::string percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", fraction * 100.0);
  return buf;
}

}  // namespace

std::vector<EvalRecord> load_eval_records(const fs::path& path) {
  if (fs::is_directory(path)) return load_directory(path);
  const std::string contents = read_file(path);
  std::vector<EvalRecord> records;
  std::istringstream in(contents);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      EvalRecord r;
      r.dataset = j.at("dataset").get<std::string>();
      r.utterance_id = j.contains("id") ? j.at("id").get<std::string>()
                                        : std::to_string(line_no);
      r.reference = j.at("reference").get<std::string>();
      r.hypothesis = j.at("hypothesis").get<std::string>();
      records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path.string() + " line " + std::to_string(line_no) +
                      ": " + e.what());
    }
  }
  return records;
}

const DatasetScore* EvalReport::find(std::string_view dataset) const {
  for (const auto& d : datasets) {
    if (d.dataset == dataset) return &d;
  }
  return nullptr;
}

double macro_average(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

EvalReport evaluate(std::span<const EvalRecord> records,
                    NormalizerProfile profile,
                    std::span<const std::string> expected_datasets) {
  std::map<std::string, std::vector<std::pair<std::string, std::string>>>
      by_dataset;
  for (const auto& r : records) {
    if (normalized_tokens(r.reference, profile).empty()) {
      throw DataError("empty reference for " + r.dataset + "/" +
                      r.utterance_id);
    }
    by_dataset[r.dataset].emplace_back(r.reference, r.hypothesis);
  }

  EvalReport report;
  report.profile = profile;
  for (const auto& name : expected_datasets) {
    if (!by_dataset.contains(name)) {
      report.warnings.push_back("dataset '" + name +
                                "' has no records; omitted from the average");
    }
  }
  std::vector<double> wers;
  for (const auto& [name, pairs] : by_dataset) {
    DatasetScore score;
    score.dataset = name;
    score.utterances = pairs.size();
    score.wer = corpus_wer(pairs, profile);
    wers.push_back(score.wer.wer);
    report.datasets.push_back(std::move(score));
  }
  report.macro_average = macro_average(wers);
  return report;
}

std::string to_text(const EvalReport& report) {
  std::ostringstream out;
  out << "normalizer: " << to_string(report.profile) << "\n";
  std::size_t width = 7;
  for (const auto& d : report.datasets) width = std::max(width, d.dataset.size());
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-*s %8s %8s %6s %6s %6s %7s\n",
                static_cast<int>(width), "dataset", "utts", "words", "sub",
                "del", "ins", "WER(%)");
  out << buf;
  for (const auto& d : report.datasets) {
    std::snprintf(buf, sizeof(buf), "%-*s %8zu %8zu %6zu %6zu %6zu %7s\n",
                  static_cast<int>(width), d.dataset.c_str(), d.utterances,
                  d.wer.reference_words, d.wer.substitutions, d.wer.deletions,
                  d.wer.insertions, percent(d.wer.wer).c_str());
    out << buf;
  }
  std::snprintf(buf, sizeof(buf), "%-*s %47s\n", static_cast<int>(width),
                "average", percent(report.macro_average).c_str());
  out << buf;
  for (const auto& w : report.warnings) out << "warning: " << w << "\n";
  return out.str();
}

std::string to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["normalizer"] = to_string(report.profile);
  j["datasets"] = nlohmann::ordered_json::array();
  for (const auto& d : report.datasets) {
    nlohmann::ordered_json row;
    row["dataset"] = d.dataset;
    row["utterances"] = d.utterances;
    row["reference_words"] = d.wer.reference_words;
    row["substitutions"] = d.wer.substitutions;
    row["deletions"] = d.wer.deletions;
    row["insertions"] = d.wer.insertions;
    row["wer"] = d.wer.wer;
    j["datasets"].push_back(std::move(row));
  }
  j["macro_average"] = report.macro_average;
  j["warnings"] = report.warnings;
  return j.dump(2);
}

RobustnessPoint make_robustness_point(const std::string& model,
                                      const EvalReport& report,
                                      const std::string& id_dataset,
                                      std::span<const std::string> ood_datasets,
                                      bool is_intervention) {
  const DatasetScore* id = report.find(id_dataset);
  if (id == nullptr) {
    throw DataError("in-distribution dataset '" + id_dataset +
                    "' missing from the evaluation of " + model);
  }
  if (ood_datasets.empty()) throw UsageError("no OOD datasets given");
  std::vector<double> ood;
  for (const auto& name : ood_datasets) {
    const DatasetScore* s = report.find(name);
    if (s == nullptr) {
      throw DataError("OOD dataset '" + name +
                      "' missing from the evaluation of " + model);
    }
    ood.push_back(s->wer.wer);
  }
  RobustnessPoint p;
  p.model = model;
  p.id_wer = id->wer.wer;
  p.ood_wer = macro_average(ood);
  p.is_intervention = is_intervention;
  p.ood_suite.assign(ood_datasets.begin(), ood_datasets.end());
  return p;
}

std::string_view to_string(FitDomain domain) {
  return domain == FitDomain::kLog10 ? "log10" : "linear";
}

double LinearFit::predict_ood(double id_wer) const {
  if (domain == FitDomain::kLog10) {
    return std::pow(10.0, intercept + slope * std::log10(id_wer));
  }
  return intercept + slope * id_wer;
}

RobustnessReport effective_robustness(std::span<const RobustnessPoint> points,
                                      FitDomain domain) {
  const bool log = domain == FitDomain::kLog10;
  auto transform = [&](double wer, const std::string& model) {
    if (log && !(wer > 0.0)) {
      throw DataError("WER of '" + model +
                      "' must be > 0 for a log-domain fit");
    }
    return log ? std::log10(wer) : wer;
  };

  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& p : points) {
    const double x = transform(p.id_wer, p.model);
    const double y = transform(p.ood_wer, p.model);
    if (p.is_intervention) continue;
    xs.push_back(x);
    ys.push_back(y);
  }
  const std::set<double> distinct(xs.begin(), xs.end());
  if (distinct.size() < 2) {
    throw DataError(
        "effective robustness needs at least two baseline points with "
        "distinct in-distribution WER");
  }

  const double n = static_cast<double>(xs.size());
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mean_x += xs[i];
    mean_y += ys[i];
  }
  mean_x /= n;
  mean_y /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mean_x) * (xs[i] - mean_x);
    sxy += (xs[i] - mean_x) * (ys[i] - mean_y);
  }

  RobustnessReport report;
  report.fit.domain = domain;
  report.fit.slope = sxy / sxx;
  report.fit.intercept = mean_y - report.fit.slope * mean_x;
  report.baseline_points = xs.size();

  for (const auto& p : points) {
    ModelRobustness m;
    m.model = p.model;
    m.is_intervention = p.is_intervention;
    const double fitted =
        report.fit.intercept + report.fit.slope * transform(p.id_wer, p.model);
    m.effective_robustness = fitted - transform(p.ood_wer, p.model);
    m.predicted_ood_wer = log ? std::pow(10.0, fitted) : fitted;
    m.factor = log ? std::pow(10.0, m.effective_robustness)
                   : (p.ood_wer > 0.0 ? m.predicted_ood_wer / p.ood_wer
                                      : std::nan(""));
    report.models.push_back(std::move(m));
  }
  return report;
}

double relative_robustness(const RobustnessPoint& with_intervention,
                           const RobustnessPoint& without_intervention) {
  auto a = with_intervention.ood_suite;
  auto b = without_intervention.ood_suite;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b) {
    throw DataError("'" + with_intervention.model + "' and '" +
                    without_intervention.model +
                    "' were scored on different OOD suites");
  }
  return without_intervention.ood_wer - with_intervention.ood_wer;
}

}  // namespace asrcurate

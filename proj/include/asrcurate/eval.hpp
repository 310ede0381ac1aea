#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "asrcurate/wer.hpp"

namespace asrcurate {

struct EvalRecord {
  std::string dataset;
  std::string utterance_id;
  std::string reference;
  std::string hypothesis;
};

/// Reads either a line-delimited JSON file ({dataset, id, reference,
/// hypothesis}) or a directory laid out as <dataset>/<utt>.ref.txt with a
/// matching <utt>.hyp.txt. Records come back sorted by (dataset, id) for the
/// directory form and in file order otherwise.
std::vector<EvalRecord> load_eval_records(const std::filesystem::path& path);

struct DatasetScore {
  std::string dataset;
  std::size_t utterances = 0;
  WerBreakdown wer;  // pooled over the dataset's utterances
};

struct EvalReport {
  NormalizerProfile profile = NormalizerProfile::kBasic;
  std::vector<DatasetScore> datasets;  // sorted by name
  double macro_average = 0.0;          // unweighted mean of dataset WERs
  std::vector<std::string> warnings;

  const DatasetScore* find(std::string_view dataset) const;
};

/// Scores records per dataset. Names listed in `expected_datasets` that have
/// no records are left out of the average and reported as warnings. Throws
/// DataError on an empty reference.
EvalReport evaluate(std::span<const EvalRecord> records,
                    NormalizerProfile profile,
                    std::span<const std::string> expected_datasets = {});

double macro_average(std::span<const double> values);

std::string to_text(const EvalReport& report);
std::string to_json(const EvalReport& report);

struct RobustnessPoint {
  std::string model;
  double id_wer = 0.0;   // in-distribution WER (fraction)
  double ood_wer = 0.0;  // mean over the OOD suite (fraction)
  bool is_intervention = false;
  std::vector<std::string> ood_suite;  // dataset names behind ood_wer
};

/// Builds a point from an evaluation: id_wer is `id_dataset`'s WER and
/// ood_wer the unweighted mean over `ood_datasets`.
RobustnessPoint make_robustness_point(const std::string& model,
                                      const EvalReport& report,
                                      const std::string& id_dataset,
                                      std::span<const std::string> ood_datasets,
                                      bool is_intervention);

enum class FitDomain { kLog10, kLinear };

std::string_view to_string(FitDomain domain);

struct LinearFit {
  FitDomain domain = FitDomain::kLog10;
  double intercept = 0.0;
  double slope = 0.0;

  /// Predicted OOD WER (fraction) for an in-distribution WER.
  double predict_ood(double id_wer) const;
};

struct ModelRobustness {
  std::string model;
  bool is_intervention = false;
  double predicted_ood_wer = 0.0;
  /// log10 units in the log domain, WER fraction in the linear domain;
  /// positive means lower OOD WER than the baseline trend predicts.
  double effective_robustness = 0.0;
  /// predicted / observed OOD WER.
  double factor = 1.0;
};

struct RobustnessReport {
  LinearFit fit;
  std::size_t baseline_points = 0;
  std::vector<ModelRobustness> models;  // input order
};

/// Least-squares fit of OOD on ID WER over the non-intervention points
/// (log10 of both in the log domain), then each model's gap to the fit.
/// Throws DataError with fewer than two distinct baseline points or a
/// non-positive WER in the log domain.
RobustnessReport effective_robustness(std::span<const RobustnessPoint> points,
                                      FitDomain domain = FitDomain::kLog10);

/// ood_wer(without) - ood_wer(with). Throws DataError when the two points
/// were scored on different OOD suites.
double relative_robustness(const RobustnessPoint& with_intervention,
                           const RobustnessPoint& without_intervention);

}  // namespace asrcurate

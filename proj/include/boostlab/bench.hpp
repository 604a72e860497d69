#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "boostlab/boost.hpp"
#include "boostlab/dataset.hpp"
#include "boostlab/metrics.hpp"

namespace boostlab {

struct SyntheticSource {
  FeatureSchema schema = pcos_default_schema();
  SynthOptions options;
};

struct CsvSource {
  std::filesystem::path path;
  FeatureSchema schema = pcos_default_schema();
};

struct BenchmarkConfig {
  std::variant<SyntheticSource, CsvSource> source = SyntheticSource{};
  SplitSpec split;
  // Indexed like kAllAlgorithms.
  std::array<BoostParams, 4> params = {default_params(Algorithm::AdaBoost),
                                       default_params(Algorithm::Gbm),
                                       default_params(Algorithm::XgBoost),
                                       default_params(Algorithm::CatBoost)};
  // Empty: compute the report without writing files.
  std::filesystem::path output_dir;
  bool parallel = true;
};

/// 250 synthetic rows at signal 2.0, a 48-row stratified test split, and the
/// paper_preset_params() of each algorithm, all seeded from `seed`.
BenchmarkConfig paper_preset_config(std::uint64_t seed = 42);

// Config JSON: {"preset": "paper"|"default", "seed": s,
//   "data": {"csv": path, "schema": {...}} | {"synthetic": {"n", "signal_strength",
//   "missing_rate"}}, "split": {"test_fraction"}, "params": {"gbm": {...}, ...}}
BenchmarkConfig config_from_json(const std::string& text);

struct AlgorithmResult {
  Algorithm algorithm = Algorithm::AdaBoost;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  ConfusionMatrix confusion;
  MetricScores scores;
  double auc = 0.0;
  CurveSeries roc;
  CurveSeries pr;
  std::vector<std::size_t> test_row_ids;
};

struct BenchmarkReport {
  std::vector<AlgorithmResult> results;  // adaboost, gbm, xgboost, catboost
  std::uint64_t seed = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::string timestamp;
};

/// Trains all four boosters on one shared split and evaluates them on its
/// test partition. With an output directory set, writes report.json,
/// table.txt, table.csv and roc_<algo>.csv / pr_<algo>.csv for each booster.
BenchmarkReport run_benchmark(const BenchmarkConfig& config);

std::string report_to_json(const BenchmarkReport& report);

// Columns: Algorithm, Train%, Test%, FN, FP, Precision, Recall, F-Score, AUC.
std::string render_table(const BenchmarkReport& report);
std::string render_table_csv(const BenchmarkReport& report);

std::string display_name(Algorithm algo);

}  // namespace boostlab

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "boostlab/dataset.hpp"
#include "boostlab/tree.hpp"

namespace boostlab {

enum class Algorithm { AdaBoost, Gbm, XgBoost, CatBoost };

inline constexpr Algorithm kAllAlgorithms[] = {Algorithm::AdaBoost, Algorithm::Gbm,
                                               Algorithm::XgBoost, Algorithm::CatBoost};

// "adaboost", "gbm", "xgboost", "catboost"
std::string_view algorithm_name(Algorithm algo) noexcept;
std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept;

struct BoostParams {
  int n_rounds = 100;
  double learning_rate = 0.1;
  int max_depth = 3;
  double lambda = 1.0;
  double gamma = 0.0;
  double min_child_weight = 1.0;
  std::uint64_t seed = 42;
  int cat_one_hot_max = 2;
  double cat_prior = 0.5;
  double threshold = 0.5;

  // Throws InvalidArgument when a field is outside its domain.
  void validate() const;

  friend bool operator==(const BoostParams&, const BoostParams&) = default;
};

/// Library defaults: depth 1 for AdaBoost, 3 for GBM/XGB, 6 for CatBoost.
BoostParams default_params(Algorithm algo);

/// Benchmark reproduction settings: GBM learning rate 0.01 and CatBoost
/// depth 16 on top of the library defaults.
BoostParams paper_preset_params(Algorithm algo);

struct WeightedStump {
  Stump stump;
  double alpha = 0.0;

  friend bool operator==(const WeightedStump&, const WeightedStump&) = default;
};

struct AdaBoostModel {
  FeatureSchema schema;
  BoostParams params;
  std::vector<WeightedStump> stumps;

  // Σ α_t h_t(x)
  double margin(std::span<const double> row) const;

  friend bool operator==(const AdaBoostModel&, const AdaBoostModel&) = default;
};

/// Additive regression-tree model: score = base_score + lr · Σ trees.
struct TreeEnsembleModel {
  FeatureSchema schema;
  BoostParams params;
  double base_score = 0.0;
  double learning_rate = 0.1;
  std::vector<RegressionTree> trees;

  double margin(std::span<const double> row) const;

  friend bool operator==(const TreeEnsembleModel&, const TreeEnsembleModel&) = default;
};

struct GbmModel : TreeEnsembleModel {};
struct XgbModel : TreeEnsembleModel {};

enum class CatMode { OneHot, TargetStatistic };

/// How one categorical input column is turned into numeric columns.
struct CatFeatureEncoding {
  int feature = 0;
  int cardinality = 0;
  CatMode mode = CatMode::OneHot;
  // Full-training-set per-level counts, used to encode rows at prediction time.
  std::vector<double> positives;
  std::vector<double> totals;

  friend bool operator==(const CatFeatureEncoding&, const CatFeatureEncoding&) = default;
};

/// Column layout and statistics that map raw rows into the numeric space
/// the oblivious trees were fitted in. Non-categorical columns pass through;
/// one-hot columns expand to `cardinality` 0/1 columns; target-statistic
/// columns become (positives + prior) / (total + 1) for the row's level.
struct CatEncodingState {
  double prior = 0.5;
  std::vector<CatFeatureEncoding> features;

  std::size_t encoded_width(const FeatureSchema& schema) const;
  // Encodes one raw row without using any label.
  void encode_row(const FeatureSchema& schema, std::span<const double> row,
                  std::vector<double>& out) const;

  friend bool operator==(const CatEncodingState&, const CatEncodingState&) = default;
};

/// Ordered target statistics for one categorical column.
///
/// Rows are visited in `order`; each row's value is computed from the rows
/// visited before it, then its own label is added to the running counts.
/// A missing level encodes as Missing and does not update the counts.
std::vector<double> ordered_target_statistics(std::span<const double> levels,
                                              std::span<const std::uint8_t> labels,
                                              std::span<const std::size_t> order, double prior);

struct CatBoostModel {
  FeatureSchema schema;
  BoostParams params;
  double base_score = 0.0;
  double learning_rate = 0.1;
  std::vector<ObliviousTree> trees;
  CatEncodingState encoding;

  double margin(std::span<const double> row) const;

  friend bool operator==(const CatBoostModel&, const CatBoostModel&) = default;
};

/// Training-time encoding for CatBoost-style fitting: the state stored in
/// the model plus the leakage-free matrix the trees are fitted on.
struct CatTrainingEncoding {
  CatEncodingState state;
  std::vector<double> cells;  // n x width, row-major
  std::size_t width = 0;
  std::vector<std::size_t> permutation;
};

CatTrainingEncoding encode_for_training(const Dataset& train, const BoostParams& params);

struct AdaBoostRound {
  double weighted_error = 0.0;
  double alpha = 0.0;
  bool alpha_capped = false;
  // Error of this round's stump under the weights after reweighting.
  double post_reweight_error = 0.0;
  // (1/n) Σ exp(−y F(x)) after the round.
  double exp_loss = 0.0;
};

struct AdaBoostTrace {
  std::vector<AdaBoostRound> rounds;
};

struct DevianceTrace {
  // deviance[0] is the base-score model; deviance[t] follows round t.
  std::vector<double> deviance;
};

AdaBoostModel fit_adaboost(const Dataset& train, const BoostParams& params,
                           AdaBoostTrace* trace = nullptr);
GbmModel fit_gbm(const Dataset& train, const BoostParams& params, DevianceTrace* trace = nullptr);

struct XgbOptions {
  // Replace p(1−p) by 1; with λ = γ = 0 this reproduces GBM's trees.
  bool unit_hessians = false;
};

XgbModel fit_xgb(const Dataset& train, const BoostParams& params, DevianceTrace* trace = nullptr,
                 const XgbOptions& options = {});
CatBoostModel fit_catboost(const Dataset& train, const BoostParams& params,
                           DevianceTrace* trace = nullptr);

/// Any fitted model. Immutable once built.
class Model {
 public:
  using Variant = std::variant<AdaBoostModel, GbmModel, XgbModel, CatBoostModel>;

  Model(AdaBoostModel m) : impl_(std::move(m)) {}
  Model(GbmModel m) : impl_(std::move(m)) {}
  Model(XgbModel m) : impl_(std::move(m)) {}
  Model(CatBoostModel m) : impl_(std::move(m)) {}

  Algorithm algorithm() const noexcept;
  const FeatureSchema& schema() const noexcept;
  const BoostParams& params() const noexcept;
  const Variant& variant() const noexcept { return impl_; }

  // Raw additive score; AdaBoost returns Σ α h, the others the log-odds.
  double margin(std::span<const double> row) const;

  friend bool operator==(const Model&, const Model&) = default;

 private:
  Variant impl_;
};

Model fit(Algorithm algo, const Dataset& train, const BoostParams& params);

/// Probabilities in [0,1]: sigmoid(2·margin) for AdaBoost, sigmoid(margin)
/// otherwise. Throws SchemaMismatch when `data` has a different schema.
std::vector<double> predict_scores(const Model& model, const Dataset& data);

/// 1 iff score >= threshold. threshold must lie in [0, 1].
std::vector<std::uint8_t> predict_labels(const Model& model, const Dataset& data,
                                         double threshold = 0.5);

double sigmoid(double x) noexcept;

// Mean binomial deviance of log-odds `margins` against 0/1 labels.
double binomial_deviance(std::span<const double> margins, std::span<const std::uint8_t> labels);

}  // namespace boostlab

#include "boostlab/boost.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "boostlab/error.hpp"
#include "boostlab/random.hpp"

namespace boostlab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

// log(1 + e^x) without overflow.
double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

void require_both_classes(const Dataset& train) {
  const std::size_t pos = train.count_positive();
  if (pos == 0 || pos == train.rows())
    throw Error(ErrorCode::SingleClassDataset, "training data must contain both classes");
}

void require_schema(const FeatureSchema& expected, const Dataset& data) {
  if (!(data.schema() == expected))
    throw Error(ErrorCode::SchemaMismatch, "data schema differs from the model's training schema");
}

double base_log_odds(const Dataset& train) {
  const auto pos = static_cast<double>(train.count_positive());
  const auto neg = static_cast<double>(train.rows()) - pos;
  return std::log(pos / neg);
}

// Shared loop for GBM and XGB: gradients p − y, hessians 1 or p(1−p).
TreeEnsembleModel fit_tree_ensemble(const Dataset& train, const BoostParams& params,
                                    bool unit_hessians, DevianceTrace* trace) {
  params.validate();
  require_both_classes(train);
  const std::size_t n = train.rows();
  const auto view = FeatureView::of(train);
  const auto labels = train.labels();

  TreeEnsembleModel model;
  model.schema = train.schema();
  model.params = params;
  model.base_score = base_log_odds(train);
  model.learning_rate = params.learning_rate;

  const TreeParams tree_params{params.max_depth, params.min_child_weight, params.lambda,
                               params.gamma};
  std::vector<double> margin(n, model.base_score);
  std::vector<double> grads(n), hess(n);
  if (trace) trace->deviance = {binomial_deviance(margin, labels)};

  for (int round = 0; round < params.n_rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(margin[i]);
      grads[i] = p - labels[i];
      hess[i] = unit_hessians ? 1.0 : p * (1.0 - p);
    }
    auto tree = fit_regression_tree(view, grads, hess, tree_params);
    for (std::size_t i = 0; i < n; ++i)
      margin[i] += model.learning_rate * tree.predict(train.row(i));
    model.trees.push_back(std::move(tree));
    if (trace) trace->deviance.push_back(binomial_deviance(margin, labels));
  }
  return model;
}

}  // namespace

std::string_view algorithm_name(Algorithm algo) noexcept {
  switch (algo) {
    case Algorithm::AdaBoost: return "adaboost";
    case Algorithm::Gbm: return "gbm";
    case Algorithm::XgBoost: return "xgboost";
    case Algorithm::CatBoost: return "catboost";
  }
  return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) noexcept {
  for (auto a : kAllAlgorithms)
    if (algorithm_name(a) == name) return a;
  return std::nullopt;
}

void BoostParams::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); };
  if (n_rounds < 0) fail("n_rounds must be >= 0");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) fail("learning_rate must be > 0");
  if (max_depth < 1) fail("max_depth must be >= 1");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) fail("lambda must be finite and >= 0");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) fail("gamma must be finite and >= 0");
  if (!(min_child_weight >= 0.0) || !std::isfinite(min_child_weight))
    fail("min_child_weight must be finite and >= 0");
  if (cat_one_hot_max < 1) fail("cat_one_hot_max must be >= 1");
  if (!(cat_prior > 0.0 && cat_prior < 1.0)) fail("cat_prior must be in (0, 1)");
  if (!(threshold > 0.0 && threshold < 1.0)) fail("threshold must be in (0, 1)");
}

BoostParams default_params(Algorithm algo) {
  BoostParams p;
  switch (algo) {
    case Algorithm::AdaBoost: p.max_depth = 1; break;
    case Algorithm::Gbm:
    case Algorithm::XgBoost: p.max_depth = 3; break;
    case Algorithm::CatBoost: p.max_depth = 6; break;
  }
  return p;
}

BoostParams paper_preset_params(Algorithm algo) {
  BoostParams p = default_params(algo);
  if (algo == Algorithm::Gbm) p.learning_rate = 0.01;
  if (algo == Algorithm::CatBoost) p.max_depth = 16;
  return p;
}

double sigmoid(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double binomial_deviance(std::span<const double> margins, std::span<const std::uint8_t> labels) {
  if (margins.size() != labels.size() || margins.empty())
    throw Error(ErrorCode::LengthMismatch, "margins and labels differ in length");
  double total = 0.0;
  for (std::size_t i = 0; i < margins.size(); ++i)
    total += softplus(margins[i]) - labels[i] * margins[i];
  return total / static_cast<double>(margins.size());
}

double AdaBoostModel::margin(std::span<const double> row) const {
  double f = 0.0;
  for (const auto& ws : stumps) f += ws.alpha * ws.stump.predict(row);
  return f;
}

double TreeEnsembleModel::margin(std::span<const double> row) const {
  double f = 0.0;
  for (const auto& t : trees) f += t.predict(row);
  return base_score + learning_rate * f;
}

AdaBoostModel fit_adaboost(const Dataset& train, const BoostParams& params, AdaBoostTrace* trace) {
  params.validate();
  require_both_classes(train);
  const std::size_t n = train.rows();
  const auto view = FeatureView::of(train);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = train.labels()[i] ? 1 : -1;
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<double> margin(n, 0.0);
  std::vector<int> h(n);

  AdaBoostModel model;
  model.schema = train.schema();
  model.params = params;
  if (trace) trace->rounds.clear();

  for (int round = 0; round < params.n_rounds; ++round) {
    const auto fit = fit_stump(view, y, w);
    const double eps = fit.weighted_error;
    if (eps >= 0.5) break;  // no stump beats chance under these weights

    AdaBoostRound record;
    record.weighted_error = eps;
    if (eps <= 0.0) {
      // Perfect stump: cap α at the value for ε₀ = 1/(2n) and stop.
      const double eps0 = 0.5 / static_cast<double>(n);
      record.alpha = 0.5 * std::log((1.0 - eps0) / eps0);
      record.alpha_capped = true;
    } else {
      record.alpha = 0.5 * std::log((1.0 - eps) / eps);
    }

    for (std::size_t i = 0; i < n; ++i) h[i] = fit.stump.predict(train.row(i));
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] *= std::exp(-record.alpha * y[i] * h[i]);
      z += w[i];
      margin[i] += record.alpha * h[i];
    }
    double post_error = 0.0;
    double exp_loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] /= z;
      if (h[i] != y[i]) post_error += w[i];
      exp_loss += std::exp(-y[i] * margin[i]);
    }
    record.post_reweight_error = post_error;
    record.exp_loss = exp_loss / static_cast<double>(n);
    model.stumps.push_back({fit.stump, record.alpha});
    if (trace) trace->rounds.push_back(record);
    if (record.alpha_capped) break;
  }
  return model;
}

GbmModel fit_gbm(const Dataset& train, const BoostParams& params, DevianceTrace* trace) {
  return GbmModel{fit_tree_ensemble(train, params, true, trace)};
}

XgbModel fit_xgb(const Dataset& train, const BoostParams& params, DevianceTrace* trace,
                 const XgbOptions& options) {
  return XgbModel{fit_tree_ensemble(train, params, options.unit_hessians, trace)};
}

Model fit(Algorithm algo, const Dataset& train, const BoostParams& params) {
  switch (algo) {
    case Algorithm::AdaBoost: return fit_adaboost(train, params);
    case Algorithm::Gbm: return fit_gbm(train, params);
    case Algorithm::XgBoost: return fit_xgb(train, params);
    case Algorithm::CatBoost: return fit_catboost(train, params);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown algorithm");
}

Algorithm Model::algorithm() const noexcept {
  return std::visit(overloaded{[](const AdaBoostModel&) { return Algorithm::AdaBoost; },
                               [](const GbmModel&) { return Algorithm::Gbm; },
                               [](const XgbModel&) { return Algorithm::XgBoost; },
                               [](const CatBoostModel&) { return Algorithm::CatBoost; }},
                    impl_);
}

const FeatureSchema& Model::schema() const noexcept {
  return std::visit([](const auto& m) -> const FeatureSchema& { return m.schema; }, impl_);
}

const BoostParams& Model::params() const noexcept {
  return std::visit([](const auto& m) -> const BoostParams& { return m.params; }, impl_);
}

double Model::margin(std::span<const double> row) const {
  return std::visit([&](const auto& m) { return m.margin(row); }, impl_);
}

std::vector<double> predict_scores(const Model& model, const Dataset& data) {
  require_schema(model.schema(), data);
  const double scale = model.algorithm() == Algorithm::AdaBoost ? 2.0 : 1.0;
  std::vector<double> scores(data.rows());
  for (std::size_t i = 0; i < data.rows(); ++i) scores[i] = sigmoid(scale * model.margin(data.row(i)));
  return scores;
}

std::vector<std::uint8_t> predict_labels(const Model& model, const Dataset& data, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "threshold must be in [0, 1]");
  const auto scores = predict_scores(model, data);
  std::vector<std::uint8_t> labels(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) labels[i] = scores[i] >= threshold ? 1 : 0;
  return labels;
}

}  // namespace boostlab

#include <algorithm>
#include <cmath>
#include <numeric>

#include "boostlab/boost.hpp"
#include "boostlab/error.hpp"
#include "boostlab/random.hpp"

namespace boostlab {

std::vector<double> ordered_target_statistics(std::span<const double> levels,
                                              std::span<const std::uint8_t> labels,
                                              std::span<const std::size_t> order, double prior) {
  if (levels.size() != labels.size() || order.size() != levels.size())
    throw Error(ErrorCode::LengthMismatch, "levels, labels and order must have equal length");
  int hi = -1;
  for (double v : levels)
    if (!is_missing(v)) hi = std::max(hi, static_cast<int>(v));
  std::vector<double> positives(static_cast<std::size_t>(hi + 1), 0.0);
  std::vector<double> totals(static_cast<std::size_t>(hi + 1), 0.0);
  std::vector<double> encoded(levels.size(), kMissing);
  for (auto row : order) {
    const double v = levels[row];
    if (is_missing(v)) continue;
    const auto lv = static_cast<std::size_t>(v);
    encoded[row] = (positives[lv] + prior) / (totals[lv] + 1.0);
    positives[lv] += labels[row];
    totals[lv] += 1.0;
  }
  return encoded;
}

std::size_t CatEncodingState::encoded_width(const FeatureSchema& schema) const {
  std::size_t width = schema.size();
  for (const auto& f : features)
    if (f.mode == CatMode::OneHot) width += static_cast<std::size_t>(f.cardinality) - 1;
  return width;
}

void CatEncodingState::encode_row(const FeatureSchema& schema, std::span<const double> row,
                                  std::vector<double>& out) const {
  if (row.size() != schema.size())
    throw Error(ErrorCode::SchemaMismatch, "row width differs from the training schema");
  out.clear();
  auto next = features.begin();
  for (std::size_t j = 0; j < schema.size(); ++j) {
    const double v = row[j];
    if (next == features.end() || static_cast<std::size_t>(next->feature) != j) {
      out.push_back(v);
      continue;
    }
    const auto& f = *next++;
    if (f.mode == CatMode::OneHot) {
      for (int lv = 0; lv < f.cardinality; ++lv)
        out.push_back(is_missing(v) ? kMissing : (v == lv ? 1.0 : 0.0));
    } else if (is_missing(v)) {
      out.push_back(kMissing);
    } else {
      const auto lv = static_cast<std::size_t>(v);
      const double pos = lv < f.positives.size() ? f.positives[lv] : 0.0;
      const double tot = lv < f.totals.size() ? f.totals[lv] : 0.0;
      out.push_back((pos + prior) / (tot + 1.0));
    }
  }
}

CatTrainingEncoding encode_for_training(const Dataset& train, const BoostParams& params) {
  const auto& schema = train.schema();
  const std::size_t n = train.rows();
  CatTrainingEncoding enc;
  enc.state.prior = params.cat_prior;

  enc.permutation.resize(n);
  std::iota(enc.permutation.begin(), enc.permutation.end(), std::size_t{0});
  Rng rng(params.seed);
  rng.shuffle(std::span<std::size_t>(enc.permutation));

  // Ordered statistics per target-statistic column, keyed by schema column.
  std::vector<std::vector<double>> ordered(schema.size());
  for (std::size_t j = 0; j < schema.size(); ++j) {
    const auto& kind = schema[j].kind;
    if (!kind.is_categorical()) continue;
    CatFeatureEncoding f;
    f.feature = static_cast<int>(j);
    f.cardinality = kind.cardinality;
    if (kind.cardinality <= params.cat_one_hot_max) {
      f.mode = CatMode::OneHot;
    } else {
      f.mode = CatMode::TargetStatistic;
      f.positives.assign(kind.cardinality, 0.0);
      f.totals.assign(kind.cardinality, 0.0);
      std::vector<double> levels(n);
      for (std::size_t i = 0; i < n; ++i) {
        levels[i] = train.at(i, j);
        if (is_missing(levels[i])) continue;
        const auto lv = static_cast<std::size_t>(levels[i]);
        f.positives[lv] += train.labels()[i];
        f.totals[lv] += 1.0;
      }
      ordered[j] = ordered_target_statistics(levels, train.labels(), enc.permutation,
                                             params.cat_prior);
    }
    enc.state.features.push_back(std::move(f));
  }

  enc.width = enc.state.encoded_width(schema);
  enc.cells.reserve(n * enc.width);
  std::vector<double> row;
  for (std::size_t i = 0; i < n; ++i) {
    enc.state.encode_row(schema, train.row(i), row);
    // Replace prediction-time statistics with the leakage-free ordered ones.
    std::size_t out = 0;
    auto next = enc.state.features.begin();
    for (std::size_t j = 0; j < schema.size(); ++j) {
      if (next != enc.state.features.end() && static_cast<std::size_t>(next->feature) == j) {
        if (next->mode == CatMode::OneHot) {
          out += static_cast<std::size_t>(next->cardinality);
        } else {
          row[out++] = ordered[j][i];
        }
        ++next;
      } else {
        ++out;
      }
    }
    enc.cells.insert(enc.cells.end(), row.begin(), row.end());
  }
  return enc;
}

double CatBoostModel::margin(std::span<const double> row) const {
  std::vector<double> encoded;
  encoding.encode_row(schema, row, encoded);
  double f = 0.0;
  for (const auto& t : trees) f += t.predict(encoded);
  return base_score + learning_rate * f;
}

CatBoostModel fit_catboost(const Dataset& train, const BoostParams& params, DevianceTrace* trace) {
  params.validate();
  const std::size_t n = train.rows();
  const std::size_t pos = train.count_positive();
  if (pos == 0 || pos == n)
    throw Error(ErrorCode::SingleClassDataset, "training data must contain both classes");

  auto enc = encode_for_training(train, params);
  FeatureView view;
  view.cells = enc.cells;
  view.rows = n;
  view.cols = enc.width;
  view.categorical.assign(enc.width, false);

  CatBoostModel model;
  model.schema = train.schema();
  model.params = params;
  model.base_score = std::log(static_cast<double>(pos) / static_cast<double>(n - pos));
  model.learning_rate = params.learning_rate;
  model.encoding = enc.state;

  const auto labels = train.labels();
  const ObliviousParams tree_params{params.max_depth, params.lambda};
  std::vector<double> margin(n, model.base_score);
  std::vector<double> grads(n), hess(n);
  if (trace) trace->deviance = {binomial_deviance(margin, labels)};
  for (int round = 0; round < params.n_rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(margin[i]);
      grads[i] = p - labels[i];
      hess[i] = p * (1.0 - p);
    }
    auto tree = fit_oblivious_tree(view, grads, hess, tree_params);
    for (std::size_t i = 0; i < n; ++i) margin[i] += model.learning_rate * tree.predict(view.row(i));
    model.trees.push_back(std::move(tree));
    if (trace) trace->deviance.push_back(binomial_deviance(margin, labels));
  }
  return model;
}

}  // namespace boostlab

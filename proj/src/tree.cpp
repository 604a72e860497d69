#include "boostlab/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "boostlab/error.hpp"

namespace boostlab {

namespace {

// Threshold strictly above `lo` and at most `hi`, so lo routes left and hi right.
double midpoint(double lo, double hi) {
  const double mid = 0.5 * lo + 0.5 * hi;
  return mid > lo ? mid : hi;
}

// Score term G²/(H+λ); an empty, unregularized side contributes nothing.
double leaf_score(double g, double h, double lambda) {
  const double denom = h + lambda;
  return denom > 0.0 ? g * g / denom : 0.0;
}

// Relative gain floor: gain > tol * (1 + parent score / 2).
constexpr double kGainTolerance = 1e-12;

double leaf_weight(double g, double h, double lambda) {
  const double denom = h + lambda;
  return denom > 0.0 ? -g / denom : 0.0;
}

void check_feature(std::span<const double> row, int feature) {
  if (feature < 0 || static_cast<std::size_t>(feature) >= row.size())
    throw Error(ErrorCode::SchemaMismatch,
                "row has " + std::to_string(row.size()) + " features, split needs feature " +
                    std::to_string(feature));
}

void check_inputs(const FeatureView& x, std::span<const double> grads,
                  std::span<const double> hessians) {
  if (x.rows == 0) throw Error(ErrorCode::EmptyData, "cannot fit a tree on zero rows");
  if (grads.size() != x.rows || hessians.size() != x.rows)
    throw Error(ErrorCode::LengthMismatch, "gradient/hessian length does not match row count");
}

// Non-missing rows of each feature sorted by (value, row).
std::vector<std::vector<std::uint32_t>> presort(const FeatureView& x) {
  std::vector<std::vector<std::uint32_t>> order(x.cols);
  for (std::size_t j = 0; j < x.cols; ++j) {
    if (x.categorical[j]) continue;
    auto& o = order[j];
    o.reserve(x.rows);
    for (std::size_t i = 0; i < x.rows; ++i)
      if (!is_missing(x.at(i, j))) o.push_back(static_cast<std::uint32_t>(i));
    std::stable_sort(o.begin(), o.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return x.at(a, j) < x.at(b, j); });
  }
  return order;
}

int max_level(const FeatureView& x, std::size_t j) {
  int hi = -1;
  for (std::size_t i = 0; i < x.rows; ++i) {
    const double v = x.at(i, j);
    if (!is_missing(v)) hi = std::max(hi, static_cast<int>(v));
  }
  return hi;
}

}  // namespace

FeatureView FeatureView::of(const Dataset& data) {
  FeatureView v;
  v.cells = data.cells();
  v.rows = data.rows();
  v.cols = data.cols();
  v.categorical.resize(v.cols);
  for (std::size_t j = 0; j < v.cols; ++j) v.categorical[j] = data.schema()[j].kind.is_categorical();
  return v;
}

int Stump::predict(std::span<const double> row) const {
  if (is_constant()) return left_class;
  check_feature(row, test.feature);
  const double v = row[test.feature];
  if (is_missing(v)) return right_class;
  return test.goes_left(v) ? left_class : right_class;
}

StumpFit fit_stump(const FeatureView& x, std::span<const int> labels,
                   std::span<const double> weights) {
  const std::size_t n = x.rows;
  if (n == 0) throw Error(ErrorCode::EmptyData, "cannot fit a stump on zero rows");
  if (labels.size() != n || weights.size() != n)
    throw Error(ErrorCode::LengthMismatch, "label/weight length does not match row count");

  double w_pos = 0.0;
  double w_neg = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (weights[i] < 0.0 || !std::isfinite(weights[i]))
      throw Error(ErrorCode::InvalidArgument, "stump weights must be finite and nonnegative");
    (labels[i] > 0 ? w_pos : w_neg) += weights[i];
  }
  const double total = w_pos + w_neg;
  if (!(total > 0.0)) throw Error(ErrorCode::InvalidArgument, "stump weights sum to zero");

  auto constant = [&] {
    StumpFit fit;
    const int cls = w_pos >= w_neg ? 1 : -1;
    fit.stump.left_class = fit.stump.right_class = cls;
    fit.weighted_error = std::min(w_pos, w_neg) / total;
    return fit;
  };
  if (w_pos == 0.0 || w_neg == 0.0) return constant();

  StumpFit best;
  bool found = false;
  double best_error = std::numeric_limits<double>::infinity();

  // left_pos / left_neg: weight of each class routed left by the candidate.
  auto consider = [&](int feature, double threshold, bool categorical, double left_pos,
                      double left_neg) {
    // Orientation A: left=-1, right=+1 misclassifies left positives and right negatives.
    const double err_a = (left_pos + (w_neg - left_neg)) / total;
    const double err_b = (left_neg + (w_pos - left_pos)) / total;
    const bool use_a = err_a <= err_b;
    const double err = use_a ? err_a : err_b;
    if (!found || err < best_error - kStumpErrorTieTolerance) {
      found = true;
      best_error = err;
      best.stump.test = {feature, threshold, categorical};
      best.stump.left_class = use_a ? -1 : 1;
      best.stump.right_class = use_a ? 1 : -1;
    }
  };

  std::vector<std::uint32_t> order;
  for (std::size_t j = 0; j < x.cols; ++j) {
    const int feature = static_cast<int>(j);
    if (x.categorical[j]) {
      const int hi = max_level(x, j);
      if (hi < 0) continue;
      std::vector<double> pos(hi + 1, 0.0), neg(hi + 1, 0.0);
      std::vector<std::size_t> count(hi + 1, 0);
      for (std::size_t i = 0; i < n; ++i) {
        const double v = x.at(i, j);
        if (is_missing(v)) continue;
        const auto lv = static_cast<std::size_t>(v);
        (labels[i] > 0 ? pos[lv] : neg[lv]) += weights[i];
        ++count[lv];
      }
      for (int lv = 0; lv <= hi; ++lv)
        if (count[lv] > 0 && count[lv] < n) consider(feature, lv, true, pos[lv], neg[lv]);
      continue;
    }
    order.clear();
    for (std::size_t i = 0; i < n; ++i)
      if (!is_missing(x.at(i, j))) order.push_back(static_cast<std::uint32_t>(i));
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return x.at(a, j) < x.at(b, j); });
    double left_pos = 0.0;
    double left_neg = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) {
      const auto i = order[k];
      (labels[i] > 0 ? left_pos : left_neg) += weights[i];
      if (k + 1 < order.size()) {
        const double v = x.at(i, j);
        const double next = x.at(order[k + 1], j);
        if (next > v) consider(feature, midpoint(v, next), false, left_pos, left_neg);
      }
    }
  }
  if (!found) return constant();
  best.weighted_error = best_error;
  return best;
}

RegressionTree::RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw Error(ErrorCode::InvalidModel, "tree has no nodes");
  // Validate links and compute depth with an explicit stack.
  std::vector<std::pair<int, int>> stack{{0, 0}};
  std::size_t visited = 0;
  while (!stack.empty()) {
    auto [id, d] = stack.back();
    stack.pop_back();
    if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size() || ++visited > nodes_.size())
      throw Error(ErrorCode::InvalidModel, "tree node links are inconsistent");
    depth_ = std::max(depth_, d);
    const auto& node = nodes_[id];
    if (!node.is_leaf()) {
      stack.emplace_back(node.left, d + 1);
      stack.emplace_back(node.right, d + 1);
    }
  }
}

std::size_t RegressionTree::leaf_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

int RegressionTree::leaf_of(std::span<const double> row) const {
  int id = 0;
  while (!nodes_[id].is_leaf()) {
    const auto& node = nodes_[id];
    check_feature(row, node.feature);
    const double v = row[node.feature];
    bool left;
    if (is_missing(v)) {
      left = node.default_left;
    } else {
      left = node.categorical ? v == node.threshold : v < node.threshold;
    }
    id = left ? node.left : node.right;
  }
  return id;
}

RegressionTree fit_regression_tree(const FeatureView& x, std::span<const double> grads,
                                   std::span<const double> hessians, const TreeParams& params) {
  check_inputs(x, grads, hessians);
  if (params.max_depth < 0 || params.lambda < 0.0 || params.gamma < 0.0 ||
      params.min_child_weight < 0.0)
    throw Error(ErrorCode::InvalidArgument, "tree parameters must be nonnegative");

  const std::size_t n = x.rows;
  const double lambda = params.lambda;
  const auto order = presort(x);
  std::vector<std::vector<std::uint32_t>> missing_rows(x.cols);
  for (std::size_t j = 0; j < x.cols; ++j)
    for (std::size_t i = 0; i < n; ++i)
      if (is_missing(x.at(i, j))) missing_rows[j].push_back(static_cast<std::uint32_t>(i));

  std::vector<TreeNode> nodes(1);
  std::vector<int> open{0};          // node ids on the current level
  std::vector<int> slot_of(n, 0);    // row -> index into `open`, -1 once settled

  struct Candidate {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
    bool categorical = false;
    bool default_left = true;
  };

  for (int depth = 0; !open.empty(); ++depth) {
    const std::size_t slots = open.size();
    std::vector<double> g_tot(slots, 0.0), h_tot(slots, 0.0);
    std::vector<std::size_t> n_tot(slots, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const int k = slot_of[i];
      if (k < 0) continue;
      g_tot[k] += grads[i];
      h_tot[k] += hessians[i];
      ++n_tot[k];
    }
    for (std::size_t k = 0; k < slots; ++k) {
      auto& node = nodes[open[k]];
      node.grad_sum = g_tot[k];
      node.hess_sum = h_tot[k];
      node.value = leaf_weight(g_tot[k], h_tot[k], lambda);
    }
    if (depth >= params.max_depth) break;

    std::vector<Candidate> best(slots);
    for (std::size_t k = 0; k < slots; ++k)
      best[k].gain = kGainTolerance * (1.0 + 0.5 * leaf_score(g_tot[k], h_tot[k], lambda));
    std::vector<double> g_miss(slots), h_miss(slots);
    std::vector<std::size_t> n_miss(slots);

    auto evaluate = [&](std::size_t k, int feature, double threshold, bool categorical,
                        double g_left, double h_left, std::size_t n_left) {
      for (const bool dl : {true, false}) {
        const double gl = g_left + (dl ? g_miss[k] : 0.0);
        const double hl = h_left + (dl ? h_miss[k] : 0.0);
        const std::size_t nl = n_left + (dl ? n_miss[k] : 0);
        if (nl == 0 || nl == n_tot[k]) continue;
        const double gr = g_tot[k] - gl;
        const double hr = h_tot[k] - hl;
        if (hl < params.min_child_weight || hr < params.min_child_weight) continue;
        const double gain = 0.5 * (leaf_score(gl, hl, lambda) + leaf_score(gr, hr, lambda) -
                                   leaf_score(g_tot[k], h_tot[k], lambda)) -
                            params.gamma;
        if (gain > best[k].gain) best[k] = {gain, feature, threshold, categorical, dl};
      }
    };

    for (std::size_t j = 0; j < x.cols; ++j) {
      const int feature = static_cast<int>(j);
      std::fill(g_miss.begin(), g_miss.end(), 0.0);
      std::fill(h_miss.begin(), h_miss.end(), 0.0);
      std::fill(n_miss.begin(), n_miss.end(), 0);
      for (auto i : missing_rows[j]) {
        const int k = slot_of[i];
        if (k < 0) continue;
        g_miss[k] += grads[i];
        h_miss[k] += hessians[i];
        ++n_miss[k];
      }

      if (x.categorical[j]) {
        const int hi = max_level(x, j);
        if (hi < 0) continue;
        const std::size_t levels = static_cast<std::size_t>(hi) + 1;
        std::vector<double> g_lv(slots * levels, 0.0), h_lv(slots * levels, 0.0);
        std::vector<std::size_t> n_lv(slots * levels, 0);
        for (std::size_t i = 0; i < n; ++i) {
          const int k = slot_of[i];
          const double v = x.at(i, j);
          if (k < 0 || is_missing(v)) continue;
          const std::size_t c = static_cast<std::size_t>(k) * levels + static_cast<std::size_t>(v);
          g_lv[c] += grads[i];
          h_lv[c] += hessians[i];
          ++n_lv[c];
        }
        for (std::size_t k = 0; k < slots; ++k)
          for (std::size_t lv = 0; lv < levels; ++lv) {
            const std::size_t c = k * levels + lv;
            if (n_lv[c] == 0) continue;
            evaluate(k, feature, static_cast<double>(lv), true, g_lv[c], h_lv[c], n_lv[c]);
          }
        continue;
      }

      std::vector<double> g_left(slots, 0.0), h_left(slots, 0.0);
      std::vector<std::size_t> n_left(slots, 0);
      std::vector<double> last(slots, 0.0);
      for (auto i : order[j]) {
        const int k = slot_of[i];
        if (k < 0) continue;
        const double v = x.at(i, j);
        if (n_left[k] > 0 && v > last[k])
          evaluate(k, feature, midpoint(last[k], v), false, g_left[k], h_left[k], n_left[k]);
        g_left[k] += grads[i];
        h_left[k] += hessians[i];
        ++n_left[k];
        last[k] = v;
      }
    }

    std::vector<int> next_open;
    std::vector<int> child_slot(slots * 2, -1);
    for (std::size_t k = 0; k < slots; ++k) {
      if (best[k].feature < 0) continue;
      const int id = open[k];
      const int left = static_cast<int>(nodes.size());
      nodes.emplace_back();
      nodes.emplace_back();
      auto& node = nodes[id];
      node.feature = best[k].feature;
      node.threshold = best[k].threshold;
      node.categorical = best[k].categorical;
      node.default_left = best[k].default_left;
      node.left = left;
      node.right = left + 1;
      child_slot[2 * k] = static_cast<int>(next_open.size());
      next_open.push_back(left);
      child_slot[2 * k + 1] = static_cast<int>(next_open.size());
      next_open.push_back(left + 1);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const int k = slot_of[i];
      if (k < 0) continue;
      const auto& node = nodes[open[k]];
      if (node.is_leaf()) {
        slot_of[i] = -1;
        continue;
      }
      const double v = x.at(i, node.feature);
      const bool left = is_missing(v) ? node.default_left
                                      : (node.categorical ? v == node.threshold : v < node.threshold);
      slot_of[i] = child_slot[2 * k + (left ? 0 : 1)];
    }
    open = std::move(next_open);
  }
  return RegressionTree(std::move(nodes));
}

ObliviousTree::ObliviousTree(std::vector<SplitTest> levels, std::vector<double> leaf_values)
    : levels_(std::move(levels)), leaf_values_(std::move(leaf_values)) {
  if (levels_.size() >= 8 * sizeof(std::size_t) ||
      leaf_values_.size() != (std::size_t{1} << levels_.size()))
    throw Error(ErrorCode::InvalidModel, "oblivious tree needs 2^depth leaf values");
}

std::size_t ObliviousTree::leaf_index(std::span<const double> row) const {
  std::size_t index = 0;
  for (const auto& t : levels_) {
    check_feature(row, t.feature);
    const double v = row[t.feature];
    const bool right = !is_missing(v) && !t.goes_left(v);
    index = (index << 1) | (right ? 1u : 0u);
  }
  return index;
}

ObliviousTree fit_oblivious_tree(const FeatureView& x, std::span<const double> grads,
                                 std::span<const double> hessians, const ObliviousParams& params) {
  check_inputs(x, grads, hessians);
  if (params.depth < 0 || params.depth > 24 || params.lambda < 0.0)
    throw Error(ErrorCode::InvalidArgument, "oblivious depth must be in [0, 24], lambda >= 0");

  const std::size_t n = x.rows;
  const double lambda = params.lambda;
  const auto order = presort(x);
  std::vector<std::size_t> leaf_of(n, 0);
  std::vector<SplitTest> levels;

  auto contribution = [lambda](double gl, double hl, double g, double h) {
    return leaf_score(gl, hl, lambda) + leaf_score(g - gl, h - hl, lambda) -
           leaf_score(g, h, lambda);
  };

  for (int level = 0; level < params.depth; ++level) {
    const std::size_t leaves = std::size_t{1} << level;
    std::vector<double> g_tot(leaves, 0.0), h_tot(leaves, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      g_tot[leaf_of[i]] += grads[i];
      h_tot[leaf_of[i]] += hessians[i];
    }

    double parent_score = 0.0;
    for (std::size_t k = 0; k < leaves; ++k) parent_score += leaf_score(g_tot[k], h_tot[k], lambda);
    const double gain_floor = kGainTolerance * (1.0 + 0.5 * parent_score);
    double best_gain = gain_floor;
    SplitTest best_test;
    bool found = false;
    std::vector<double> g_left(leaves), h_left(leaves);

    for (std::size_t j = 0; j < x.cols; ++j) {
      const int feature = static_cast<int>(j);
      // Missing goes left, so every leaf's left side starts with its missing rows.
      std::fill(g_left.begin(), g_left.end(), 0.0);
      std::fill(h_left.begin(), h_left.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i)
        if (is_missing(x.at(i, j))) {
          g_left[leaf_of[i]] += grads[i];
          h_left[leaf_of[i]] += hessians[i];
        }

      if (x.categorical[j]) {
        const int hi = max_level(x, j);
        for (int lv = 0; lv <= hi; ++lv) {
          std::vector<double> gl = g_left, hl = h_left;
          bool present = false;
          for (std::size_t i = 0; i < n; ++i)
            if (x.at(i, j) == lv) {
              gl[leaf_of[i]] += grads[i];
              hl[leaf_of[i]] += hessians[i];
              present = true;
            }
          if (!present) continue;
          double total = 0.0;
          for (std::size_t k = 0; k < leaves; ++k) total += contribution(gl[k], hl[k], g_tot[k], h_tot[k]);
          const double gain = 0.5 * total;
          if (gain > best_gain) {
            best_gain = gain;
            best_test = {feature, static_cast<double>(lv), true};
            found = true;
          }
        }
        continue;
      }

      double total = 0.0;
      for (std::size_t k = 0; k < leaves; ++k)
        total += contribution(g_left[k], h_left[k], g_tot[k], h_tot[k]);
      const auto& ord = order[j];
      for (std::size_t p = 0; p < ord.size(); ++p) {
        const auto i = ord[p];
        const double v = x.at(i, j);
        if (p > 0) {
          const double prev = x.at(ord[p - 1], j);
          if (v > prev) {
            const double gain = 0.5 * total;
            if (gain > best_gain) {
              best_gain = gain;
              best_test = {feature, midpoint(prev, v), false};
              found = true;
            }
          }
        }
        const std::size_t k = leaf_of[i];
        total -= contribution(g_left[k], h_left[k], g_tot[k], h_tot[k]);
        g_left[k] += grads[i];
        h_left[k] += hessians[i];
        total += contribution(g_left[k], h_left[k], g_tot[k], h_tot[k]);
      }
    }

    if (!found) break;
    // The sweep updates its running total incrementally; confirm the winner
    // from fresh sums before committing the level.
    std::fill(g_left.begin(), g_left.end(), 0.0);
    std::fill(h_left.begin(), h_left.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = x.at(i, best_test.feature);
      if (is_missing(v) || best_test.goes_left(v)) {
        g_left[leaf_of[i]] += grads[i];
        h_left[leaf_of[i]] += hessians[i];
      }
    }
    double exact = 0.0;
    for (std::size_t k = 0; k < leaves; ++k)
      exact += contribution(g_left[k], h_left[k], g_tot[k], h_tot[k]);
    if (!(0.5 * exact > gain_floor)) break;
    levels.push_back(best_test);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = x.at(i, best_test.feature);
      const bool right = !is_missing(v) && !best_test.goes_left(v);
      leaf_of[i] = (leaf_of[i] << 1) | (right ? 1u : 0u);
    }
  }

  const std::size_t leaves = std::size_t{1} << levels.size();
  std::vector<double> g_tot(leaves, 0.0), h_tot(leaves, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    g_tot[leaf_of[i]] += grads[i];
    h_tot[leaf_of[i]] += hessians[i];
  }
  std::vector<double> values(leaves);
  for (std::size_t k = 0; k < leaves; ++k) values[k] = leaf_weight(g_tot[k], h_tot[k], lambda);
  return ObliviousTree(std::move(levels), std::move(values));
}

}  // namespace boostlab

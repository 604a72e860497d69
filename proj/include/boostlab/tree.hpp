#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "boostlab/dataset.hpp"

namespace boostlab {

/// Row-major numeric view the weak learners fit on. `categorical[j]` marks
/// columns whose values are level indices split one-vs-rest.
struct FeatureView {
  std::span<const double> cells;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<bool> categorical;

  static FeatureView of(const Dataset& data);

  double at(std::size_t i, std::size_t j) const { return cells[i * cols + j]; }
  std::span<const double> row(std::size_t i) const { return cells.subspan(i * cols, cols); }
};

// A single comparison. Numeric: left iff value < threshold. Categorical:
// left iff value == threshold (one level vs the rest). Missing values are
// routed by whoever owns the test.
struct SplitTest {
  int feature = 0;
  double threshold = 0.0;
  bool categorical = false;

  bool goes_left(double value) const {
    return categorical ? value == threshold : value < threshold;
  }

  friend bool operator==(const SplitTest&, const SplitTest&) = default;
};

/// Depth-1 classifier with ±1 outputs. Missing goes right. A stump whose
/// two classes agree is the constant predictor.
struct Stump {
  SplitTest test;
  int left_class = -1;
  int right_class = 1;

  bool is_constant() const noexcept { return left_class == right_class; }
  int predict(std::span<const double> row) const;

  friend bool operator==(const Stump&, const Stump&) = default;
};

struct StumpFit {
  Stump stump;
  double weighted_error = 0.0;
};

// Weighted errors closer than this are treated as tied and resolved by
// candidate order.
inline constexpr double kStumpErrorTieTolerance = 1e-12;

/// Exhaustive weighted 0/1-error stump search.
///
/// Candidates are enumerated feature by feature; numeric thresholds are
/// midpoints between consecutive distinct values in ascending order and
/// categorical candidates are single levels in ascending order. For each
/// candidate the orientation with error <= 0.5 is kept (left=-1 on a tie).
/// The first candidate reaching the minimum error wins. When either class
/// carries no weight, or no feature admits a split, the weighted-majority
/// constant stump is returned. `labels` are ±1.
StumpFit fit_stump(const FeatureView& x, std::span<const int> labels,
                   std::span<const double> weights);

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  bool categorical = false;
  bool default_left = true;
  int left = -1;
  int right = -1;
  double value = 0.0;
  double grad_sum = 0.0;
  double hess_sum = 0.0;

  bool is_leaf() const noexcept { return feature < 0; }

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct TreeParams {
  int max_depth = 3;
  double min_child_weight = 1.0;
  double lambda = 1.0;
  double gamma = 0.0;
};

/// Binary regression tree with per-node default directions for Missing.
/// nodes[0] is the root.
class RegressionTree {
 public:
  RegressionTree() : nodes_(1) {}
  explicit RegressionTree(std::vector<TreeNode> nodes);

  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  int depth() const noexcept { return depth_; }
  std::size_t leaf_count() const noexcept;

  // Index into nodes() of the leaf the row lands in.
  int leaf_of(std::span<const double> row) const;
  double predict(std::span<const double> row) const { return nodes_[leaf_of(row)].value; }

  friend bool operator==(const RegressionTree&, const RegressionTree&) = default;

 private:
  std::vector<TreeNode> nodes_;
  int depth_ = 0;
};

/// Exact greedy second-order growth.
///
/// A split is accepted when its gain
///   ½·[G_L²/(H_L+λ) + G_R²/(H_R+λ) − G²/(H+λ)] − γ
/// is positive and both children have hess_sum >= min_child_weight. Rows
/// missing the split feature go to whichever side yields the larger gain.
/// Leaves hold −G/(H+λ), or 0 when H+λ is 0.
RegressionTree fit_regression_tree(const FeatureView& x, std::span<const double> grads,
                                   std::span<const double> hessians, const TreeParams& params);

struct ObliviousParams {
  int depth = 6;
  double lambda = 1.0;
};

/// Symmetric tree: every node on level l applies levels()[l]. The leaf index
/// is the bit string of the level outcomes with level 0 as the most
/// significant bit (1 = right). Missing always goes left.
class ObliviousTree {
 public:
  ObliviousTree() : leaf_values_(1, 0.0) {}
  ObliviousTree(std::vector<SplitTest> levels, std::vector<double> leaf_values);

  const std::vector<SplitTest>& levels() const noexcept { return levels_; }
  const std::vector<double>& leaf_values() const noexcept { return leaf_values_; }
  int depth() const noexcept { return static_cast<int>(levels_.size()); }

  std::size_t leaf_index(std::span<const double> row) const;
  double predict(std::span<const double> row) const { return leaf_values_[leaf_index(row)]; }

  friend bool operator==(const ObliviousTree&, const ObliviousTree&) = default;

 private:
  std::vector<SplitTest> levels_;
  std::vector<double> leaf_values_;
};

/// Level-wise growth choosing, per level, the single test that maximizes the
/// gain summed over all current leaves. Growth stops at the first level with
/// no positive-gain test, leaving a shallower tree.
ObliviousTree fit_oblivious_tree(const FeatureView& x, std::span<const double> grads,
                                 std::span<const double> hessians, const ObliviousParams& params);

}  // namespace boostlab

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "boostlab/error.hpp"
#include "boostlab/random.hpp"
#include "boostlab/tree.hpp"
#include "oracles.hpp"

using namespace boostlab;

namespace {

FeatureView view(const std::vector<double>& cells, std::size_t cols,
                 std::vector<bool> categorical = {}) {
  FeatureView v;
  v.cells = cells;
  v.cols = cols;
  v.rows = cells.size() / cols;
  v.categorical = categorical.empty() ? std::vector<bool>(cols, false) : std::move(categorical);
  return v;
}

std::vector<double> ones(std::size_t n) { return std::vector<double>(n, 1.0); }

// Random dataset with a mix of numeric and categorical columns and a few missing cells.
struct RandomData {
  std::vector<double> cells;
  std::size_t cols = 0;
  std::vector<bool> categorical;
  std::vector<int> y;
  std::vector<double> w;
};

RandomData random_stump_data(Rng& rng, std::size_t n, std::size_t d) {
  RandomData r;
  r.cols = d;
  for (std::size_t j = 0; j < d; ++j) r.categorical.push_back(rng.bernoulli(0.3));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      double v = r.categorical[j] ? static_cast<double>(rng.below(4))
                                  : static_cast<double>(rng.below(8)) * 0.5;
      if (rng.bernoulli(0.05)) v = kMissing;
      r.cells.push_back(v);
    }
  for (std::size_t i = 0; i < n; ++i) {
    r.y.push_back(rng.bernoulli(0.5) ? 1 : -1);
    r.w.push_back(0.1 + rng.uniform());
  }
  return r;
}

}  // namespace

TEST(Stump, SeparableData) {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<int> y{-1, -1, 1, 1};
  const auto fit = fit_stump(view(x, 1), y, ones(4));
  EXPECT_EQ(fit.weighted_error, 0.0);
  EXPECT_GT(fit.stump.test.threshold, 2.0);
  EXPECT_LT(fit.stump.test.threshold, 3.0);
  EXPECT_EQ(fit.stump.left_class, -1);
  EXPECT_EQ(fit.stump.right_class, 1);
}

TEST(Stump, BestThresholdErrorQuarter) {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<int> y{1, -1, -1, 1};
  const auto fit = fit_stump(view(x, 1), y, ones(4));
  EXPECT_DOUBLE_EQ(fit.weighted_error, 0.25);
  std::vector<double> w(4, 0.25);
  EXPECT_DOUBLE_EQ(oracle::best_stump_error(x, 1, {false}, y, w), 0.25);
}

TEST(Stump, ConcentratedWeight) {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<int> y{1, -1, 1, -1};
  const std::vector<double> w{0, 0, 1, 0};
  const auto fit = fit_stump(view(x, 1), y, w);
  EXPECT_EQ(fit.weighted_error, 0.0);
  EXPECT_EQ(fit.stump.predict(std::vector<double>{3.0}), 1);
}

TEST(Stump, MissingGoesRight) {
  Stump s;
  s.test = {0, 2.5, false};
  s.left_class = -1;
  s.right_class = 1;
  EXPECT_EQ(s.predict(std::vector<double>{kMissing}), 1);
  EXPECT_EQ(s.predict(std::vector<double>{1.0}), -1);
}

TEST(Stump, RejectsBadInput) {
  const std::vector<double> x{1, 2};
  const std::vector<int> y{1, -1};
  EXPECT_THROW(fit_stump(view(x, 1), y, std::vector<double>{1.0}), Error);
  EXPECT_THROW(fit_stump(view(x, 1), y, std::vector<double>{-1.0, 1.0}), Error);
}

TEST(Stump, MatchesExhaustiveSearch) {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(49);
    const std::size_t d = 1 + rng.below(5);
    const auto r = random_stump_data(rng, n, d);
    const auto fit = fit_stump(view(r.cells, d, r.categorical), r.y, r.w);
    if (std::all_of(r.y.begin(), r.y.end(), [&](int v) { return v == r.y[0]; })) {
      EXPECT_TRUE(fit.stump.is_constant());
      EXPECT_EQ(fit.weighted_error, 0.0);
      continue;
    }
    const double best = oracle::best_stump_error(r.cells, d, r.categorical, r.y, r.w);
    if (!std::isfinite(best)) {
      EXPECT_TRUE(fit.stump.is_constant());
      continue;
    }
    EXPECT_NEAR(fit.weighted_error, best, 1e-12) << "trial " << trial;
    const double direct =
        oracle::stump_error(r.cells, d, fit.stump.test.feature, fit.stump.test.threshold,
                            fit.stump.test.categorical, fit.stump.left_class,
                            fit.stump.right_class, r.y, r.w);
    EXPECT_NEAR(direct, best, 1e-12) << "trial " << trial;
  }
}

TEST(RegressionTree, HandWorkedLeaves) {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> g{-1, -1, 1, 1};
  TreeParams p;
  p.max_depth = 1;
  const auto tree = fit_regression_tree(view(x, 1), g, ones(4), p);
  const auto& root = tree.nodes()[0];
  ASSERT_FALSE(root.is_leaf());
  EXPECT_GT(root.threshold, 2.0);
  EXPECT_LT(root.threshold, 3.0);
  const auto& left = tree.nodes()[root.left];
  const auto& right = tree.nodes()[root.right];
  EXPECT_DOUBLE_EQ(left.grad_sum, -2.0);
  EXPECT_DOUBLE_EQ(left.value, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(right.value, -2.0 / 3.0);
  EXPECT_EQ(tree.depth(), 1);
}

TEST(RegressionTree, ZeroHessiansAndGradients) {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> zero(4, 0.0);
  TreeParams p;
  p.lambda = 1.0;
  const auto tree = fit_regression_tree(view(x, 1), zero, zero, p);
  ASSERT_EQ(tree.nodes().size(), 1u);
  EXPECT_EQ(tree.nodes()[0].value, 0.0);
}

TEST(RegressionTree, GammaPrunesRoot) {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> g{-1, -1, 1, 1};
  TreeParams p;
  p.max_depth = 1;
  // Root gain here is ½(4/3 + 4/3 − 0) = 4/3.
  p.gamma = 1.4;
  EXPECT_EQ(fit_regression_tree(view(x, 1), g, ones(4), p).nodes().size(), 1u);
  p.gamma = 1.3;
  EXPECT_EQ(fit_regression_tree(view(x, 1), g, ones(4), p).nodes().size(), 3u);
}

TEST(RegressionTree, LearnsDefaultDirection) {
  const std::vector<double> x{1, 2, 3, 4, kMissing, kMissing};
  TreeParams p;
  p.max_depth = 1;
  p.min_child_weight = 0;
  {
    const std::vector<double> g{-1, -1, 1, 1, 1, 1};
    const auto tree = fit_regression_tree(view(x, 1), g, ones(6), p);
    EXPECT_FALSE(tree.nodes()[0].default_left);
    EXPECT_EQ(tree.leaf_of(std::vector<double>{kMissing}), tree.nodes()[0].right);
  }
  {
    const std::vector<double> g{-1, -1, 1, 1, -1, -1};
    const auto tree = fit_regression_tree(view(x, 1), g, ones(6), p);
    EXPECT_TRUE(tree.nodes()[0].default_left);
  }
}

TEST(RegressionTree, MissingFollowsDefaultRight) {
  std::vector<TreeNode> nodes(3);
  nodes[0].feature = 0;
  nodes[0].threshold = 2.5;
  nodes[0].default_left = false;
  nodes[0].left = 1;
  nodes[0].right = 2;
  nodes[1].value = -1.0;
  nodes[2].value = 5.0;
  const RegressionTree tree(nodes);
  EXPECT_EQ(tree.predict(std::vector<double>{kMissing}), 5.0);
  EXPECT_EQ(tree.predict(std::vector<double>{1.0}), -1.0);
  EXPECT_THROW(tree.predict(std::vector<double>{}), Error);
}

TEST(RegressionTree, UnseenCategoryRoutesRight) {
  const std::vector<double> x{0, 0, 1, 1, 1, 0};
  const std::vector<double> g{-1, -1, 1, 1, 1, -1};
  TreeParams p;
  p.max_depth = 1;
  const auto tree = fit_regression_tree(view(x, 1, {true}), g, ones(6), p);
  const auto& root = tree.nodes()[0];
  ASSERT_TRUE(root.categorical);
  EXPECT_EQ(tree.leaf_of(std::vector<double>{3.0}), root.right);
}

TEST(RegressionTree, RejectsBadLinks) {
  std::vector<TreeNode> nodes(1);
  nodes[0].feature = 0;
  nodes[0].left = 1;
  nodes[0].right = 2;
  EXPECT_THROW(RegressionTree{nodes}, Error);
}

TEST(RegressionTree, LeafIdentityAndRouting) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 5 + rng.below(80);
    const std::size_t d = 1 + rng.below(4);
    const auto r = random_stump_data(rng, n, d);
    std::vector<double> g(n), h(n);
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = rng.normal();
      h[i] = rng.uniform();
    }
    TreeParams p;
    p.max_depth = 1 + static_cast<int>(rng.below(4));
    p.lambda = rng.uniform() * 2;
    p.min_child_weight = rng.uniform();
    const auto x = view(r.cells, d, r.categorical);
    const auto tree = fit_regression_tree(x, g, h, p);
    std::vector<double> gs(tree.nodes().size(), 0.0), hs(tree.nodes().size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const int leaf = tree.leaf_of(x.row(i));
      gs[leaf] += g[i];
      hs[leaf] += h[i];
    }
    for (std::size_t k = 0; k < tree.nodes().size(); ++k) {
      const auto& node = tree.nodes()[k];
      if (!node.is_leaf()) continue;
      const double resid = node.value * (node.hess_sum + p.lambda) + node.grad_sum;
      EXPECT_LE(std::abs(resid), 1e-12 * std::max(1.0, std::abs(node.grad_sum)));
      EXPECT_NEAR(node.grad_sum, gs[k], 1e-9);
      EXPECT_NEAR(node.hess_sum, hs[k], 1e-9);
    }
  }
}

TEST(RegressionTree, RootSplitMatchesStump) {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 10 + rng.below(30);
    const std::size_t d = 1 + rng.below(3);
    const std::size_t signal = rng.below(d);
    std::vector<double> cells(n * d);
    std::vector<int> y(n);
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = i % 2 ? 1 : -1;
      g[i] = -y[i];
      for (std::size_t j = 0; j < d; ++j) cells[i * d + j] = rng.uniform();
      cells[i * d + signal] = (y[i] > 0 ? 2.0 : 0.0) + rng.uniform();
    }
    const auto x = view(cells, d);
    TreeParams p;
    p.max_depth = 1;
    p.lambda = 0;
    p.gamma = 0;
    p.min_child_weight = 0;
    const auto tree = fit_regression_tree(x, g, ones(n), p);
    const auto stump = fit_stump(x, y, ones(n)).stump;
    ASSERT_FALSE(tree.nodes()[0].is_leaf());
    EXPECT_EQ(tree.nodes()[0].feature, stump.test.feature);
    EXPECT_EQ(tree.nodes()[0].threshold, stump.test.threshold);
  }
}

TEST(Oblivious, DepthOneMatchesRegressionTree) {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> g{-1, -1, 1, 1};
  TreeParams tp;
  tp.max_depth = 1;
  tp.min_child_weight = 0;
  const auto tree = fit_regression_tree(view(x, 1), g, ones(4), tp);
  ObliviousParams op;
  op.depth = 1;
  const auto obl = fit_oblivious_tree(view(x, 1), g, ones(4), op);
  ASSERT_EQ(obl.depth(), 1);
  const auto& root = tree.nodes()[0];
  EXPECT_EQ(obl.levels()[0].feature, root.feature);
  EXPECT_EQ(obl.levels()[0].threshold, root.threshold);
  EXPECT_DOUBLE_EQ(obl.leaf_values()[0], tree.nodes()[root.left].value);
  EXPECT_DOUBLE_EQ(obl.leaf_values()[1], tree.nodes()[root.right].value);
}

TEST(Oblivious, XorDepthTwo) {
  // Three copies of (0,0) make feature 0 and feature 1 tie at level 0; the
  // lower index wins, and feature 1 then splits every leaf.
  const std::vector<double> cells{0, 0, 0, 0, 0, 0, 1, 1, 0, 1, 1, 0};
  const std::vector<double> g{0.5, 0.5, 0.5, 0.5, -0.5, -0.5};
  ObliviousParams p;
  p.depth = 2;
  p.lambda = 1;
  const auto tree = fit_oblivious_tree(view(cells, 2), g, ones(6), p);
  ASSERT_EQ(tree.depth(), 2);
  EXPECT_EQ(tree.levels()[0].feature, 0);
  EXPECT_EQ(tree.levels()[1].feature, 1);

  // Per-cell sums, leaf index = x0·2 + x1.
  double gs[4] = {0, 0, 0, 0}, hs[4] = {0, 0, 0, 0};
  for (std::size_t i = 0; i < 6; ++i) {
    const int k = static_cast<int>(cells[2 * i]) * 2 + static_cast<int>(cells[2 * i + 1]);
    gs[k] += g[i];
    hs[k] += 1.0;
  }
  for (int k = 0; k < 4; ++k)
    EXPECT_DOUBLE_EQ(tree.leaf_values()[k], -gs[k] / (hs[k] + 1.0)) << "leaf " << k;
  EXPECT_LT(tree.leaf_values()[0], 0);
  EXPECT_GT(tree.leaf_values()[1], 0);
  EXPECT_GT(tree.leaf_values()[2], 0);
  EXPECT_LT(tree.leaf_values()[3], 0);

  // Level 0 gain is 1/5 − 1/7 for either feature; level 1 must still gain.
  auto score = [](double G, double H) { return G * G / (H + 1); };
  EXPECT_GT(score(1.0, 4) + score(0.0, 2) - score(1.0, 6), 0.0);
  const double level1 = score(1.5, 3) + score(-0.5, 1) - score(1.0, 4) + score(-0.5, 1) +
                        score(0.5, 1) - score(0.0, 2);
  EXPECT_GT(level1, 0.0);
}

TEST(Oblivious, ConstantGradientsGiveNoSplit) {
  const std::vector<double> x{1, 2, 3, 4, 5, 6};
  const std::vector<double> g(6, 0.7);
  ObliviousParams p;
  p.depth = 3;
  const auto tree = fit_oblivious_tree(view(x, 1), g, ones(6), p);
  EXPECT_EQ(tree.depth(), 0);
  std::vector<double> centered(6, 0.0);
  const auto flat = fit_oblivious_tree(view(x, 1), centered, ones(6), p);
  ASSERT_EQ(flat.leaf_values().size(), 1u);
  EXPECT_EQ(flat.leaf_values()[0], 0.0);
}

TEST(Oblivious, LeafIndexBits) {
  const ObliviousTree tree({{0, 0.5, false}, {1, 0.5, false}, {2, 1.0, true}},
                           {0, 1, 2, 3, 4, 5, 6, 7});
  Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> row{rng.uniform(), rng.uniform(), static_cast<double>(rng.below(3))};
    if (rng.bernoulli(0.2)) row[rng.below(3)] = kMissing;
    std::size_t expect = 0;
    for (std::size_t l = 0; l < 3; ++l) {
      const auto& s = tree.levels()[l];
      const double v = row[s.feature];
      const bool right = !std::isnan(v) && !(s.categorical ? v == s.threshold : v < s.threshold);
      expect |= static_cast<std::size_t>(right) << (2 - l);
    }
    EXPECT_EQ(tree.leaf_index(row), expect);
    EXPECT_EQ(tree.predict(row), static_cast<double>(expect));
  }
  EXPECT_EQ(tree.leaf_index(std::vector<double>{kMissing, kMissing, kMissing}), 0u);
}

TEST(Oblivious, RejectsWrongLeafCount) {
  EXPECT_THROW(ObliviousTree({{0, 0.5, false}}, {1.0}), Error);
}

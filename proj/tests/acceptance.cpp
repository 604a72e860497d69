// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any FAIL.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "boostlab/bench.hpp"
#include "boostlab/boost.hpp"
#include "boostlab/metrics.hpp"
#include "boostlab/random.hpp"
#include "boostlab/tree.hpp"
#include "oracles.hpp"

using namespace boostlab;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

Outcome metric_formulas() {
  Outcome out;
  Rng rng(1001);
  for (int t = 0; t < 1000 && out.ok; ++t) {
    std::uint64_t c[4];
    for (auto& v : c) v = rng.bernoulli(0.1) ? 0 : rng.below(10001);
    if (c[0] + c[1] + c[2] + c[3] == 0) c[0] = 1;
    std::vector<std::uint8_t> pred, truth;
    const std::uint8_t cell[4][2] = {{1, 1}, {1, 0}, {0, 0}, {0, 1}};  // tp fp tn fn
    for (int k = 0; k < 4; ++k)
      for (std::uint64_t i = 0; i < c[k]; ++i) {
        pred.push_back(cell[k][0]);
        truth.push_back(cell[k][1]);
      }
    std::vector<std::size_t> perm(pred.size());
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(std::span(perm));
    std::vector<std::uint8_t> p2(pred.size()), t2(pred.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
      p2[i] = pred[perm[i]];
      t2[i] = truth[perm[i]];
    }
    const auto o = oracle::count_rows(p2, t2);
    const auto cm = confusion(p2, t2);
    if (cm.tp != o.tp || cm.fp != o.fp || cm.tn != o.tn || cm.fn != o.fn) {
      out.fail("confusion counts differ at instance " + std::to_string(t));
      break;
    }
    const double tp = double(o.tp), fp = double(o.fp), tn = double(o.tn), fn = double(o.fn);
    auto check = [&](const char* name, const Metric& got, double num, double den) {
      if (den == 0) {
        if (got) out.fail(std::string(name) + " should be undefined");
      } else if (!got || !rel_close(*got, num / den, 1e-12)) {
        out.fail(std::string(name) + " mismatch at instance " + std::to_string(t));
      }
    };
    check("precision", precision(cm), tp, tp + fp);
    check("recall", recall(cm), tp, tp + fn);
    check("tpr", tpr(cm), tp, tp + fn);
    check("specificity", specificity(cm), tn, tn + fp);
    check("fpr", fpr(cm), fp, fp + tn);
    // F = 2PR/(P+R) = 2tp/(2tp+fp+fn) whenever P and R are defined and P+R > 0.
    check("f_score", f_score(cm), 2 * tp, (tp + fp > 0 && tp + fn > 0 && tp > 0) ? 2 * tp + fp + fn : 0);
    if (recall(cm) != tpr(cm)) out.fail("recall != tpr");
    if (fpr(cm) && !rel_close(*fpr(cm), 1.0 - *specificity(cm), 1e-12))
      out.fail("fpr != 1 - specificity");
  }
  return out;
}

Outcome auc_oracle() {
  Outcome out;
  Rng rng(2002);
  const auto t0 = Clock::now();
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + rng.below(199);
    const std::uint64_t levels = 1 + rng.below(n);
    std::vector<double> s(n);
    std::vector<std::uint8_t> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng.below(levels)) / static_cast<double>(levels);
      y[i] = rng.bernoulli(0.5);
    }
    y[rng.below(n)] = 1;
    std::size_t neg = rng.below(n);
    while (y[neg] && std::count(y.begin(), y.end(), 1) == static_cast<long>(n)) neg = rng.below(n);
    y[neg] = 0;
    if (std::count(y.begin(), y.end(), 1) == 0) y[(neg + 1) % n] = 1;
    const double got = roc_curve(s, y).auc;
    const double want = oracle::pairwise_auc(s, y);
    if (std::abs(got - want) > 1e-12) out.fail("instance " + std::to_string(t) + ": " + fmt(got) +
                                               " vs " + fmt(want));
  }
  const double secs = seconds_since(t0);
  if (secs >= 5.0) out.fail("took " + fmt(secs) + " s");
  if (out.ok) out.detail = fmt(secs) + " s";
  return out;
}

Outcome stump_oracle() {
  Outcome out;
  Rng rng(3003);
  int compared = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + rng.below(49);
    const std::size_t d = 1 + rng.below(5);
    std::vector<bool> cat(d);
    for (std::size_t j = 0; j < d; ++j) cat[j] = rng.bernoulli(0.3);
    std::vector<double> cells(n * d);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        cells[i * d + j] = cat[j] ? double(rng.below(4)) : double(rng.below(12)) * 0.25;
        if (rng.bernoulli(0.05)) cells[i * d + j] = kMissing;
      }
    std::vector<int> y(n);
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = rng.bernoulli(0.5) ? 1 : -1;
      w[i] = 0.05 + rng.uniform();
    }
    y[0] = 1;
    y[1] = -1;
    FeatureView x;
    x.cells = cells;
    x.rows = n;
    x.cols = d;
    x.categorical = cat;
    const auto fit = fit_stump(x, y, w);
    const double best = oracle::best_stump_error(cells, d, cat, y, w);
    if (!std::isfinite(best)) {
      if (!fit.stump.is_constant()) out.fail("instance " + std::to_string(t) + ": split without candidates");
      continue;
    }
    ++compared;
    const double direct = oracle::stump_error(cells, d, fit.stump.test.feature, fit.stump.test.threshold,
                                              fit.stump.test.categorical, fit.stump.left_class,
                                              fit.stump.right_class, y, w);
    if (std::abs(fit.weighted_error - best) > 1e-12 || std::abs(direct - best) > 1e-12)
      out.fail("instance " + std::to_string(t) + ": " + fmt(fit.weighted_error) + " vs " + fmt(best));
  }
  if (out.ok) out.detail = std::to_string(compared) + " datasets compared";
  return out;
}

Dataset jittered_xor() {
  return Dataset(FeatureSchema({{"a", FeatureKind::numeric()}, {"b", FeatureKind::numeric()}}, "y"),
                 {0.1, 0.2, 0.9, 0.8, 0.2, 0.9, 0.8, 0.1}, {0, 0, 1, 1});
}

Outcome adaboost_properties() {
  Outcome out;
  std::vector<Dataset> runs;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    SynthOptions o;
    o.n = 80 + 20 * seed;
    o.seed = seed;
    runs.push_back(synthesize(pcos_default_schema(), o));
  }
  runs.push_back(jittered_xor());
  std::size_t rounds = 0;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    AdaBoostTrace trace;
    auto p = default_params(Algorithm::AdaBoost);
    p.n_rounds = 100;
    fit_adaboost(runs[r], p, &trace);
    double prev = 1.0;
    for (const auto& round : trace.rounds) {
      ++rounds;
      // Capped rounds (zero error) are exempt.
      if (!round.alpha_capped && std::abs(round.post_reweight_error - 0.5) > 1e-10)
        out.fail("run " + std::to_string(r) + ": post-reweight error " + fmt(round.post_reweight_error));
      if (round.exp_loss > prev) out.fail("run " + std::to_string(r) + ": exponential loss increased");
      prev = round.exp_loss;
    }
  }
  const auto xor4 = jittered_xor();
  auto p = default_params(Algorithm::AdaBoost);
  p.n_rounds = 10;
  const Model m = fit_adaboost(xor4, p);
  const auto pred = predict_labels(m, xor4);
  for (std::size_t i = 0; i < xor4.rows(); ++i)
    if (pred[i] != xor4.labels()[i]) out.fail("XOR-4 not fitted within 10 rounds");
  if (out.ok) out.detail = std::to_string(rounds) + " rounds checked";
  return out;
}

Outcome deviance_monotone() {
  Outcome out;
  const auto t0 = Clock::now();
  SynthOptions o;
  o.n = 300;
  o.seed = 42;
  const auto d = synthesize(pcos_default_schema(), o);
  for (auto algo : {Algorithm::Gbm, Algorithm::XgBoost, Algorithm::CatBoost}) {
    auto p = default_params(algo);
    p.n_rounds = 100;
    DevianceTrace trace;
    if (algo == Algorithm::Gbm) fit_gbm(d, p, &trace);
    else if (algo == Algorithm::XgBoost) fit_xgb(d, p, &trace);
    else fit_catboost(d, p, &trace);
    if (trace.deviance.size() != 101) out.fail(std::string(algorithm_name(algo)) + ": wrong trace length");
    for (std::size_t t = 1; t < trace.deviance.size(); ++t)
      if (trace.deviance[t] > trace.deviance[t - 1] + 1e-9)
        out.fail(std::string(algorithm_name(algo)) + ": deviance rose at round " + std::to_string(t));
  }
  const double secs = seconds_since(t0);
  if (secs >= 60.0) out.fail("took " + fmt(secs) + " s");
  if (out.ok) out.detail = fmt(secs) + " s";
  return out;
}

Outcome leakage_free() {
  Outcome out;
  SynthOptions o;
  o.n = 200;
  o.seed = 5;
  const auto d = synthesize(pcos_default_schema(), o);
  const auto p = default_params(Algorithm::CatBoost);
  const auto base = encode_for_training(d, p);

  std::vector<std::size_t> ts_columns;
  std::size_t offset = 0;
  auto next = base.state.features.begin();
  for (std::size_t j = 0; j < d.cols(); ++j) {
    if (next != base.state.features.end() && static_cast<std::size_t>(next->feature) == j) {
      if (next->mode == CatMode::OneHot) {
        offset += static_cast<std::size_t>(next->cardinality);
      } else {
        ts_columns.push_back(offset++);
      }
      ++next;
    } else {
      ++offset;
    }
  }
  if (ts_columns.empty()) {
    out.fail("schema has no target-statistic column");
    return out;
  }

  Rng rng(6006);
  std::vector<std::size_t> rows(d.rows());
  std::iota(rows.begin(), rows.end(), 0);
  rng.shuffle(std::span(rows));
  rows.resize(50);
  for (auto i : rows) {
    std::vector<std::uint8_t> labels(d.labels().begin(), d.labels().end());
    labels[i] ^= 1;
    const Dataset flipped(d.schema(), std::vector<double>(d.cells().begin(), d.cells().end()),
                          labels);
    const auto enc = encode_for_training(flipped, p);
    for (auto c : ts_columns) {
      const double a = base.cells[i * base.width + c];
      const double b = enc.cells[i * enc.width + c];
      if (!(a == b || (std::isnan(a) && std::isnan(b))))
        out.fail("row " + std::to_string(i) + " encoding changed");
    }
  }
  if (out.ok) out.detail = "50 rows";
  return out;
}

Outcome leaf_identity() {
  Outcome out;
  std::size_t leaves = 0;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    SynthOptions o;
    o.n = 150;
    o.seed = seed;
    o.missing_rate = seed % 2 ? 0.1 : 0.0;
    const auto d = synthesize(pcos_default_schema(), o);
    for (auto algo : {Algorithm::Gbm, Algorithm::XgBoost}) {
      auto p = default_params(algo);
      p.n_rounds = 30;
      p.lambda = 0.5 * static_cast<double>(seed - 1);
      p.max_depth = 2 + static_cast<int>(seed % 3);
      const Model m = fit(algo, d, p);
      const auto& ens = algo == Algorithm::Gbm
                            ? static_cast<const TreeEnsembleModel&>(std::get<GbmModel>(m.variant()))
                            : static_cast<const TreeEnsembleModel&>(std::get<XgbModel>(m.variant()));
      for (const auto& tree : ens.trees)
        for (const auto& node : tree.nodes()) {
          if (!node.is_leaf()) continue;
          ++leaves;
          const double lhs = node.value * (node.hess_sum + p.lambda);
          const double scale = std::max(std::abs(lhs), std::abs(node.grad_sum));
          if (std::abs(lhs + node.grad_sum) > 1e-12 * scale)
            out.fail(std::string(algorithm_name(algo)) + " leaf residual " + fmt(lhs + node.grad_sum));
        }
    }
  }
  if (out.ok) out.detail = std::to_string(leaves) + " leaves";
  return out;
}

Outcome paper_shape() {
  Outcome out;
  const auto t0 = Clock::now();
  const auto report = run_benchmark(paper_preset_config(42));
  const double secs = seconds_since(t0);
  if (report.n_test != 48) out.fail("test split has " + std::to_string(report.n_test) + " rows");
  if (report.n_train + report.n_test != 250) out.fail("dataset is not 250 rows");
  std::string aucs;
  for (const auto& r : report.results) {
    if (r.auc < 0.80) out.fail(std::string(algorithm_name(r.algorithm)) + " AUC " + fmt(r.auc));
    if (r.roc.auc < 0.5) out.fail(std::string(algorithm_name(r.algorithm)) + " ROC below diagonal");
    aucs += std::string(aucs.empty() ? "" : " ") + std::string(algorithm_name(r.algorithm)) + "=" +
            fmt(r.auc);
  }
  const auto doc = json::parse(report_to_json(report));
  const auto& algos = doc.at("algorithms");
  if (algos.size() != 4) out.fail("report does not have four entries");
  for (const auto& a : algos) {
    for (const char* k : {"train_accuracy", "test_accuracy", "confusion", "metrics", "auc"})
      if (!a.contains(k)) out.fail(std::string("missing field ") + k);
    for (const char* k : {"tp", "fp", "tn", "fn"})
      if (!a["confusion"].contains(k)) out.fail(std::string("missing confusion.") + k);
    for (const char* k : {"accuracy", "precision", "recall", "f_score", "specificity", "tpr", "fpr"})
      if (!a["metrics"].contains(k)) out.fail(std::string("missing metrics.") + k);
  }
  for (const char* k : {"seed", "n_train", "n_test", "timestamp"})
    if (!doc["metadata"].contains(k)) out.fail(std::string("missing metadata.") + k);
  const auto table = render_table(report);
  for (const char* col : {"Train%", "Test%", "FN", "FP", "Precision", "Recall", "F-Score", "AUC"})
    if (table.find(col) == std::string::npos) out.fail(std::string("table lacks ") + col);
  if (secs >= 120.0) out.fail("took " + fmt(secs) + " s");
  if (out.ok) out.detail = aucs + ", " + fmt(secs) + " s";
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  Outcome out;
  const auto base = fs::temp_directory_path() / "boostlab_acceptance_determinism";
  fs::remove_all(base);
  std::string reports[2];
  for (int k = 0; k < 2; ++k) {
    auto config = paper_preset_config(42);
    config.output_dir = base / std::to_string(k);
    run_benchmark(config);
    auto doc = json::parse(slurp(config.output_dir / "report.json"));
    doc["metadata"].erase("timestamp");
    reports[k] = doc.dump();
  }
  if (reports[0] != reports[1]) out.fail("report JSON differs");
  std::size_t curves = 0;
  for (const auto& e : fs::directory_iterator(base / "0")) {
    const auto name = e.path().filename().string();
    if (!name.ends_with(".csv") || !(name.starts_with("roc_") || name.starts_with("pr_"))) continue;
    ++curves;
    if (slurp(e.path()) != slurp(base / "1" / name)) out.fail(name + " differs");
  }
  if (curves != 8) out.fail("expected 8 curve files, found " + std::to_string(curves));
  fs::remove_all(base);
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"metric formulas vs row counting (1000 matrices)", metric_formulas},
      {"ROC AUC vs pairwise oracle (200 sets, < 5 s)", auc_oracle},
      {"stump vs exhaustive search (100 datasets)", stump_oracle},
      {"AdaBoost reweighting, exp-loss, XOR-4", adaboost_properties},
      {"GBM/XGB/CatBoost deviance non-increasing (< 60 s)", deviance_monotone},
      {"ordered target statistics leakage-free (50 rows)", leakage_free},
      {"regression leaf value identity", leaf_identity},
      {"paper-shape benchmark, AUC >= 0.80 (< 120 s)", paper_shape},
      {"compare determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    std::printf("%s  %s%s%s\n", o.ok ? "PASS" : "FAIL", name.c_str(), o.detail.empty() ? "" : "  -- ",
                o.detail.c_str());
    failed += !o.ok;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

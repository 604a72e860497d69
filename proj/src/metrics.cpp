#include "boostlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "boostlab/error.hpp"
#include "boostlab/io.hpp"

namespace boostlab {

namespace {

Metric ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

void check_truth(std::span<const double> scores, std::span<const std::uint8_t> truth) {
  if (scores.size() != truth.size())
    throw Error(ErrorCode::LengthMismatch, "length mismatch: " + std::to_string(scores.size()) +
                                               " scores vs " + std::to_string(truth.size()) +
                                               " labels");
  for (double s : scores)
    if (!std::isfinite(s)) throw Error(ErrorCode::InvalidArgument, "scores must be finite");
}

// Row positions sorted by score, highest first.
std::vector<std::size_t> descending(std::span<const double> scores) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return idx;
}

const char* header(CurveKind kind) { return kind == CurveKind::Roc ? "fpr,tpr" : "recall,precision"; }

}  // namespace

ConfusionMatrix confusion(std::span<const std::uint8_t> predicted,
                          std::span<const std::uint8_t> truth) {
  if (predicted.size() != truth.size())
    throw Error(ErrorCode::LengthMismatch, "length mismatch: " + std::to_string(predicted.size()) +
                                               " predictions vs " + std::to_string(truth.size()) +
                                               " labels");
  if (predicted.empty()) throw Error(ErrorCode::EmptyData, "no rows to evaluate");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const bool p = predicted[i] != 0;
    const bool t = truth[i] != 0;
    if (p && t) {
      ++cm.tp;
    } else if (p) {
      ++cm.fp;
    } else if (t) {
      ++cm.fn;
    } else {
      ++cm.tn;
    }
  }
  return cm;
}

Metric precision(const ConfusionMatrix& cm) { return ratio(cm.tp, cm.tp + cm.fp); }
Metric recall(const ConfusionMatrix& cm) { return ratio(cm.tp, cm.tp + cm.fn); }
Metric specificity(const ConfusionMatrix& cm) { return ratio(cm.tn, cm.tn + cm.fp); }
Metric tpr(const ConfusionMatrix& cm) { return recall(cm); }
Metric fpr(const ConfusionMatrix& cm) { return ratio(cm.fp, cm.fp + cm.tn); }
Metric accuracy(const ConfusionMatrix& cm) { return ratio(cm.tp + cm.tn, cm.total()); }

Metric f_score(const ConfusionMatrix& cm) {
  const auto p = precision(cm);
  const auto r = recall(cm);
  if (!p || !r || *p + *r == 0.0) return std::nullopt;
  return 2.0 * *p * *r / (*p + *r);
}

double accuracy(std::span<const std::uint8_t> predicted, std::span<const std::uint8_t> truth) {
  return *accuracy(confusion(predicted, truth));
}

MetricScores score_all(const ConfusionMatrix& cm) {
  return {accuracy(cm), precision(cm), recall(cm), f_score(cm), specificity(cm), tpr(cm), fpr(cm)};
}

CurveSeries roc_curve(std::span<const double> scores, std::span<const std::uint8_t> truth) {
  check_truth(scores, truth);
  const auto positives = static_cast<std::uint64_t>(std::count_if(
      truth.begin(), truth.end(), [](std::uint8_t t) { return t != 0; }));
  const std::uint64_t negatives = truth.size() - positives;
  if (positives == 0 || negatives == 0)
    throw Error(ErrorCode::SingleClassTruth, "ROC needs both classes in the truth labels");

  const auto idx = descending(scores);
  CurveSeries curve;
  curve.points.push_back({0.0, 0.0});
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  // Twice the area in units of (1/P)(1/N), accumulated in integers.
  std::uint64_t doubled_area = 0;
  for (std::size_t k = 0; k < idx.size();) {
    const double s = scores[idx[k]];
    const std::uint64_t tp_before = tp;
    const std::uint64_t fp_before = fp;
    for (; k < idx.size() && scores[idx[k]] == s; ++k) (truth[idx[k]] ? tp : fp) += 1;
    doubled_area += (fp - fp_before) * (tp + tp_before);
    curve.points.push_back({static_cast<double>(fp) / static_cast<double>(negatives),
                            static_cast<double>(tp) / static_cast<double>(positives)});
  }
  curve.auc = static_cast<double>(doubled_area) /
              (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
  return curve;
}

CurveSeries pr_curve(std::span<const double> scores, std::span<const std::uint8_t> truth) {
  check_truth(scores, truth);
  const auto positives = static_cast<std::uint64_t>(std::count_if(
      truth.begin(), truth.end(), [](std::uint8_t t) { return t != 0; }));
  if (positives == 0) throw Error(ErrorCode::NoPositives, "PR curve needs at least one positive");

  const auto idx = descending(scores);
  CurveSeries curve;
  std::uint64_t tp = 0;
  std::uint64_t predicted = 0;
  for (std::size_t k = 0; k < idx.size();) {
    const double s = scores[idx[k]];
    for (; k < idx.size() && scores[idx[k]] == s; ++k) {
      ++predicted;
      if (truth[idx[k]]) ++tp;
    }
    curve.points.push_back({static_cast<double>(tp) / static_cast<double>(positives),
                            static_cast<double>(tp) / static_cast<double>(predicted)});
  }
  return curve;
}

std::string format_curve_csv(const CurveSeries& curve, CurveKind kind) {
  std::string out = header(kind);
  out += '\n';
  char buf[64];
  for (const auto& p : curve.points) {
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f\n", p.x, p.y);
    out += buf;
  }
  return out;
}

void write_curve_csv(const CurveSeries& curve, CurveKind kind, const std::filesystem::path& path) {
  write_file_atomic(path, format_curve_csv(curve, kind));
}

CurveSeries parse_curve_csv(const std::string& text, CurveKind kind) {
  CurveSeries curve;
  std::size_t pos = 0;
  bool first = true;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    std::string line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line != header(kind))
        throw Error(ErrorCode::MalformedCsv, "curve header must be '" + std::string(header(kind)) + "'");
      continue;
    }
    CurvePoint p;
    char tail = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf%c", &p.x, &p.y, &tail) != 2)
      throw Error(ErrorCode::MalformedCsv, "bad curve line '" + line + "'");
    curve.points.push_back(p);
  }
  if (first) throw Error(ErrorCode::MalformedCsv, "empty curve file");
  return curve;
}

}  // namespace boostlab

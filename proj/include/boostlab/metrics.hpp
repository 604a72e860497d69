#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace boostlab {

// Empty optional means Undefined (zero denominator); reports render it "NA".
using Metric = std::optional<double>;

/// Positive class is 1.
struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const noexcept { return tp + fp + tn + fn; }

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

ConfusionMatrix confusion(std::span<const std::uint8_t> predicted,
                          std::span<const std::uint8_t> truth);

Metric precision(const ConfusionMatrix& cm);    // tp / (tp + fp)
Metric recall(const ConfusionMatrix& cm);       // tp / (tp + fn)
Metric f_score(const ConfusionMatrix& cm);      // 2PR / (P + R)
Metric specificity(const ConfusionMatrix& cm);  // tn / (tn + fp)
Metric tpr(const ConfusionMatrix& cm);          // same as recall
Metric fpr(const ConfusionMatrix& cm);          // fp / (fp + tn)
Metric accuracy(const ConfusionMatrix& cm);     // (tp + tn) / n

double accuracy(std::span<const std::uint8_t> predicted, std::span<const std::uint8_t> truth);

struct MetricScores {
  Metric accuracy;
  Metric precision;
  Metric recall;
  Metric f_score;
  Metric specificity;
  Metric tpr;
  Metric fpr;

  friend bool operator==(const MetricScores&, const MetricScores&) = default;
};

MetricScores score_all(const ConfusionMatrix& cm);

struct CurvePoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

struct CurveSeries {
  std::vector<CurvePoint> points;
  double auc = 0.0;  // ROC only
};

/// (fpr, tpr) points from the +inf sentinel (0,0) through one point per
/// distinct score, descending. Tied scores move together, so the
/// trapezoidal area equals P(s+ > s-) + ½·P(s+ = s-).
CurveSeries roc_curve(std::span<const double> scores, std::span<const std::uint8_t> truth);

/// (recall, precision) after each distinct score, descending; no
/// interpolation and no sentinel point.
CurveSeries pr_curve(std::span<const double> scores, std::span<const std::uint8_t> truth);

enum class CurveKind { Roc, Pr };

// Header "fpr,tpr" or "recall,precision"; six decimals per value.
std::string format_curve_csv(const CurveSeries& curve, CurveKind kind);
void write_curve_csv(const CurveSeries& curve, CurveKind kind, const std::filesystem::path& path);
CurveSeries parse_curve_csv(const std::string& text, CurveKind kind);

}  // namespace boostlab

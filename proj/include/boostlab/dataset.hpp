#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace boostlab {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) noexcept { return std::isnan(v); }

enum class Kind { Numeric, Binary, Categorical };

struct FeatureKind {
  Kind kind = Kind::Numeric;
  int cardinality = 0;  // only meaningful for Categorical

  static FeatureKind numeric() { return {Kind::Numeric, 0}; }
  static FeatureKind binary() { return {Kind::Binary, 0}; }
  static FeatureKind categorical(int cardinality) { return {Kind::Categorical, cardinality}; }

  bool is_categorical() const noexcept { return kind == Kind::Categorical; }

  friend bool operator==(const FeatureKind&, const FeatureKind&) = default;
};

struct Column {
  std::string name;
  FeatureKind kind;

  friend bool operator==(const Column&, const Column&) = default;
};

class FeatureSchema {
 public:
  FeatureSchema() = default;
  // Throws InvalidArgument on duplicate names, a label that collides with a
  // feature, or a categorical cardinality below 2.
  FeatureSchema(std::vector<Column> columns, std::string label_column);

  const std::vector<Column>& columns() const noexcept { return columns_; }
  const std::string& label_column() const noexcept { return label_; }
  std::size_t size() const noexcept { return columns_.size(); }
  const Column& operator[](std::size_t j) const { return columns_[j]; }

  // Index of the named feature column, or -1.
  int find(const std::string& name) const;

  friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;

 private:
  std::vector<Column> columns_;
  std::string label_;
};

/// Twelve PCOS-style features: nine binary symptoms, age and weight as
/// numerics, activity_level as a three-level categorical. Label is "pcos".
FeatureSchema pcos_default_schema();

// Schema JSON: {"label": "...", "columns": [{"name": "...", "kind":
// "numeric"|"binary"|"categorical", "cardinality": k}]}
FeatureSchema schema_from_json(const std::string& text);
std::string schema_to_json(const FeatureSchema& schema);

/// Immutable n x d feature table with 0/1 labels.
///
/// Cells are stored row-major as doubles: numeric values as-is, binary as
/// 0/1, categorical levels as their integer index. Missing is NaN. Each row
/// remembers its index in the dataset it was originally loaded from or
/// synthesized as, which survives split().
class Dataset {
 public:
  // Validates every cell against the schema; throws EmptyDataset for n = 0
  // and InvalidArgument for shape or kind violations.
  Dataset(FeatureSchema schema, std::vector<double> cells, std::vector<std::uint8_t> labels,
          std::vector<std::size_t> row_ids = {});

  const FeatureSchema& schema() const noexcept { return schema_; }
  std::size_t rows() const noexcept { return labels_.size(); }
  std::size_t cols() const noexcept { return schema_.size(); }

  std::span<const double> row(std::size_t i) const {
    return {cells_.data() + i * cols(), cols()};
  }
  double at(std::size_t i, std::size_t j) const { return cells_[i * cols() + j]; }
  std::span<const double> cells() const noexcept { return cells_; }
  std::span<const std::uint8_t> labels() const noexcept { return labels_; }
  std::span<const std::size_t> row_ids() const noexcept { return row_ids_; }

  std::size_t count_positive() const noexcept;

  // Rows at the given positions, in that order, keeping their row ids.
  Dataset subset(std::span<const std::size_t> positions) const;

  friend bool operator==(const Dataset&, const Dataset&);

 private:
  FeatureSchema schema_;
  std::vector<double> cells_;
  std::vector<std::uint8_t> labels_;
  std::vector<std::size_t> row_ids_;
};

bool operator==(const Dataset& a, const Dataset& b);

Dataset load_csv(const std::filesystem::path& path, const FeatureSchema& schema);
Dataset parse_csv(const std::string& text, const FeatureSchema& schema,
                  const std::string& source_name = "<memory>");
std::string format_csv(const Dataset& data);
void write_csv(const Dataset& data, const std::filesystem::path& path);

struct SynthOptions {
  std::size_t n = 200;
  std::uint64_t seed = 42;
  double signal_strength = 2.0;
  // Fraction of numeric cells replaced by Missing after labels are drawn.
  double missing_rate = 0.0;
};

Dataset synthesize(const FeatureSchema& schema, const SynthOptions& options);

struct SplitSpec {
  double test_fraction = 0.25;
  std::uint64_t seed = 42;
};

struct TrainTest {
  Dataset train;
  Dataset test;
};

/// Stratified split. Test size is round(n * test_fraction) clamped to
/// [1, n-1]; per-class test counts stay within one row of the fraction.
TrainTest split(const Dataset& data, const SplitSpec& spec);

}  // namespace boostlab

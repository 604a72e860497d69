#include "boostlab/dataset.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "boostlab/error.hpp"
#include "boostlab/io.hpp"
#include "boostlab/random.hpp"

namespace boostlab {

namespace {

using json = nlohmann::json;

bool cell_conforms(const FeatureKind& kind, double v) {
  if (is_missing(v)) return true;
  if (!std::isfinite(v)) return false;
  switch (kind.kind) {
    case Kind::Numeric: return true;
    case Kind::Binary: return v == 0.0 || v == 1.0;
    case Kind::Categorical:
      return v >= 0.0 && v < kind.cardinality && v == std::floor(v);
  }
  return false;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

// Splits one CSV record; double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_record(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.emplace_back(trim(cur));
  return fields;
}

bool parse_number(std::string_view text, double& out) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size() && std::isfinite(out);
}

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::Numeric: return "numeric";
    case Kind::Binary: return "binary";
    case Kind::Categorical: return "categorical";
  }
  return "numeric";
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

FeatureSchema::FeatureSchema(std::vector<Column> columns, std::string label_column)
    : columns_(std::move(columns)), label_(std::move(label_column)) {
  std::unordered_set<std::string> seen;
  for (const auto& c : columns_) {
    if (c.name.empty()) throw Error(ErrorCode::InvalidArgument, "empty column name");
    if (!seen.insert(c.name).second)
      throw Error(ErrorCode::InvalidArgument, "duplicate column '" + c.name + "'");
    if (c.kind.is_categorical() && c.kind.cardinality < 2)
      throw Error(ErrorCode::InvalidArgument,
                  "categorical column '" + c.name + "' needs cardinality >= 2");
  }
  if (label_.empty()) throw Error(ErrorCode::InvalidArgument, "empty label column name");
  if (seen.contains(label_))
    throw Error(ErrorCode::InvalidArgument, "label column '" + label_ + "' is also a feature");
}

int FeatureSchema::find(const std::string& name) const {
  for (std::size_t j = 0; j < columns_.size(); ++j)
    if (columns_[j].name == name) return static_cast<int>(j);
  return -1;
}

FeatureSchema pcos_default_schema() {
  std::vector<Column> cols = {
      {"age", FeatureKind::numeric()},
      {"weight", FeatureKind::numeric()},
      {"sudden_weight_gain", FeatureKind::binary()},
      {"hair_growth", FeatureKind::binary()},
      {"skin_darkening", FeatureKind::binary()},
      {"acne", FeatureKind::binary()},
      {"hair_thinning", FeatureKind::binary()},
      {"fatigue", FeatureKind::binary()},
      {"mood_swings", FeatureKind::binary()},
      {"irregular_cycle", FeatureKind::binary()},
      {"conceived_before", FeatureKind::binary()},
      {"activity_level", FeatureKind::categorical(3)},
  };
  return FeatureSchema(std::move(cols), "pcos");
}

FeatureSchema schema_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    std::vector<Column> cols;
    for (const auto& c : doc.at("columns")) {
      const auto kind = c.at("kind").get<std::string>();
      FeatureKind fk;
      if (kind == "numeric") {
        fk = FeatureKind::numeric();
      } else if (kind == "binary") {
        fk = FeatureKind::binary();
      } else if (kind == "categorical") {
        fk = FeatureKind::categorical(c.at("cardinality").get<int>());
      } else {
        throw Error(ErrorCode::InvalidArgument, "unknown feature kind '" + kind + "'");
      }
      cols.push_back({c.at("name").get<std::string>(), fk});
    }
    return FeatureSchema(std::move(cols), doc.at("label").get<std::string>());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("invalid schema JSON: ") + e.what());
  }
}

std::string schema_to_json(const FeatureSchema& schema) {
  json cols = json::array();
  for (const auto& c : schema.columns()) {
    json col = {{"name", c.name}, {"kind", kind_name(c.kind.kind)}};
    if (c.kind.is_categorical()) col["cardinality"] = c.kind.cardinality;
    cols.push_back(std::move(col));
  }
  return json{{"label", schema.label_column()}, {"columns", cols}}.dump(2);
}

Dataset::Dataset(FeatureSchema schema, std::vector<double> cells, std::vector<std::uint8_t> labels,
                 std::vector<std::size_t> row_ids)
    : schema_(std::move(schema)),
      cells_(std::move(cells)),
      labels_(std::move(labels)),
      row_ids_(std::move(row_ids)) {
  if (labels_.empty()) throw Error(ErrorCode::EmptyDataset, "dataset has no rows");
  if (cells_.size() != labels_.size() * schema_.size())
    throw Error(ErrorCode::InvalidArgument, "cell count does not match rows x columns");
  if (row_ids_.empty()) {
    row_ids_.resize(labels_.size());
    std::iota(row_ids_.begin(), row_ids_.end(), std::size_t{0});
  } else if (row_ids_.size() != labels_.size()) {
    throw Error(ErrorCode::InvalidArgument, "row id count does not match rows");
  }
  for (auto y : labels_)
    if (y > 1) throw Error(ErrorCode::LabelNotBinary, "label outside {0,1}");
  const std::size_t d = schema_.size();
  for (std::size_t i = 0; i < labels_.size(); ++i)
    for (std::size_t j = 0; j < d; ++j)
      if (!cell_conforms(schema_[j].kind, cells_[i * d + j]))
        throw Error(ErrorCode::InvalidArgument, "cell (" + std::to_string(i) + ", " +
                                                    schema_[j].name + ") violates its column kind");
}

std::size_t Dataset::count_positive() const noexcept {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), std::uint8_t{1}));
}

Dataset Dataset::subset(std::span<const std::size_t> positions) const {
  const std::size_t d = cols();
  std::vector<double> cells;
  cells.reserve(positions.size() * d);
  std::vector<std::uint8_t> labels;
  std::vector<std::size_t> ids;
  for (auto p : positions) {
    auto r = row(p);
    cells.insert(cells.end(), r.begin(), r.end());
    labels.push_back(labels_[p]);
    ids.push_back(row_ids_[p]);
  }
  return Dataset(schema_, std::move(cells), std::move(labels), std::move(ids));
}

bool operator==(const Dataset& a, const Dataset& b) {
  if (!(a.schema_ == b.schema_) || a.labels_ != b.labels_ || a.row_ids_ != b.row_ids_) return false;
  if (a.cells_.size() != b.cells_.size()) return false;
  for (std::size_t k = 0; k < a.cells_.size(); ++k) {
    const double x = a.cells_[k];
    const double y = b.cells_[k];
    if (is_missing(x) != is_missing(y)) return false;
    if (!is_missing(x) && x != y) return false;
  }
  return true;
}

Dataset parse_csv(const std::string& text, const FeatureSchema& schema,
                  const std::string& source_name) {
  std::vector<std::string_view> lines;
  {
    std::string_view rest(text);
    while (!rest.empty()) {
      const auto nl = rest.find('\n');
      auto line = rest.substr(0, nl);
      if (!trim(line).empty()) lines.push_back(line);
      if (nl == std::string_view::npos) break;
      rest.remove_prefix(nl + 1);
    }
  }
  if (lines.empty()) throw Error(ErrorCode::EmptyDataset, source_name + ": no header row");
  std::string_view header_line = lines.front();
  if (header_line.starts_with("\xEF\xBB\xBF")) header_line.remove_prefix(3);
  const auto header = split_record(header_line);

  // file column -> schema column (-1 for label)
  std::vector<int> mapping(header.size(), -2);
  std::vector<bool> covered(schema.size(), false);
  bool have_label = false;
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (header[k] == schema.label_column()) {
      if (have_label) throw Error(ErrorCode::MalformedCsv, source_name + ": duplicate label column");
      have_label = true;
      mapping[k] = -1;
      continue;
    }
    const int j = schema.find(header[k]);
    if (j < 0 || covered[j])
      throw Error(ErrorCode::UnknownColumn,
                  source_name + ": unexpected column '" + header[k] + "'");
    covered[j] = true;
    mapping[k] = j;
  }
  if (!have_label)
    throw Error(ErrorCode::UnknownColumn,
                source_name + ": label column '" + schema.label_column() + "' not found");
  for (std::size_t j = 0; j < schema.size(); ++j)
    if (!covered[j])
      throw Error(ErrorCode::UnknownColumn,
                  source_name + ": column '" + schema[j].name + "' not found");

  const std::size_t d = schema.size();
  const std::size_t n = lines.size() - 1;
  if (n == 0) throw Error(ErrorCode::EmptyDataset, source_name + ": no data rows");
  std::vector<double> cells(n * d);
  std::vector<std::uint8_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto fields = split_record(lines[i + 1]);
    const std::string where = source_name + ": row " + std::to_string(i + 1);
    if (fields.size() != header.size())
      throw Error(ErrorCode::MalformedCsv, where + ": expected " + std::to_string(header.size()) +
                                               " fields, found " + std::to_string(fields.size()));
    for (std::size_t k = 0; k < fields.size(); ++k) {
      const std::string& f = fields[k];
      if (mapping[k] == -1) {
        if (f == "0") {
          labels[i] = 0;
        } else if (f == "1") {
          labels[i] = 1;
        } else {
          throw Error(ErrorCode::LabelNotBinary, where + ": label '" + f + "' is not 0 or 1");
        }
        continue;
      }
      const auto j = static_cast<std::size_t>(mapping[k]);
      const auto& col = schema[j];
      double v = kMissing;
      if (f.empty() || f == "NA") {
        if (col.kind.kind != Kind::Numeric)
          throw Error(ErrorCode::MalformedCsv,
                      where + ": missing value in non-numeric column '" + col.name + "'");
      } else if (!parse_number(f, v) || !cell_conforms(col.kind, v)) {
        throw Error(ErrorCode::MalformedCsv,
                    where + ": cannot parse '" + f + "' for column '" + col.name + "'");
      }
      cells[i * d + j] = v;
    }
  }
  return Dataset(schema, std::move(cells), std::move(labels));
}

Dataset load_csv(const std::filesystem::path& path, const FeatureSchema& schema) {
  return parse_csv(read_file(path), schema, path.string());
}

std::string format_csv(const Dataset& data) {
  const auto& schema = data.schema();
  std::string out;
  for (const auto& c : schema.columns()) {
    out += c.name;
    out += ',';
  }
  out += schema.label_column();
  out += '\n';
  for (std::size_t i = 0; i < data.rows(); ++i) {
    for (std::size_t j = 0; j < data.cols(); ++j) {
      const double v = data.at(i, j);
      if (is_missing(v)) {
        out += "NA";
      } else if (schema[j].kind.kind == Kind::Numeric) {
        out += format_double(v);
      } else {
        out += std::to_string(static_cast<long long>(v));
      }
      out += ',';
    }
    out += data.labels()[i] ? '1' : '0';
    out += '\n';
  }
  return out;
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
  write_file_atomic(path, format_csv(data));
}

Dataset synthesize(const FeatureSchema& schema, const SynthOptions& options) {
  const std::size_t d = schema.size();
  const std::size_t n = options.n;
  if (d == 0) throw Error(ErrorCode::DegenerateSchema, "schema has no feature columns");
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "synthesize needs n >= 2");
  if (!(options.signal_strength >= 0.0) || !std::isfinite(options.signal_strength))
    throw Error(ErrorCode::InvalidArgument, "signal_strength must be finite and >= 0");
  if (!(options.missing_rate >= 0.0 && options.missing_rate < 1.0))
    throw Error(ErrorCode::InvalidArgument, "missing_rate must be in [0, 1)");

  Rng rng(options.seed);

  // Per-column generative parameters, then one logistic weight per column.
  struct ColumnModel {
    double location = 0.0;
    double scale = 1.0;
    double p = 0.5;
    std::vector<double> level_effect;
  };
  std::vector<ColumnModel> models(d);
  for (std::size_t j = 0; j < d; ++j) {
    auto& m = models[j];
    switch (schema[j].kind.kind) {
      case Kind::Numeric:
        m.location = 10.0 + 80.0 * rng.uniform();
        m.scale = 2.0 + 13.0 * rng.uniform();
        break;
      case Kind::Binary:
        m.p = 0.2 + 0.4 * rng.uniform();
        break;
      case Kind::Categorical: {
        const int k = schema[j].kind.cardinality;
        m.level_effect.resize(k);
        double mean = 0.0;
        for (auto& e : m.level_effect) {
          e = rng.normal();
          mean += e;
        }
        mean /= k;
        for (auto& e : m.level_effect) e -= mean;
        break;
      }
    }
  }
  std::vector<double> weights(d);
  for (auto& w : weights) w = rng.normal() * options.signal_strength;

  std::vector<double> cells(n * d);
  std::vector<double> logits(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const auto& m = models[j];
      double value = 0.0;
      double standardized = 0.0;
      switch (schema[j].kind.kind) {
        case Kind::Numeric: {
          const double z = rng.normal();
          value = std::round((m.location + m.scale * z) * 100.0) / 100.0;
          standardized = z;
          break;
        }
        case Kind::Binary: {
          value = rng.bernoulli(m.p) ? 1.0 : 0.0;
          standardized = (value - m.p) / std::sqrt(m.p * (1.0 - m.p));
          break;
        }
        case Kind::Categorical: {
          const auto level = rng.below(m.level_effect.size());
          value = static_cast<double>(level);
          standardized = m.level_effect[level];
          break;
        }
      }
      cells[i * d + j] = value;
      logits[i] += weights[j] * standardized;
    }
  }

  std::vector<std::uint8_t> labels(n);
  constexpr int kMaxLabelDraws = 100;
  bool both = false;
  for (int attempt = 0; attempt < kMaxLabelDraws && !both; ++attempt) {
    std::size_t pos = 0;
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = rng.bernoulli(sigmoid(logits[i])) ? 1 : 0;
      pos += labels[i];
    }
    both = pos > 0 && pos < n;
  }
  if (!both)
    throw Error(ErrorCode::SingleClassDataset, "could not draw a label vector with both classes");

  if (options.missing_rate > 0.0) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j)
        if (schema[j].kind.kind == Kind::Numeric && rng.bernoulli(options.missing_rate))
          cells[i * d + j] = kMissing;
  }
  return Dataset(schema, std::move(cells), std::move(labels));
}

TrainTest split(const Dataset& data, const SplitSpec& spec) {
  const std::size_t n = data.rows();
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "split needs at least 2 rows");
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0))
    throw Error(ErrorCode::InvalidArgument, "test_fraction must be in (0, 1)");

  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < n; ++i) by_class[data.labels()[i]].push_back(i);
  if (by_class[0].empty() || by_class[1].empty())
    throw Error(ErrorCode::SingleClassDataset, "stratified split needs both classes");

  const auto target = static_cast<std::size_t>(
      std::clamp<double>(std::round(static_cast<double>(n) * spec.test_fraction), 1.0,
                         static_cast<double>(n - 1)));

  // Floor of each class's share, then hand out the remainder by largest
  // fractional part (class 0 first on ties).
  std::array<std::size_t, 2> take{};
  std::array<double, 2> frac{};
  std::size_t assigned = 0;
  for (int c = 0; c < 2; ++c) {
    const double exact = static_cast<double>(by_class[c].size()) * spec.test_fraction;
    take[c] = static_cast<std::size_t>(std::floor(exact));
    frac[c] = exact - std::floor(exact);
    assigned += take[c];
  }
  while (assigned < target) {
    int c = frac[0] >= frac[1] ? 0 : 1;
    if (take[c] >= by_class[c].size()) c = 1 - c;
    ++take[c];
    frac[c] = -1.0;
    ++assigned;
  }
  while (assigned > target) {
    const int c = take[0] >= take[1] ? 0 : 1;
    --take[c];
    --assigned;
  }

  Rng rng(spec.seed);
  std::vector<std::size_t> test_pos;
  std::vector<std::size_t> train_pos;
  for (int c = 0; c < 2; ++c) {
    auto rows = by_class[c];
    rng.shuffle(std::span<std::size_t>(rows));
    test_pos.insert(test_pos.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(take[c]));
    train_pos.insert(train_pos.end(), rows.begin() + static_cast<std::ptrdiff_t>(take[c]), rows.end());
  }
  std::sort(test_pos.begin(), test_pos.end());
  std::sort(train_pos.begin(), train_pos.end());
  return {data.subset(train_pos), data.subset(test_pos)};
}

}  // namespace boostlab

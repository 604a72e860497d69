#include "boostlab/c_api.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <memory>
#include <new>
#include <optional>
#include <string>

#include <json.hpp>

#include "boostlab/bench.hpp"
#include "boostlab/boost.hpp"
#include "boostlab/dataset.hpp"
#include "boostlab/error.hpp"
#include "boostlab/io.hpp"
#include "boostlab/metrics.hpp"
#include "boostlab/serialize.hpp"

struct BlDataset {
  boostlab::Dataset data;
};

struct BlModel {
  boostlab::Model model;
};

namespace {

using namespace boostlab;

thread_local std::string g_last_error;

BlStatus to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return BL_ERR_INVALID_ARGUMENT;
    case ErrorCode::Io: return BL_ERR_IO;
    case ErrorCode::MalformedCsv: return BL_ERR_MALFORMED_CSV;
    case ErrorCode::UnknownColumn: return BL_ERR_UNKNOWN_COLUMN;
    case ErrorCode::LabelNotBinary: return BL_ERR_LABEL_NOT_BINARY;
    case ErrorCode::EmptyDataset: return BL_ERR_EMPTY_DATASET;
    case ErrorCode::DegenerateSchema: return BL_ERR_DEGENERATE_SCHEMA;
    case ErrorCode::SingleClassDataset: return BL_ERR_SINGLE_CLASS_DATASET;
    case ErrorCode::EmptyData: return BL_ERR_EMPTY_DATA;
    case ErrorCode::SchemaMismatch: return BL_ERR_SCHEMA_MISMATCH;
    case ErrorCode::LengthMismatch: return BL_ERR_LENGTH_MISMATCH;
    case ErrorCode::SingleClassTruth: return BL_ERR_SINGLE_CLASS_TRUTH;
    case ErrorCode::NoPositives: return BL_ERR_NO_POSITIVES;
    case ErrorCode::InvalidModel: return BL_ERR_INVALID_MODEL;
  }
  return BL_ERR_INTERNAL;
}

// Runs `body`, translating exceptions into a status and last-error message.
template <class F>
BlStatus guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return BL_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return BL_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return BL_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

FeatureSchema schema_or_default(const char* schema_json) {
  return schema_json ? schema_from_json(schema_json) : pcos_default_schema();
}

Algorithm algorithm_or_throw(const char* algo) {
  require(algo != nullptr, "algorithm name is null");
  const auto a = parse_algorithm(algo);
  if (!a) throw Error(ErrorCode::InvalidArgument, std::string("unknown algorithm '") + algo + "'");
  return *a;
}

BoostParams from_c(const BlBoostParams& p) {
  BoostParams out;
  out.n_rounds = p.n_rounds;
  out.learning_rate = p.learning_rate;
  out.max_depth = p.max_depth;
  out.lambda = p.lambda;
  out.gamma = p.gamma;
  out.min_child_weight = p.min_child_weight;
  out.seed = p.seed;
  out.cat_one_hot_max = p.cat_one_hot_max;
  out.cat_prior = p.cat_prior;
  out.threshold = p.threshold;
  return out;
}

BlBoostParams to_c(const BoostParams& p) {
  return {p.n_rounds, p.learning_rate, p.max_depth,       p.lambda,    p.gamma,
          p.min_child_weight, p.seed,  p.cat_one_hot_max, p.cat_prior, p.threshold};
}

char* dup_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

double or_nan(const Metric& m) { return m ? *m : std::numeric_limits<double>::quiet_NaN(); }

BlMetrics evaluate_impl(const double* scores, const uint8_t* truth, size_t n, double threshold) {
  require(scores != nullptr && truth != nullptr, "scores and truth must be non-null");
  require(threshold >= 0.0 && threshold <= 1.0, "threshold must be in [0, 1]");
  std::span<const double> s(scores, n);
  std::span<const std::uint8_t> t(truth, n);
  std::vector<std::uint8_t> pred(n);
  for (size_t i = 0; i < n; ++i) pred[i] = s[i] >= threshold ? 1 : 0;
  const auto cm = confusion(pred, t);
  const auto m = score_all(cm);
  const auto roc = roc_curve(s, t);
  return {cm.tp,         cm.fp,        cm.tn,
          cm.fn,         or_nan(m.accuracy), or_nan(m.precision),
          or_nan(m.recall), or_nan(m.f_score), or_nan(m.specificity),
          or_nan(m.tpr), or_nan(m.fpr), roc.auc};
}

// Non-empty lines after the header.
std::vector<std::string> data_lines(const std::string& text, const std::string& path) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  bool header = true;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    std::string line = text.substr(pos, nl - pos);
    pos = nl + 1;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    lines.push_back(std::move(line));
  }
  if (header) throw Error(ErrorCode::MalformedCsv, path + ": missing header line");
  return lines;
}

}  // namespace

extern "C" {

const char* bl_version(void) { return "1.0.0"; }

const char* bl_last_error(void) { return g_last_error.c_str(); }

const char* bl_status_name(BlStatus status) {
  switch (status) {
    case BL_OK: return "ok";
    case BL_ERR_INVALID_ARGUMENT: return "InvalidArgument";
    case BL_ERR_IO: return "IoError";
    case BL_ERR_MALFORMED_CSV: return "MalformedCsv";
    case BL_ERR_UNKNOWN_COLUMN: return "UnknownColumn";
    case BL_ERR_LABEL_NOT_BINARY: return "LabelNotBinary";
    case BL_ERR_EMPTY_DATASET: return "EmptyDataset";
    case BL_ERR_DEGENERATE_SCHEMA: return "DegenerateSchema";
    case BL_ERR_SINGLE_CLASS_DATASET: return "SingleClassDataset";
    case BL_ERR_EMPTY_DATA: return "EmptyData";
    case BL_ERR_SCHEMA_MISMATCH: return "SchemaMismatch";
    case BL_ERR_LENGTH_MISMATCH: return "LengthMismatch";
    case BL_ERR_SINGLE_CLASS_TRUTH: return "SingleClassTruth";
    case BL_ERR_NO_POSITIVES: return "NoPositives";
    case BL_ERR_INVALID_MODEL: return "InvalidModel";
    case BL_ERR_INTERNAL: return "Internal";
  }
  return "Unknown";
}

void bl_string_free(char* s) { std::free(s); }
void bl_buffer_free(void* p) { std::free(p); }

BlStatus bl_default_params(const char* algo, int paper_preset, BlBoostParams* out) {
  return guarded([&] {
    require(out != nullptr, "output pointer is null");
    const auto a = algorithm_or_throw(algo);
    *out = to_c(paper_preset ? paper_preset_params(a) : default_params(a));
  });
}

BlStatus bl_params_validate(const BlBoostParams* params) {
  return guarded([&] {
    require(params != nullptr, "params pointer is null");
    from_c(*params).validate();
  });
}

BlStatus bl_dataset_load_csv(const char* path, const char* schema_json, BlDataset** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "path and output must be non-null");
    *out = nullptr;
    auto data = load_csv(path, schema_or_default(schema_json));
    *out = new BlDataset{std::move(data)};
  });
}

BlStatus bl_dataset_synthesize(const char* schema_json, uint64_t n, uint64_t seed,
                               double signal_strength, double missing_rate, BlDataset** out) {
  return guarded([&] {
    require(out != nullptr, "output pointer is null");
    *out = nullptr;
    SynthOptions opts{static_cast<std::size_t>(n), seed, signal_strength, missing_rate};
    *out = new BlDataset{synthesize(schema_or_default(schema_json), opts)};
  });
}

BlStatus bl_dataset_write_csv(const BlDataset* data, const char* path) {
  return guarded([&] {
    require(data != nullptr && path != nullptr, "dataset and path must be non-null");
    write_csv(data->data, path);
  });
}

BlStatus bl_dataset_split(const BlDataset* data, double test_fraction, uint64_t seed,
                          BlDataset** train, BlDataset** test) {
  return guarded([&] {
    require(data && train && test, "dataset and outputs must be non-null");
    *train = *test = nullptr;
    auto parts = split(data->data, SplitSpec{test_fraction, seed});
    auto tr = std::make_unique<BlDataset>(BlDataset{std::move(parts.train)});
    *test = new BlDataset{std::move(parts.test)};
    *train = tr.release();
  });
}

size_t bl_dataset_rows(const BlDataset* data) { return data ? data->data.rows() : 0; }
size_t bl_dataset_cols(const BlDataset* data) { return data ? data->data.cols() : 0; }

BlStatus bl_dataset_labels(const BlDataset* data, uint8_t* out, size_t len) {
  return guarded([&] {
    require(data != nullptr && out != nullptr, "dataset and output must be non-null");
    const auto labels = data->data.labels();
    if (len != labels.size())
      throw Error(ErrorCode::LengthMismatch, "length mismatch: buffer holds " + std::to_string(len) +
                                                 ", dataset has " + std::to_string(labels.size()));
    std::copy(labels.begin(), labels.end(), out);
  });
}

void bl_dataset_free(BlDataset* data) { delete data; }

BlStatus bl_model_train(const char* algo, const BlDataset* train, const BlBoostParams* params,
                        BlModel** out) {
  return guarded([&] {
    require(train != nullptr && out != nullptr, "dataset and output must be non-null");
    *out = nullptr;
    const auto a = algorithm_or_throw(algo);
    const BoostParams p = params ? from_c(*params) : default_params(a);
    *out = new BlModel{fit(a, train->data, p)};
  });
}

BlStatus bl_model_save(const BlModel* model, const char* path) {
  return guarded([&] {
    require(model != nullptr && path != nullptr, "model and path must be non-null");
    save_model(model->model, path);
  });
}

BlStatus bl_model_load(const char* path, BlModel** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "path and output must be non-null");
    *out = nullptr;
    *out = new BlModel{load_model(path)};
  });
}

BlStatus bl_model_schema_json(const BlModel* model, char** out) {
  return guarded([&] {
    require(model != nullptr && out != nullptr, "model and output must be non-null");
    *out = dup_string(schema_to_json(model->model.schema()));
  });
}

const char* bl_model_algorithm(const BlModel* model) {
  if (!model) return "";
  return algorithm_name(model->model.algorithm()).data();
}

BlStatus bl_model_predict_scores(const BlModel* model, const BlDataset* data, double* out,
                                 size_t len) {
  return guarded([&] {
    require(model && data && out, "model, dataset and output must be non-null");
    if (len != data->data.rows())
      throw Error(ErrorCode::LengthMismatch, "length mismatch: buffer holds " + std::to_string(len) +
                                                 ", dataset has " +
                                                 std::to_string(data->data.rows()));
    const auto scores = predict_scores(model->model, data->data);
    std::copy(scores.begin(), scores.end(), out);
  });
}

void bl_model_free(BlModel* model) { delete model; }

BlStatus bl_scores_write(const char* path, const double* scores, size_t n) {
  return guarded([&] {
    require(path != nullptr && (scores != nullptr || n == 0), "path and scores must be non-null");
    std::string text = "score\n";
    for (size_t i = 0; i < n; ++i) {
      text += format_double(scores[i]);
      text += '\n';
    }
    write_file_atomic(path, text);
  });
}

BlStatus bl_scores_read(const char* path, double** out, size_t* n) {
  return guarded([&] {
    require(path && out && n, "path and outputs must be non-null");
    *out = nullptr;
    *n = 0;
    const auto lines = data_lines(read_file(path), path);
    auto* buf = static_cast<double*>(std::malloc(std::max<size_t>(1, lines.size()) * sizeof(double)));
    if (!buf) throw std::bad_alloc();
    for (size_t i = 0; i < lines.size(); ++i) {
      char* end = nullptr;
      buf[i] = std::strtod(lines[i].c_str(), &end);
      if (end == lines[i].c_str() || *end != '\0' || !std::isfinite(buf[i])) {
        std::free(buf);
        throw Error(ErrorCode::MalformedCsv,
                    std::string(path) + ": bad score '" + lines[i] + "' on line " + std::to_string(i + 2));
      }
    }
    *out = buf;
    *n = lines.size();
  });
}

BlStatus bl_truth_read(const char* path, uint8_t** out, size_t* n) {
  return guarded([&] {
    require(path && out && n, "path and outputs must be non-null");
    *out = nullptr;
    *n = 0;
    const auto lines = data_lines(read_file(path), path);
    auto* buf = static_cast<uint8_t*>(std::malloc(std::max<size_t>(1, lines.size())));
    if (!buf) throw std::bad_alloc();
    for (size_t i = 0; i < lines.size(); ++i) {
      if (lines[i] != "0" && lines[i] != "1") {
        std::free(buf);
        throw Error(ErrorCode::LabelNotBinary,
                    std::string(path) + ": label '" + lines[i] + "' is not 0 or 1");
      }
      buf[i] = lines[i] == "1" ? 1 : 0;
    }
    *out = buf;
    *n = lines.size();
  });
}

BlStatus bl_evaluate(const double* scores, const uint8_t* truth, size_t n, double threshold,
                     BlMetrics* out) {
  return guarded([&] {
    require(out != nullptr, "output pointer is null");
    *out = evaluate_impl(scores, truth, n, threshold);
  });
}

BlStatus bl_evaluate_write(const double* scores, const uint8_t* truth, size_t n, double threshold,
                           const char* out_dir, BlMetrics* out) {
  return guarded([&] {
    require(out_dir != nullptr, "output directory is null");
    const BlMetrics m = evaluate_impl(scores, truth, n, threshold);
    std::span<const double> s(scores, n);
    std::span<const std::uint8_t> t(truth, n);
    const auto roc = roc_curve(s, t);
    const auto pr = pr_curve(s, t);
    auto metric = [](double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); };
    const nlohmann::json doc = {
        {"n", n},
        {"threshold", threshold},
        {"confusion", {{"tp", m.tp}, {"fp", m.fp}, {"tn", m.tn}, {"fn", m.fn}}},
        {"metrics", {{"accuracy", metric(m.accuracy)},
                     {"precision", metric(m.precision)},
                     {"recall", metric(m.recall)},
                     {"f_score", metric(m.f_score)},
                     {"specificity", metric(m.specificity)},
                     {"tpr", metric(m.tpr)},
                     {"fpr", metric(m.fpr)}}},
        {"auc", m.auc},
    };
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    write_file_atomic(dir / "metrics.json", doc.dump(2) + "\n");
    write_curve_csv(roc, CurveKind::Roc, dir / "roc.csv");
    write_curve_csv(pr, CurveKind::Pr, dir / "pr.csv");
    if (out) *out = m;
  });
}

BlStatus bl_run_benchmark(const char* config_json, char** report_json, char** table) {
  return guarded([&] {
    require(config_json != nullptr, "config is null");
    if (report_json) *report_json = nullptr;
    if (table) *table = nullptr;
    const auto report = run_benchmark(config_from_json(config_json));
    std::unique_ptr<char, decltype(&std::free)> doc(dup_string(report_to_json(report)), &std::free);
    if (table) *table = dup_string(render_table(report));
    if (report_json) *report_json = doc.release();
  });
}

}  // extern "C"

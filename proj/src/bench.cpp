#include "boostlab/bench.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <future>

#include <json.hpp>

#include "boostlab/error.hpp"
#include "boostlab/io.hpp"
#include "boostlab/serialize.hpp"

namespace boostlab {

using json = nlohmann::json;

namespace {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json metric_json(const Metric& m) { return m ? json(*m) : json(nullptr); }

std::string metric_cell(const Metric& m) {
  if (!m) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", *m);
  return buf;
}

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * v);
  return buf;
}

void seed_everything(BenchmarkConfig& config, std::uint64_t seed) {
  config.split.seed = seed;
  if (auto* synth = std::get_if<SyntheticSource>(&config.source)) synth->options.seed = seed;
  for (auto& p : config.params) p.seed = seed;
}

AlgorithmResult evaluate(Algorithm algo, const TrainTest& parts, const BoostParams& params) {
  const Model model = fit(algo, parts.train, params);
  AlgorithmResult r;
  r.algorithm = algo;
  r.train_accuracy = accuracy(predict_labels(model, parts.train, params.threshold),
                              parts.train.labels());
  const auto scores = predict_scores(model, parts.test);
  std::vector<std::uint8_t> labels(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) labels[i] = scores[i] >= params.threshold ? 1 : 0;
  r.confusion = confusion(labels, parts.test.labels());
  r.test_accuracy = *accuracy(r.confusion);
  r.scores = score_all(r.confusion);
  r.roc = roc_curve(scores, parts.test.labels());
  r.auc = r.roc.auc;
  r.pr = pr_curve(scores, parts.test.labels());
  r.test_row_ids.assign(parts.test.row_ids().begin(), parts.test.row_ids().end());
  return r;
}

}  // namespace

std::string display_name(Algorithm algo) {
  switch (algo) {
    case Algorithm::AdaBoost: return "AdaBoost";
    case Algorithm::Gbm: return "GBM";
    case Algorithm::XgBoost: return "XGBoost";
    case Algorithm::CatBoost: return "CatBoost";
  }
  return "?";
}

BenchmarkConfig paper_preset_config(std::uint64_t seed) {
  BenchmarkConfig config;
  SyntheticSource synth;
  synth.options.n = 250;
  synth.options.signal_strength = 2.0;
  config.source = synth;
  config.split.test_fraction = 48.0 / 250.0;
  for (std::size_t a = 0; a < 4; ++a) config.params[a] = paper_preset_params(kAllAlgorithms[a]);
  seed_everything(config, seed);
  return config;
}

BenchmarkConfig config_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    const std::uint64_t seed = doc.value("seed", std::uint64_t{42});
    const std::string preset = doc.value("preset", std::string("default"));
    BenchmarkConfig config;
    if (preset == "paper") {
      config = paper_preset_config(seed);
    } else if (preset == "default") {
      seed_everything(config, seed);
    } else {
      throw Error(ErrorCode::InvalidArgument, "unknown preset '" + preset + "'");
    }
    if (doc.contains("data")) {
      const auto& data = doc.at("data");
      if (data.contains("csv") == data.contains("synthetic"))
        throw Error(ErrorCode::InvalidArgument, "data needs exactly one of 'csv' or 'synthetic'");
      FeatureSchema schema = pcos_default_schema();
      if (data.contains("schema")) schema = schema_from_json(data.at("schema").dump());
      if (data.contains("csv")) {
        config.source = CsvSource{data.at("csv").get<std::string>(), schema};
      } else {
        SyntheticSource synth;
        if (auto* cur = std::get_if<SyntheticSource>(&config.source)) synth = *cur;
        synth.schema = schema;
        const auto& s = data.at("synthetic");
        synth.options.n = s.value("n", synth.options.n);
        synth.options.signal_strength = s.value("signal_strength", synth.options.signal_strength);
        synth.options.missing_rate = s.value("missing_rate", synth.options.missing_rate);
        synth.options.seed = s.value("seed", synth.options.seed);
        config.source = synth;
      }
    }
    if (doc.contains("split")) {
      const auto& s = doc.at("split");
      config.split.test_fraction = s.value("test_fraction", config.split.test_fraction);
      config.split.seed = s.value("seed", config.split.seed);
    }
    if (doc.contains("params")) {
      for (auto& [name, value] : doc.at("params").items()) {
        const auto algo = parse_algorithm(name);
        if (!algo) throw Error(ErrorCode::InvalidArgument, "unknown algorithm '" + name + "'");
        auto& p = config.params[static_cast<std::size_t>(*algo)];
        p = params_from_json(value, p);
      }
    }
    if (doc.contains("output_dir")) config.output_dir = doc.at("output_dir").get<std::string>();
    config.parallel = doc.value("parallel", config.parallel);
    return config;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("invalid benchmark config: ") + e.what());
  }
}

BenchmarkReport run_benchmark(const BenchmarkConfig& config) {
  for (const auto& p : config.params) p.validate();
  const Dataset data = std::visit(
      [](const auto& src) -> Dataset {
        using T = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<T, SyntheticSource>) {
          return synthesize(src.schema, src.options);
        } else {
          return load_csv(src.path, src.schema);
        }
      },
      config.source);
  const TrainTest parts = split(data, config.split);

  BenchmarkReport report;
  report.seed = config.split.seed;
  report.n_train = parts.train.rows();
  report.n_test = parts.test.rows();
  report.timestamp = utc_timestamp();

  if (config.parallel) {
    std::vector<std::future<AlgorithmResult>> jobs;
    for (std::size_t a = 0; a < 4; ++a)
      jobs.push_back(std::async(std::launch::async, evaluate, kAllAlgorithms[a], std::cref(parts),
                                std::cref(config.params[a])));
    for (auto& j : jobs) report.results.push_back(j.get());
  } else {
    for (std::size_t a = 0; a < 4; ++a)
      report.results.push_back(evaluate(kAllAlgorithms[a], parts, config.params[a]));
  }

  if (!config.output_dir.empty()) {
    std::filesystem::create_directories(config.output_dir);
    const auto& dir = config.output_dir;
    write_file_atomic(dir / "report.json", report_to_json(report));
    write_file_atomic(dir / "table.txt", render_table(report));
    write_file_atomic(dir / "table.csv", render_table_csv(report));
    for (const auto& r : report.results) {
      const std::string name(algorithm_name(r.algorithm));
      write_curve_csv(r.roc, CurveKind::Roc, dir / ("roc_" + name + ".csv"));
      write_curve_csv(r.pr, CurveKind::Pr, dir / ("pr_" + name + ".csv"));
    }
  }
  return report;
}

std::string report_to_json(const BenchmarkReport& report) {
  json algos = json::array();
  for (const auto& r : report.results) {
    algos.push_back({
        {"algorithm", std::string(algorithm_name(r.algorithm))},
        {"train_accuracy", r.train_accuracy},
        {"test_accuracy", r.test_accuracy},
        {"confusion", {{"tp", r.confusion.tp}, {"fp", r.confusion.fp},
                       {"tn", r.confusion.tn}, {"fn", r.confusion.fn}}},
        {"metrics", {{"accuracy", metric_json(r.scores.accuracy)},
                     {"precision", metric_json(r.scores.precision)},
                     {"recall", metric_json(r.scores.recall)},
                     {"f_score", metric_json(r.scores.f_score)},
                     {"specificity", metric_json(r.scores.specificity)},
                     {"tpr", metric_json(r.scores.tpr)},
                     {"fpr", metric_json(r.scores.fpr)}}},
        {"auc", r.auc},
    });
  }
  const std::vector<std::size_t> test_ids =
      report.results.empty() ? std::vector<std::size_t>{} : report.results.front().test_row_ids;
  json doc = {
      {"format_version", 1},
      {"metadata", {{"seed", report.seed}, {"n_train", report.n_train},
                    {"n_test", report.n_test}, {"timestamp", report.timestamp},
                    {"test_row_ids", test_ids}}},
      {"algorithms", algos},
  };
  return doc.dump(2) + "\n";
}

std::string render_table(const BenchmarkReport& report) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-10s %7s %7s %4s %4s %9s %7s %7s %7s\n", "Algorithm",
                "Train%", "Test%", "FN", "FP", "Precision", "Recall", "F-Score", "AUC");
  out += line;
  for (const auto& r : report.results) {
    char auc[32];
    std::snprintf(auc, sizeof(auc), "%.4f", r.auc);
    std::snprintf(line, sizeof(line), "%-10s %7s %7s %4llu %4llu %9s %7s %7s %7s\n",
                  display_name(r.algorithm).c_str(), percent(r.train_accuracy).c_str(),
                  percent(r.test_accuracy).c_str(),
                  static_cast<unsigned long long>(r.confusion.fn),
                  static_cast<unsigned long long>(r.confusion.fp),
                  metric_cell(r.scores.precision).c_str(), metric_cell(r.scores.recall).c_str(),
                  metric_cell(r.scores.f_score).c_str(), auc);
    out += line;
  }
  return out;
}

std::string render_table_csv(const BenchmarkReport& report) {
  std::string out = "algorithm,train_pct,test_pct,fn,fp,precision,recall,f_score,auc\n";
  for (const auto& r : report.results) {
    char auc[32];
    std::snprintf(auc, sizeof(auc), "%.4f", r.auc);
    out += std::string(algorithm_name(r.algorithm)) + ',' + percent(r.train_accuracy) + ',' +
           percent(r.test_accuracy) + ',' + std::to_string(r.confusion.fn) + ',' +
           std::to_string(r.confusion.fp) + ',' + metric_cell(r.scores.precision) + ',' +
           metric_cell(r.scores.recall) + ',' + metric_cell(r.scores.f_score) + ',' + auc + '\n';
  }
  return out;
}

}  // namespace boostlab

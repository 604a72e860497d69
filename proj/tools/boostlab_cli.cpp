// boostlab command-line front end. Talks to the library only through the C API.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "boostlab/c_api.h"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

// Raised for data/model failures; carries the stage for the diagnostic.
struct StageError {
  std::string message;
};

struct DatasetDeleter {
  void operator()(BlDataset* d) const { bl_dataset_free(d); }
};
struct ModelDeleter {
  void operator()(BlModel* m) const { bl_model_free(m); }
};
using DatasetPtr = std::unique_ptr<BlDataset, DatasetDeleter>;
using ModelPtr = std::unique_ptr<BlModel, ModelDeleter>;

void check(BlStatus status, const std::string& stage) {
  if (status != BL_OK) throw StageError{stage + ": " + bl_last_error()};
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("BOOSTLAB_SEED")) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw CLI::ValidationError("BOOSTLAB_SEED", "must be an unsigned integer");
  }
  return 42;
}

std::optional<std::string> read_schema(const std::string& path) {
  if (path.empty()) return std::nullopt;
  std::ifstream in(path);
  if (!in) throw StageError{"read schema: cannot open file '" + path + "'"};
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

DatasetPtr load_data(const std::string& path, const std::optional<std::string>& schema,
                     const std::string& stage) {
  BlDataset* raw = nullptr;
  check(bl_dataset_load_csv(path.c_str(), schema ? schema->c_str() : nullptr, &raw), stage);
  return DatasetPtr(raw);
}

struct ParamFlags {
  std::optional<int> rounds;
  std::optional<double> learning_rate;
  std::optional<int> depth;
  std::optional<double> lambda;
  std::optional<double> gamma;
  std::optional<std::uint64_t> seed;
  std::optional<double> threshold;
  std::string preset = "default";

  void add_to(CLI::App* cmd) {
    cmd->add_option("--rounds", rounds, "Boosting rounds")->check(CLI::NonNegativeNumber);
    cmd->add_option("--learning-rate", learning_rate, "Shrinkage per round");
    cmd->add_option("--depth", depth, "Maximum tree depth");
    cmd->add_option("--lambda", lambda, "L2 leaf regularization");
    cmd->add_option("--gamma", gamma, "Minimum split gain");
    cmd->add_option("--seed", seed, "Random seed (default 42 or $BOOSTLAB_SEED)");
    cmd->add_option("--threshold", threshold, "Decision threshold in (0,1)");
    cmd->add_option("--preset", preset, "Hyperparameter preset")
        ->check(CLI::IsMember({"default", "paper"}));
  }

  BlBoostParams resolve(const std::string& algo) const {
    BlBoostParams p{};
    if (bl_default_params(algo.c_str(), preset == "paper", &p) != BL_OK)
      throw CLI::ValidationError("--algo", bl_last_error());
    if (rounds) p.n_rounds = *rounds;
    if (learning_rate) p.learning_rate = *learning_rate;
    if (depth) p.max_depth = *depth;
    if (lambda) p.lambda = *lambda;
    if (gamma) p.gamma = *gamma;
    p.seed = seed ? *seed : default_seed();
    if (threshold) p.threshold = *threshold;
    if (bl_params_validate(&p) != BL_OK) throw CLI::ValidationError("parameters", bl_last_error());
    return p;
  }
};

int run_train(const std::string& algo, const std::string& data_path, const std::string& schema_path,
              const std::string& model_out, const ParamFlags& flags) {
  const BlBoostParams params = flags.resolve(algo);
  const auto schema = read_schema(schema_path);
  auto data = load_data(data_path, schema, "train: load data");
  BlModel* raw = nullptr;
  check(bl_model_train(algo.c_str(), data.get(), &params, &raw), "train: fit " + algo);
  ModelPtr model(raw);
  check(bl_model_save(model.get(), model_out.c_str()), "train: save model");
  std::cout << "trained " << algo << " on " << bl_dataset_rows(data.get()) << " rows -> "
            << model_out << "\n";
  return 0;
}

int run_predict(const std::string& model_in, const std::string& data_path,
                const std::string& scores_out) {
  BlModel* raw = nullptr;
  check(bl_model_load(model_in.c_str(), &raw), "predict: load model");
  ModelPtr model(raw);
  char* schema_text = nullptr;
  check(bl_model_schema_json(model.get(), &schema_text), "predict: model schema");
  std::string schema(schema_text);
  bl_string_free(schema_text);
  auto data = load_data(data_path, schema, "predict: load data");
  std::vector<double> scores(bl_dataset_rows(data.get()));
  check(bl_model_predict_scores(model.get(), data.get(), scores.data(), scores.size()),
        "predict: score");
  check(bl_scores_write(scores_out.c_str(), scores.data(), scores.size()), "predict: write scores");
  std::cout << "wrote " << scores.size() << " scores -> " << scores_out << "\n";
  return 0;
}

int run_eval(const std::string& scores_path, const std::string& truth_path,
             const std::string& data_path, const std::string& schema_path,
             const std::string& out_dir, double threshold) {
  double* scores = nullptr;
  std::size_t n_scores = 0;
  check(bl_scores_read(scores_path.c_str(), &scores, &n_scores), "eval: read scores");
  std::unique_ptr<double, decltype(&bl_buffer_free)> score_buf(scores, &bl_buffer_free);

  std::vector<std::uint8_t> truth;
  if (!truth_path.empty()) {
    std::uint8_t* labels = nullptr;
    std::size_t n = 0;
    check(bl_truth_read(truth_path.c_str(), &labels, &n), "eval: read truth");
    truth.assign(labels, labels + n);
    bl_buffer_free(labels);
  } else {
    auto data = load_data(data_path, read_schema(schema_path), "eval: load data");
    truth.resize(bl_dataset_rows(data.get()));
    check(bl_dataset_labels(data.get(), truth.data(), truth.size()), "eval: labels");
  }
  if (truth.size() != n_scores)
    throw StageError{"eval: length mismatch: " + std::to_string(n_scores) + " scores vs " +
                     std::to_string(truth.size()) + " labels"};

  BlMetrics m{};
  check(bl_evaluate_write(score_buf.get(), truth.data(), truth.size(), threshold, out_dir.c_str(), &m),
        "eval");
  std::cout << "tp=" << m.tp << " fp=" << m.fp << " tn=" << m.tn << " fn=" << m.fn
            << " auc=" << m.auc << " -> " << out_dir << "\n";
  return 0;
}

int run_compare(const std::string& config_path, const std::string& preset, bool synthetic,
                const std::string& data_path, const std::string& schema_path,
                std::optional<std::uint64_t> seed, std::optional<std::size_t> n,
                std::optional<double> signal, std::optional<double> test_fraction,
                const std::string& out_dir) {
  nlohmann::json config = nlohmann::json::object();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw StageError{"compare: cannot open config '" + config_path + "'"};
    try {
      config = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw StageError{"compare: config '" + config_path + "': " + e.what()};
    }
  }
  if (!config.contains("preset") || preset != "default") config["preset"] = preset;
  if (seed || !config.contains("seed")) config["seed"] = seed ? *seed : default_seed();
  if (!data_path.empty()) {
    config["data"] = {{"csv", data_path}};
  } else if (synthetic || n || signal) {
    nlohmann::json synth = nlohmann::json::object();
    if (n) synth["n"] = *n;
    if (signal) synth["signal_strength"] = *signal;
    config["data"] = {{"synthetic", synth}};
  }
  if (const auto schema = read_schema(schema_path)) {
    if (!config.contains("data")) config["data"] = {{"synthetic", nlohmann::json::object()}};
    config["data"]["schema"] = nlohmann::json::parse(*schema);
  }
  if (test_fraction) config["split"]["test_fraction"] = *test_fraction;
  config["output_dir"] = out_dir;

  char* table = nullptr;
  check(bl_run_benchmark(config.dump().c_str(), nullptr, &table), "compare");
  std::cout << table;
  bl_string_free(table);
  return 0;
}

int run_synth(const std::string& schema_path, std::size_t n, std::optional<std::uint64_t> seed,
              double signal, double missing_rate, const std::string& out) {
  const auto schema = read_schema(schema_path);
  BlDataset* raw = nullptr;
  check(bl_dataset_synthesize(schema ? schema->c_str() : nullptr, n, seed ? *seed : default_seed(),
                              signal, missing_rate, &raw),
        "synth");
  DatasetPtr data(raw);
  check(bl_dataset_write_csv(data.get(), out.c_str()), "synth: write");
  std::cout << "wrote " << n << " rows -> " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"boostlab: boosting ensembles and binary-classification metrics"};
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "Fit one booster and save it as JSON");
  std::string algo;
  std::string train_data;
  std::string train_schema;
  std::string model_out;
  ParamFlags train_flags;
  train->add_option("--algo", algo, "adaboost | gbm | xgboost | catboost")
      ->required()
      ->check(CLI::IsMember({"adaboost", "gbm", "xgboost", "catboost"}));
  train->add_option("--data", train_data, "Training CSV")->required();
  train->add_option("--schema", train_schema, "Schema JSON (default: PCOS schema)");
  train->add_option("--model-out", model_out, "Model output path")->required();
  train_flags.add_to(train);

  // predict
  auto* predict = app.add_subcommand("predict", "Score a CSV with a saved model");
  std::string model_in;
  std::string predict_data;
  std::string scores_out;
  predict->add_option("--model", model_in, "Model JSON")->required();
  predict->add_option("--data", predict_data, "CSV to score")->required();
  predict->add_option("--scores-out", scores_out, "Scores CSV output")->required();

  // eval
  auto* eval = app.add_subcommand("eval", "Confusion matrix, metrics, ROC and PR curves");
  std::string eval_scores;
  std::string eval_truth;
  std::string eval_data;
  std::string eval_schema;
  std::string eval_out;
  double eval_threshold = 0.5;
  eval->add_option("--scores", eval_scores, "Scores CSV (header 'score')")->required();
  auto* truth_opt = eval->add_option("--truth", eval_truth, "Truth CSV (one 0/1 label per line)");
  auto* data_opt = eval->add_option("--data", eval_data, "Dataset CSV supplying the labels");
  truth_opt->excludes(data_opt);
  eval->add_option("--schema", eval_schema, "Schema JSON for --data");
  eval->add_option("--out", eval_out, "Output directory")->required();
  eval->add_option("--threshold", eval_threshold, "Decision threshold")->check(CLI::Range(0.0, 1.0));

  // compare
  auto* compare = app.add_subcommand("compare", "Run all four boosters on one shared split");
  std::string compare_config;
  std::string compare_preset = "default";
  bool compare_synthetic = false;
  std::string compare_data;
  std::string compare_schema;
  std::optional<std::uint64_t> compare_seed;
  std::optional<std::size_t> compare_n;
  std::optional<double> compare_signal;
  std::optional<double> compare_fraction;
  std::string compare_out;
  compare->add_option("--config", compare_config, "Benchmark config JSON");
  compare->add_option("--preset", compare_preset, "default | paper")
      ->check(CLI::IsMember({"default", "paper"}));
  auto* synth_flag = compare->add_flag("--synthetic", compare_synthetic, "Use synthetic data");
  auto* compare_data_opt = compare->add_option("--data", compare_data, "CSV data source");
  synth_flag->excludes(compare_data_opt);
  compare->add_option("--schema", compare_schema, "Schema JSON");
  compare->add_option("--seed", compare_seed, "Seed for data, split and models");
  compare->add_option("--n", compare_n, "Synthetic row count")->check(CLI::PositiveNumber);
  compare->add_option("--signal", compare_signal, "Synthetic signal strength")
      ->check(CLI::NonNegativeNumber);
  compare->add_option("--test-fraction", compare_fraction, "Test split fraction")
      ->check(CLI::Range(0.0, 1.0));
  compare->add_option("--out", compare_out, "Output directory")->required();

  // synth
  auto* synth = app.add_subcommand("synth", "Write a synthetic PCOS-style dataset");
  std::string synth_schema;
  std::size_t synth_n = 200;
  std::optional<std::uint64_t> synth_seed;
  double synth_signal = 2.0;
  double synth_missing = 0.0;
  std::string synth_out;
  synth->add_option("--schema", synth_schema, "Schema JSON (default: PCOS schema)");
  synth->add_option("--n", synth_n, "Row count")->check(CLI::Range(2, 100000000));
  synth->add_option("--seed", synth_seed, "Seed (default 42 or $BOOSTLAB_SEED)");
  synth->add_option("--signal", synth_signal, "Signal strength")->check(CLI::NonNegativeNumber);
  synth->add_option("--missing-rate", synth_missing, "Fraction of numeric cells left missing")
      ->check(CLI::Range(0.0, 0.999));
  synth->add_option("--out", synth_out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*train) return run_train(algo, train_data, train_schema, model_out, train_flags);
    if (*predict) return run_predict(model_in, predict_data, scores_out);
    if (*eval) {
      if (eval_truth.empty() && eval_data.empty())
        throw CLI::ValidationError("eval", "one of --truth or --data is required");
      return run_eval(eval_scores, eval_truth, eval_data, eval_schema, eval_out, eval_threshold);
    }
    if (*compare)
      return run_compare(compare_config, compare_preset, compare_synthetic, compare_data,
                         compare_schema, compare_seed, compare_n, compare_signal, compare_fraction,
                         compare_out);
    if (*synth) return run_synth(synth_schema, synth_n, synth_seed, synth_signal, synth_missing, synth_out);
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const StageError& e) {
    std::cerr << "error: " << e.message << "\n";
    return kExitData;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: invalid JSON input: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

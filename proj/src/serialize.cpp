#include "boostlab/serialize.hpp"

#include "boostlab/error.hpp"
#include "boostlab/io.hpp"

namespace boostlab {

using json = nlohmann::json;

namespace {

json split_json(const SplitTest& t) {
  return {{"feature", t.feature}, {"threshold", t.threshold}, {"categorical", t.categorical}};
}

SplitTest split_from(const json& doc) {
  return {doc.at("feature").get<int>(), doc.at("threshold").get<double>(),
          doc.at("categorical").get<bool>()};
}

template <class M>
json ensemble_body(const M& m) {
  json trees = json::array();
  for (const auto& t : m.trees) trees.push_back(to_json(t));
  return {{"base_score", m.base_score}, {"learning_rate", m.learning_rate}, {"trees", trees}};
}

}  // namespace

json to_json(const Stump& stump) {
  return {{"split", split_json(stump.test)},
          {"left_class", stump.left_class},
          {"right_class", stump.right_class}};
}

Stump stump_from_json(const json& doc) {
  Stump s;
  s.test = split_from(doc.at("split"));
  s.left_class = doc.at("left_class").get<int>();
  s.right_class = doc.at("right_class").get<int>();
  auto valid = [](int c) { return c == -1 || c == 1; };
  if (!valid(s.left_class) || !valid(s.right_class))
    throw Error(ErrorCode::InvalidModel, "stump classes must be -1 or +1");
  return s;
}

json to_json(const RegressionTree& tree) {
  json nodes = json::array();
  for (const auto& n : tree.nodes()) {
    if (n.is_leaf()) {
      nodes.push_back({{"leaf", true},
                       {"value", n.value},
                       {"grad_sum", n.grad_sum},
                       {"hess_sum", n.hess_sum}});
    } else {
      nodes.push_back({{"leaf", false},
                       {"feature", n.feature},
                       {"threshold", n.threshold},
                       {"categorical", n.categorical},
                       {"default_direction", n.default_left ? "left" : "right"},
                       {"left", n.left},
                       {"right", n.right},
                       {"value", n.value},
                       {"grad_sum", n.grad_sum},
                       {"hess_sum", n.hess_sum}});
    }
  }
  return {{"depth", tree.depth()}, {"nodes", nodes}};
}

RegressionTree regression_tree_from_json(const json& doc) {
  std::vector<TreeNode> nodes;
  for (const auto& j : doc.at("nodes")) {
    TreeNode n;
    n.value = j.at("value").get<double>();
    n.grad_sum = j.value("grad_sum", 0.0);
    n.hess_sum = j.value("hess_sum", 0.0);
    if (!j.at("leaf").get<bool>()) {
      n.feature = j.at("feature").get<int>();
      if (n.feature < 0) throw Error(ErrorCode::InvalidModel, "negative split feature");
      n.threshold = j.at("threshold").get<double>();
      n.categorical = j.at("categorical").get<bool>();
      const auto dir = j.at("default_direction").get<std::string>();
      if (dir != "left" && dir != "right")
        throw Error(ErrorCode::InvalidModel, "default_direction must be left or right");
      n.default_left = dir == "left";
      n.left = j.at("left").get<int>();
      n.right = j.at("right").get<int>();
    }
    nodes.push_back(n);
  }
  return RegressionTree(std::move(nodes));
}

json to_json(const ObliviousTree& tree) {
  json levels = json::array();
  for (const auto& t : tree.levels()) levels.push_back(split_json(t));
  return {{"depth", tree.depth()}, {"levels", levels}, {"leaf_values", tree.leaf_values()}};
}

ObliviousTree oblivious_tree_from_json(const json& doc) {
  std::vector<SplitTest> levels;
  for (const auto& l : doc.at("levels")) levels.push_back(split_from(l));
  return ObliviousTree(std::move(levels), doc.at("leaf_values").get<std::vector<double>>());
}

json to_json(const BoostParams& p) {
  return {{"n_rounds", p.n_rounds},
          {"learning_rate", p.learning_rate},
          {"max_depth", p.max_depth},
          {"lambda", p.lambda},
          {"gamma", p.gamma},
          {"min_child_weight", p.min_child_weight},
          {"seed", p.seed},
          {"cat_one_hot_max", p.cat_one_hot_max},
          {"cat_prior", p.cat_prior},
          {"threshold", p.threshold}};
}

BoostParams params_from_json(const json& doc, const BoostParams& defaults) {
  BoostParams p = defaults;
  p.n_rounds = doc.value("n_rounds", p.n_rounds);
  p.learning_rate = doc.value("learning_rate", p.learning_rate);
  p.max_depth = doc.value("max_depth", p.max_depth);
  p.lambda = doc.value("lambda", p.lambda);
  p.gamma = doc.value("gamma", p.gamma);
  p.min_child_weight = doc.value("min_child_weight", p.min_child_weight);
  p.seed = doc.value("seed", p.seed);
  p.cat_one_hot_max = doc.value("cat_one_hot_max", p.cat_one_hot_max);
  p.cat_prior = doc.value("cat_prior", p.cat_prior);
  p.threshold = doc.value("threshold", p.threshold);
  p.validate();
  return p;
}

std::string model_to_json(const Model& model) {
  json doc;
  doc["format_version"] = kModelFormatVersion;
  doc["algorithm"] = std::string(algorithm_name(model.algorithm()));
  doc["params"] = to_json(model.params());
  doc["schema"] = json::parse(schema_to_json(model.schema()));
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, AdaBoostModel>) {
          json stumps = json::array();
          for (const auto& ws : m.stumps) {
            auto s = to_json(ws.stump);
            s["alpha"] = ws.alpha;
            stumps.push_back(std::move(s));
          }
          doc["base_score"] = 0.0;
          doc["stumps"] = std::move(stumps);
        } else {
          doc.update(ensemble_body(m));
        }
        if constexpr (std::is_same_v<T, CatBoostModel>) {
          json features = json::array();
          for (const auto& f : m.encoding.features) {
            json fj = {{"feature", f.feature},
                       {"cardinality", f.cardinality},
                       {"mode", f.mode == CatMode::OneHot ? "one_hot" : "target_statistic"}};
            if (f.mode == CatMode::TargetStatistic) {
              fj["positives"] = f.positives;
              fj["totals"] = f.totals;
            }
            features.push_back(std::move(fj));
          }
          doc["cat_encoding_state"] = {{"prior", m.encoding.prior}, {"features", features}};
        } else {
          doc["cat_encoding_state"] = nullptr;
        }
      },
      model.variant());
  return doc.dump(2) + "\n";
}

Model model_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    const int version = doc.at("format_version").get<int>();
    if (version != kModelFormatVersion)
      throw Error(ErrorCode::InvalidModel, "unsupported model format_version " + std::to_string(version));
    const auto name = doc.at("algorithm").get<std::string>();
    const auto algo = parse_algorithm(name);
    if (!algo) throw Error(ErrorCode::InvalidModel, "unknown algorithm '" + name + "'");
    const auto schema = schema_from_json(doc.at("schema").dump());
    const auto params = params_from_json(doc.at("params"), default_params(*algo));

    auto read_ensemble = [&](auto& m) {
      m.schema = schema;
      m.params = params;
      m.base_score = doc.at("base_score").get<double>();
      m.learning_rate = doc.at("learning_rate").get<double>();
    };

    switch (*algo) {
      case Algorithm::AdaBoost: {
        AdaBoostModel m;
        m.schema = schema;
        m.params = params;
        for (const auto& s : doc.at("stumps"))
          m.stumps.push_back({stump_from_json(s), s.at("alpha").get<double>()});
        return m;
      }
      case Algorithm::Gbm:
      case Algorithm::XgBoost: {
        TreeEnsembleModel m;
        read_ensemble(m);
        for (const auto& t : doc.at("trees")) m.trees.push_back(regression_tree_from_json(t));
        if (*algo == Algorithm::Gbm) return GbmModel{std::move(m)};
        return XgbModel{std::move(m)};
      }
      case Algorithm::CatBoost: {
        CatBoostModel m;
        read_ensemble(m);
        for (const auto& t : doc.at("trees")) m.trees.push_back(oblivious_tree_from_json(t));
        const auto& st = doc.at("cat_encoding_state");
        m.encoding.prior = st.at("prior").get<double>();
        for (const auto& fj : st.at("features")) {
          CatFeatureEncoding f;
          f.feature = fj.at("feature").get<int>();
          f.cardinality = fj.at("cardinality").get<int>();
          const auto mode = fj.at("mode").get<std::string>();
          if (mode == "one_hot") {
            f.mode = CatMode::OneHot;
          } else if (mode == "target_statistic") {
            f.mode = CatMode::TargetStatistic;
            f.positives = fj.at("positives").get<std::vector<double>>();
            f.totals = fj.at("totals").get<std::vector<double>>();
          } else {
            throw Error(ErrorCode::InvalidModel, "unknown categorical mode '" + mode + "'");
          }
          if (f.feature < 0 || static_cast<std::size_t>(f.feature) >= schema.size() ||
              !schema[f.feature].kind.is_categorical())
            throw Error(ErrorCode::InvalidModel, "encoding refers to a non-categorical column");
          m.encoding.features.push_back(std::move(f));
        }
        return m;
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidModel, std::string("invalid model JSON: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidArgument) throw Error(ErrorCode::InvalidModel, e.what());
    throw;
  }
  throw Error(ErrorCode::InvalidModel, "unreachable algorithm");
}

void save_model(const Model& model, const std::filesystem::path& path) {
  write_file_atomic(path, model_to_json(model));
}

Model load_model(const std::filesystem::path& path) { return model_from_json(read_file(path)); }

}  // namespace boostlab

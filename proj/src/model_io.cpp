#include "metamat/model_io.hpp"

#include <algorithm>
#include <stdexcept>

#include "json.hpp"

namespace metamat::regress {

namespace {

constexpr int kFormatVersion = 1;

using json = nlohmann::ordered_json;

json tree_to_json(const RegressionTree& tree) {
  json nodes = json::array();
  for (const auto& n : tree.nodes)
    nodes.push_back({{"feature", n.feature},
                     {"threshold", n.threshold},
                     {"left", n.left},
                     {"right", n.right},
                     {"value", n.value}});
  return nodes;
}

RegressionTree tree_from_json(const nlohmann::json& nodes) {
  RegressionTree tree;
  for (const auto& n : nodes) {
    TreeNode node;
    node.feature = n.at("feature").get<int>();
    node.threshold = n.at("threshold").get<double>();
    node.left = n.at("left").get<int>();
    node.right = n.at("right").get<int>();
    node.value = n.at("value").get<double>();
    tree.nodes.push_back(node);
  }
  return tree;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& rows) {
  const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index c =
      r > 0 ? static_cast<Eigen::Index>(rows[0].size()) : 0;
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rows[i][j].get<double>();
  return m;
}

}  // namespace

std::string model_kind(const AnyModel& model) {
  if (std::holds_alternative<PolyLinearModel>(model)) return "poly";
  if (std::holds_alternative<ForestModel>(model)) return "forest";
  return "mlp";
}

double predict(const AnyModel& model, const std::array<double, 3>& features) {
  return std::visit([&](const auto& m) { return m.predict(features); }, model);
}

double predict(const SavedModel& saved, const std::array<double, 3>& features) {
  if (saved.scaler)
    return predict(saved.model, saved.scaler->transform(features));
  return predict(saved.model, features);
}

std::string model_to_json(const SavedModel& saved) {
  json j;
  j["format_version"] = kFormatVersion;
  j["model"] = model_kind(saved.model);
  j["target"] = dataset::target_name(saved.target);

  if (const auto* poly = std::get_if<PolyLinearModel>(&saved.model)) {
    j["degree"] = poly->degree;
    j["coefficients"] = poly->coefficients;
    j["rank_deficient"] = poly->rank_deficient;
  } else if (const auto* forest = std::get_if<ForestModel>(&saved.model)) {
    j["max_depth"] = forest->config.max_depth;
    j["n_estimators"] = forest->config.n_estimators;
    j["seed"] = forest->config.seed;
    j["bootstrap"] = forest->config.bootstrap;
    json trees = json::array();
    for (const auto& tree : forest->trees) trees.push_back(tree_to_json(tree));
    j["trees"] = std::move(trees);
  } else if (const auto* mlp = std::get_if<MlpModel>(&saved.model)) {
    const auto& cfg = mlp->config;
    j["layers"] = {cfg.input_dim, cfg.hidden1, cfg.hidden2, 1};
    j["optimizer"] = cfg.optimizer == OptimizerKind::adam ? "adam" : "sgd";
    j["learning_rate"] = cfg.learning_rate;
    j["weight_decay"] = cfg.weight_decay;
    j["epochs"] = cfg.epochs;
    j["batch_size"] = cfg.batch_size;
    j["seed"] = cfg.seed;
    j["w1"] = matrix_to_json(mlp->w1);
    j["b1"] = matrix_to_json(mlp->b1);
    j["w2"] = matrix_to_json(mlp->w2);
    j["b2"] = matrix_to_json(mlp->b2);
    j["w3"] = matrix_to_json(mlp->w3);
    j["b3"] = matrix_to_json(mlp->b3);
  }
  if (saved.scaler) {
    j["scaler"] = {{"mean", saved.scaler->mean}, {"sigma", saved.scaler->sigma}};
  }
  return j.dump(2);
}

SavedModel model_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("model JSON: ") + e.what());
  }
  if (j.at("format_version").get<int>() != kFormatVersion)
    throw std::invalid_argument("model JSON: unsupported format version");

  SavedModel saved;
  saved.target = dataset::target_from_name(j.at("target").get<std::string>());
  const std::string kind = j.at("model").get<std::string>();

  if (kind == "poly") {
    PolyLinearModel poly;
    poly.degree = j.at("degree").get<int>();
    poly.coefficients = j.at("coefficients").get<std::vector<double>>();
    poly.rank_deficient = j.at("rank_deficient").get<bool>();
    const auto expected = monomial_exponents(poly.degree).size();
    if (poly.coefficients.size() != expected)
      throw std::invalid_argument("model JSON: coefficient count mismatch");
    saved.model = std::move(poly);
  } else if (kind == "forest") {
    ForestModel forest;
    forest.config.max_depth = j.at("max_depth").get<int>();
    forest.config.n_estimators = j.at("n_estimators").get<int>();
    forest.config.seed = j.at("seed").get<std::uint64_t>();
    forest.config.bootstrap = j.at("bootstrap").get<bool>();
    for (const auto& tree : j.at("trees"))
      forest.trees.push_back(tree_from_json(tree));
    if (forest.trees.empty())
      throw std::invalid_argument("model JSON: forest has no trees");
    saved.model = std::move(forest);
  } else if (kind == "mlp") {
    MlpModel mlp;
    const auto layers = j.at("layers").get<std::vector<int>>();
    if (layers.size() != 4)
      throw std::invalid_argument("model JSON: mlp expects 4 layer sizes");
    mlp.config.input_dim = layers[0];
    mlp.config.hidden1 = layers[1];
    mlp.config.hidden2 = layers[2];
    mlp.config.optimizer = j.at("optimizer").get<std::string>() == "sgd"
                               ? OptimizerKind::sgd
                               : OptimizerKind::adam;
    mlp.config.learning_rate = j.at("learning_rate").get<double>();
    mlp.config.weight_decay = j.at("weight_decay").get<double>();
    mlp.config.epochs = j.at("epochs").get<int>();
    mlp.config.batch_size = j.at("batch_size").get<int>();
    mlp.config.seed = j.at("seed").get<std::uint64_t>();
    mlp.w1 = matrix_from_json(j.at("w1"));
    mlp.b1 = matrix_from_json(j.at("b1"));
    mlp.w2 = matrix_from_json(j.at("w2"));
    mlp.b2 = matrix_from_json(j.at("b2"));
    mlp.w3 = matrix_from_json(j.at("w3"));
    mlp.b3 = matrix_from_json(j.at("b3"));
    saved.model = std::move(mlp);
  } else {
    throw std::invalid_argument("model JSON: unknown model kind '" + kind +
                                "'");
  }

  if (j.contains("scaler")) {
    dataset::Scaler scaler;
    const auto mean = j["scaler"].at("mean").get<std::vector<double>>();
    const auto sigma = j["scaler"].at("sigma").get<std::vector<double>>();
    if (mean.size() != 3 || sigma.size() != 3)
      throw std::invalid_argument("model JSON: scaler must have 3 features");
    std::copy(mean.begin(), mean.end(), scaler.mean.begin());
    std::copy(sigma.begin(), sigma.end(), scaler.sigma.begin());
    saved.scaler = scaler;
  }
  return saved;
}

std::string metrics_json(const std::string& model, const std::string& target,
                         const std::string& split, const Metrics& m) {
  json j;
  j["model"] = model;
  j["target"] = target;
  j["split"] = split;
  j["rmse"] = m.rmse;
  j["r2"] = m.r2;
  j["n"] = m.n;
  return j.dump(2);
}

}  // namespace metamat::regress

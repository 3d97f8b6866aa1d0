// metamat: band-gap analysis, Shapley-value parameter ranking, and surrogate
// model training for 1D layered metamaterials.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "metamat/dataset.hpp"
#include "metamat/dispersion.hpp"
#include "metamat/game.hpp"
#include "metamat/metrics.hpp"
#include "metamat/model_io.hpp"
#include "metamat/num_format.hpp"
#include "metamat/parallel.hpp"
#include "metamat/sensitivity.hpp"
#include "metamat/tune.hpp"

namespace fs = std::filesystem;
using namespace metamat;

namespace {

// Argument/config problems exit with code 2; runtime failures with 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GlobalOpts {
  std::uint64_t seed = 42;
  unsigned jobs = 0;  // 0 = hardware
  std::string out_dir = ".";
};

std::string out_path(const GlobalOpts& g, const std::string& name,
                     const std::string& explicit_path) {
  if (!explicit_path.empty()) return explicit_path;
  return (fs::path(g.out_dir) / name).string();
}

void write_text_file(const std::string& path, const std::string& text) {
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << text;
}

dispersion::ParameterRatios parse_ratios(const std::string& text) {
  std::vector<double> parts;
  std::string field;
  std::istringstream in(text);
  while (std::getline(in, field, ',')) {
    double v = 0.0;
    if (!try_parse_double(field, v))
      throw UsageError("bad ratio value '" + field + "' in '" + text + "'");
    parts.push_back(v);
  }
  if (parts.size() != 3)
    throw UsageError("ratios must be E,RHO,H (got '" + text + "')");
  dispersion::ParameterRatios r{parts[0], parts[1], parts[2]};
  if (!(r.e_ratio > 0 && r.rho_ratio > 0 && r.h_ratio > 0))
    throw UsageError("ratios must be strictly positive (got '" + text + "')");
  return r;
}

// Axis syntax: an explicit list "0.1,1,3" or a range "lo:hi:n[:log]".
std::vector<double> parse_axis(const std::string& text,
                               const std::string& field_name) {
  if (text.empty()) throw UsageError("empty axis for " + field_name);
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::string piece;
    std::istringstream in(text);
    while (std::getline(in, piece, ':')) parts.push_back(piece);
    if (parts.size() != 3 && parts.size() != 4)
      throw UsageError(field_name + ": range axis must be lo:hi:n[:log]");
    dataset::GridAxis axis;
    if (!try_parse_double(parts[0], axis.lo) ||
        !try_parse_double(parts[1], axis.hi))
      throw UsageError(field_name + ": bad range bounds in '" + text + "'");
    try {
      axis.count = std::stoi(parts[2]);
    } catch (...) {
      throw UsageError(field_name + ": bad count in '" + text + "'");
    }
    axis.log_scale = parts.size() == 4 && parts[3] == "log";
    if (parts.size() == 4 && parts[3] != "log")
      throw UsageError(field_name + ": unknown scale '" + parts[3] + "'");
    try {
      return dataset::grid_axis_values(axis);
    } catch (const std::exception& e) {
      throw UsageError(field_name + ": " + e.what());
    }
  }
  std::vector<double> values;
  std::string field;
  std::istringstream in(text);
  while (std::getline(in, field, ',')) {
    double v = 0.0;
    if (!try_parse_double(field, v))
      throw UsageError(field_name + ": bad value '" + field + "'");
    values.push_back(v);
  }
  for (std::size_t i = 0; i + 1 < values.size(); ++i)
    if (!(values[i] < values[i + 1]))
      throw UsageError(field_name + ": values must be strictly increasing");
  if (values.empty()) throw UsageError("empty axis for " + field_name);
  return values;
}

dataset::GridAxis parse_grid_axis(const std::string& text,
                                  const std::string& field_name) {
  std::vector<std::string> parts;
  std::string piece;
  std::istringstream in(text);
  while (std::getline(in, piece, ':')) parts.push_back(piece);
  if (parts.size() != 3 && parts.size() != 4)
    throw UsageError(field_name + ": grid must be lo:hi:n[:log]");
  dataset::GridAxis axis;
  if (!try_parse_double(parts[0], axis.lo) ||
      !try_parse_double(parts[1], axis.hi))
    throw UsageError(field_name + ": bad bounds in '" + text + "'");
  try {
    axis.count = std::stoi(parts[2]);
  } catch (...) {
    throw UsageError(field_name + ": bad count in '" + text + "'");
  }
  axis.log_scale = parts.size() == 4 && parts[3] == "log";
  return axis;
}

nlohmann::ordered_json shapley_json(const game::CooperativeGame& g,
                                    const game::ShapleyResult& result) {
  nlohmann::ordered_json j;
  j["players"] = g.players();
  nlohmann::ordered_json values;
  for (int i = 0; i < g.player_count(); ++i)
    values[g.players()[i]] = result.values[i];
  j["shapley"] = values;
  j["total"] = result.total;
  if (result.dominance_pct) {
    nlohmann::ordered_json pct;
    for (int i = 0; i < g.player_count(); ++i)
      pct[g.players()[i]] = (*result.dominance_pct)[i];
    j["dominance_pct"] = pct;
  } else {
    j["dominance_pct"] = nullptr;
  }
  nlohmann::ordered_json tiers = nlohmann::ordered_json::array();
  for (const auto& tier : result.ranking) {
    nlohmann::ordered_json names = nlohmann::ordered_json::array();
    for (int i : tier) names.push_back(g.players()[i]);
    tiers.push_back(names);
  }
  j["ranking"] = tiers;

  const auto label = game::dominance(result);
  switch (label.kind) {
    case game::DominanceLabel::Kind::none:
      j["label"] = "NONE";
      break;
    case game::DominanceLabel::Kind::dominant:
      j["label"] = g.players()[label.members.front()];
      break;
    case game::DominanceLabel::Kind::tie: {
      std::string s = "TIE:";
      for (std::size_t i = 0; i < label.members.size(); ++i) {
        if (i) s += '+';
        s += g.players()[label.members[i]];
      }
      j["label"] = s;
      break;
    }
  }
  return j;
}

game::CooperativeGame demo_game(const std::string& name) {
  if (name == "report-writing")
    return game::CooperativeGame({"A", "B", "C"},
                                 {0, 20, 27, 55, 35, 62, 74, 100});
  if (name == "non-superadditive")
    return game::CooperativeGame({"A", "B", "C"},
                                 {0, 20, 27, 10, 35, 17, 74, 70});
  if (name == "two-player")
    return game::CooperativeGame({"B", "C"}, {0, 27, 35, 74});
  throw UsageError("unknown demo '" + name +
                   "' (report-writing | non-superadditive | two-player)");
}

double demo_quadratic(double x1, double x2) {
  return 3.0 * x1 * x1 + x2 * x2 - x1 * x2;
}

dataset::Dataset load_and_split(const std::string& path, double test_frac,
                                double val_frac, std::uint64_t seed) {
  auto ds = dataset::import_csv(path);
  if (ds.samples.empty())
    throw std::runtime_error("dataset is empty: " + path);
  dataset::split(ds, test_frac, val_frac, seed);
  return ds;
}

const std::vector<std::size_t>& split_indices(const dataset::Dataset& ds,
                                              const std::string& name) {
  if (name == "train") return ds.splits->train;
  if (name == "val") return ds.splits->val;
  if (name == "test") return ds.splits->test;
  throw UsageError("unknown split '" + name + "'");
}

// ---------------------------------------------------------------------------
// command implementations
// ---------------------------------------------------------------------------

struct BandArgs {
  std::string ratios;
  double e2 = dispersion::kRubber.youngs_modulus_pa;
  double rho2 = dispersion::kRubber.density_kg_m3;
  double omega_max = 0.0;
  int samples = 4096;
  double edge_tol = 1e-9;
  int doublings = 3;
  std::string csv_path, json_path;
};

int run_band(const GlobalOpts& g, const BandArgs& args, bool write_band) {
  const auto ratios = parse_ratios(args.ratios);
  const dispersion::MaterialLayer stock{args.e2, args.rho2, 1.0};
  dispersion::ScanSettings settings{args.omega_max, args.samples,
                                    args.edge_tol, args.doublings};
  const auto report = dispersion::qois(ratios, stock, settings);

  const std::string json = dispersion::gap_report_json(report) + "\n";
  if (write_band) {
    const auto cell = dispersion::make_cell(ratios, stock);
    std::ostringstream csv;
    dispersion::write_band_csv(csv, cell, report.omega_max_searched,
                               args.samples);
    write_text_file(out_path(g, "band.csv", args.csv_path), csv.str());
    write_text_file(out_path(g, "gaps.json", args.json_path), json);
  }
  std::cout << json;
  return 0;
}

struct ShapleyArgs {
  std::string demo, game_path, json_path;
  bool modify = false;
  double tie_tol = 1e-9;
};

int run_shapley(const ShapleyArgs& args) {
  if (args.demo.empty() == args.game_path.empty())
    throw UsageError("shapley needs exactly one of --demo or --game");
  game::CooperativeGame the_game =
      args.demo.empty() ? [&] {
        std::ifstream in(args.game_path);
        if (!in) throw std::runtime_error("cannot open " + args.game_path);
        std::stringstream buf;
        buf << in.rdbuf();
        return game::game_from_json(buf.str());
      }()
                        : demo_game(args.demo);

  nlohmann::ordered_json j;
  const auto check = game::is_superadditive(the_game);
  j["superadditive"] = check.holds;
  nlohmann::ordered_json viol = nlohmann::ordered_json::array();
  for (const auto& [a, b] : check.violations) {
    auto members = [&](game::Coalition mask) {
      nlohmann::ordered_json names = nlohmann::ordered_json::array();
      for (int i = 0; i < the_game.player_count(); ++i)
        if (mask & (game::Coalition{1} << i))
          names.push_back(the_game.players()[i]);
      return names;
    };
    nlohmann::ordered_json pair = nlohmann::ordered_json::array();
    pair.push_back(members(a));
    pair.push_back(members(b));
    viol.push_back(pair);
  }
  j["violations"] = viol;
  j["modified"] = args.modify;

  const auto analyzed =
      args.modify ? game::monotone_modify(the_game) : the_game;
  const auto result = game::shapley_values(analyzed, args.tie_tol);
  j.update(shapley_json(analyzed, result));

  const std::string text = j.dump(2) + "\n";
  std::cout << text;
  if (!args.json_path.empty()) write_text_file(args.json_path, text);
  return 0;
}

struct DominanceArgs {
  std::string mode = "bragg";
  std::string e_axis, rho_axis, h_axis;
  std::string base = "0.1,0.1,0.1";
  std::string direction = "decrease";
  std::string qoi = "cutoff";
  std::string table_path;
  double range_lo = 0.0, range_hi = 10.0, step = 0.1;
  double tie_tol = 1e-9;
  std::string out_csv;
};

int run_dominance(const GlobalOpts& g, const DominanceArgs& args) {
  if (args.mode == "continuous") {
    std::ostringstream csv;
    csv << "x1,x2,label,phi_x1,phi_x2,dom_x1_pct,dom_x2_pct\n";
    const int steps = static_cast<int>(
        std::round((args.range_hi - args.range_lo) / args.step));
    for (int i = 0; i <= steps; ++i) {
      for (int k = 0; k <= steps; ++k) {
        const double x1 = args.range_lo + args.step * i;
        const double x2 = args.range_lo + args.step * k;
        const auto result = sensitivity::continuous_shapley(
            demo_quadratic, {x1, x2}, {0.0, 0.0}, args.tie_tol);
        const auto label = game::dominance(result);
        std::string name = "NONE";
        if (label.kind == game::DominanceLabel::Kind::dominant)
          name = label.members[0] == 0 ? "X1" : "X2";
        else if (label.kind == game::DominanceLabel::Kind::tie)
          name = "TIE:X1+X2";
        csv << format_double(x1) << ',' << format_double(x2) << ',' << name
            << ',' << format_double(result.values[0]) << ','
            << format_double(result.values[1]);
        if (result.dominance_pct)
          csv << ',' << format_double((*result.dominance_pct)[0]) << ','
              << format_double((*result.dominance_pct)[1]);
        else
          csv << ",,";
        csv << '\n';
      }
    }
    write_text_file(out_path(g, "dominance.csv", args.out_csv), csv.str());
    return 0;
  }

  if (args.mode != "bragg" && args.mode != "lookup")
    throw UsageError("unknown dominance mode '" + args.mode + "'");

  sensitivity::SweepSpec spec;
  spec.axes[0] = parse_axis(args.e_axis, "e-axis");
  spec.axes[1] = parse_axis(args.rho_axis, "rho-axis");
  spec.axes[2] = parse_axis(args.h_axis, "h-axis");
  const auto base = parse_ratios(args.base);
  spec.base = {base.e_ratio, base.rho_ratio, base.h_ratio};
  spec.tie_tol = args.tie_tol;
  if (args.direction == "decrease")
    spec.direction = sensitivity::Direction::decrease;
  else if (args.direction == "increase")
    spec.direction = sensitivity::Direction::increase;
  else
    throw UsageError("direction must be decrease or increase");
  if (args.qoi == "cutoff")
    spec.qoi = sensitivity::QoiKind::first_cutoff;
  else if (args.qoi == "width")
    spec.qoi = sensitivity::QoiKind::gap_width;
  else
    throw UsageError("qoi must be cutoff or width");

  sensitivity::Evaluator evaluate;
  dataset::Dataset table;
  if (args.mode == "lookup") {
    if (args.table_path.empty())
      throw UsageError("lookup mode needs --table <csv>");
    table = dataset::import_csv(args.table_path);
    evaluate = sensitivity::make_lookup_evaluator(table);
  } else {
    evaluate = [](const dispersion::ParameterRatios& r) {
      return dispersion::qois(r);
    };
  }

  const auto map = sensitivity::dominance_map(spec, evaluate, g.jobs);
  std::ostringstream csv;
  sensitivity::write_dominance_csv(csv, map);
  write_text_file(out_path(g, "dominance.csv", args.out_csv), csv.str());
  return 0;
}

struct DatasetGenArgs {
  std::string e_grid = "0.1:50000:16";
  std::string rho_grid = "0.1:9.5:12";
  std::string h_grid = "0.1:11:12";
  std::string out_csv;
};

int run_dataset_gen(const GlobalOpts& g, const DatasetGenArgs& args) {
  dataset::GridSpec grid;
  grid.e = parse_grid_axis(args.e_grid, "e-grid");
  grid.rho = parse_grid_axis(args.rho_grid, "rho-grid");
  grid.h = parse_grid_axis(args.h_grid, "h-grid");

  auto ds = dataset::generate_bragg(grid, dispersion::kRubber, {}, g.jobs);
  ds.provenance.seed = g.seed;

  const std::string path = out_path(g, "dataset.csv", args.out_csv);
  std::ostringstream csv;
  dataset::export_csv(csv, ds);
  write_text_file(path, csv.str());
  write_text_file(path + ".provenance.json",
                  dataset::provenance_json(ds.provenance) + "\n");
  std::cout << "samples: " << ds.samples.size()
            << "  excluded (no band gap): " << ds.provenance.excluded_count
            << "\n";
  return 0;
}

int run_dataset_import(const GlobalOpts& g, const std::string& in_path,
                       const std::string& reexport) {
  auto ds = dataset::import_csv(in_path);
  std::size_t no_gap = 0;
  for (const auto& s : ds.samples)
    if (!s.cutoff_hz && !s.width_hz) ++no_gap;
  std::cout << "samples: " << ds.samples.size() << "  no-gap rows: " << no_gap
            << "\n";
  if (!reexport.empty()) {
    const std::string path = out_path(g, "dataset.csv", reexport);
    std::ostringstream csv;
    dataset::export_csv(csv, ds);
    write_text_file(path, csv.str());
    write_text_file(path + ".provenance.json",
                    dataset::provenance_json(ds.provenance) + "\n");
  }
  return 0;
}

struct TrainArgs {
  std::string data_path, model = "forest", target = "cutoff";
  int degree = 3;
  int depth = 10, trees = 800;
  bool no_bootstrap = false;
  int h1 = 64, h2 = 64;
  std::string optimizer = "adam";
  double lr = 0.0025, weight_decay = 0.0;
  int epochs = 1000, batch = 0;
  double test_frac = 0.2, val_frac = 0.2;
  std::string model_out, metrics_out, loss_out;
};

int run_train(const GlobalOpts& g, const TrainArgs& args) {
  const auto target = dataset::target_from_name(args.target);
  auto ds =
      load_and_split(args.data_path, args.test_frac, args.val_frac, g.seed);
  const auto train = dataset::regression_view(ds, target, ds.splits->train);
  const auto val = dataset::regression_view(ds, target, ds.splits->val);
  const auto test = dataset::regression_view(ds, target, ds.splits->test);
  if (train.features.empty())
    throw std::runtime_error("no training rows with target " + args.target);

  regress::SavedModel saved;
  saved.target = target;

  if (args.model == "poly") {
    saved.model =
        regress::fit_poly_linear(train.features, train.targets, args.degree);
  } else if (args.model == "forest") {
    regress::ForestConfig config;
    config.max_depth = args.depth;
    config.n_estimators = args.trees;
    config.seed = g.seed;
    config.bootstrap = !args.no_bootstrap;
    saved.model =
        regress::fit_forest(train.features, train.targets, config, g.jobs);
  } else if (args.model == "mlp") {
    regress::MlpConfig config;
    config.hidden1 = args.h1;
    config.hidden2 = args.h2;
    if (args.optimizer != "sgd" && args.optimizer != "adam")
      throw UsageError("optimizer must be adam or sgd");
    config.optimizer = args.optimizer == "sgd" ? regress::OptimizerKind::sgd
                                               : regress::OptimizerKind::adam;
    config.learning_rate = args.lr;
    config.weight_decay = args.weight_decay;
    config.epochs = args.epochs;
    config.batch_size = args.batch;
    config.seed = g.seed;

    const auto scaler = dataset::fit_scaler(train.features);
    auto to_matrix = [&](const dataset::RegressionView& view) {
      Eigen::MatrixXd X(view.features.size(), 3);
      Eigen::VectorXd y(view.targets.size());
      for (std::size_t i = 0; i < view.features.size(); ++i) {
        const auto z = scaler.transform(view.features[i]);
        for (int f = 0; f < 3; ++f) X(static_cast<Eigen::Index>(i), f) = z[f];
        y(static_cast<Eigen::Index>(i)) = view.targets[i];
      }
      return std::pair{X, y};
    };
    const auto [x_train, y_train] = to_matrix(train);
    const auto [x_val, y_val] = to_matrix(val);
    auto model = regress::fit_mlp(x_train, y_train, x_val, y_val, config);
    if (model.aborted_nonfinite)
      throw std::runtime_error("mlp training diverged (non-finite loss)");
    if (!args.loss_out.empty()) {
      std::ostringstream csv;
      csv << "epoch,train_mse,val_mse\n";
      for (std::size_t e = 0; e < model.train_loss.size(); ++e) {
        csv << e + 1 << ',' << format_double(model.train_loss[e]) << ',';
        if (e < model.val_loss.size()) csv << format_double(model.val_loss[e]);
        csv << '\n';
      }
      write_text_file(args.loss_out, csv.str());
    }
    saved.model = std::move(model);
    saved.scaler = scaler;
  } else {
    throw UsageError("model must be poly, forest, or mlp");
  }

  write_text_file(out_path(g, "model.json", args.model_out),
                  regress::model_to_json(saved) + "\n");

  std::vector<double> yhat;
  yhat.reserve(test.targets.size());
  for (const auto& x : test.features) yhat.push_back(regress::predict(saved, x));
  const auto metrics = regress::compute_metrics(test.targets, yhat);
  const std::string text =
      regress::metrics_json(args.model, args.target, "test", metrics) + "\n";
  std::cout << text;
  if (!args.metrics_out.empty()) write_text_file(args.metrics_out, text);
  return 0;
}

struct TuneArgs {
  std::string data_path, target = "cutoff";
  std::string depths = "2,4,6,8,10,12,14";
  std::string trees = "200";
  int folds = 5;
  double test_frac = 0.2;
  std::string out_csv;
};

int run_tune(const GlobalOpts& g, const TuneArgs& args) {
  const auto target = dataset::target_from_name(args.target);
  auto ds = dataset::import_csv(args.data_path);
  if (ds.samples.empty())
    throw std::runtime_error("dataset is empty: " + args.data_path);
  // hold out the test fraction; cross-validation replaces the val split
  dataset::split(ds, args.test_frac, 0.2, g.seed);
  std::vector<std::size_t> pool = ds.splits->train;
  pool.insert(pool.end(), ds.splits->val.begin(), ds.splits->val.end());
  std::sort(pool.begin(), pool.end());
  const auto view = dataset::regression_view(ds, target, pool);

  auto parse_int_list = [](const std::string& text, const std::string& name) {
    std::vector<int> values;
    std::string field;
    std::istringstream in(text);
    while (std::getline(in, field, ',')) {
      try {
        values.push_back(std::stoi(field));
      } catch (...) {
        throw UsageError(name + ": bad integer '" + field + "'");
      }
    }
    if (values.empty()) throw UsageError(name + ": empty list");
    return values;
  };
  const auto depth_grid = parse_int_list(args.depths, "depths");
  const auto tree_grid = parse_int_list(args.trees, "trees");

  const auto result =
      regress::tune_forest(view.features, view.targets, depth_grid, tree_grid,
                           args.folds, g.seed, g.jobs);
  std::ostringstream csv;
  regress::write_tune_csv(csv, result);
  write_text_file(out_path(g, "tune.csv", args.out_csv), csv.str());
  std::cout << "best: max_depth=" << result.best_depth
            << " n_estimators=" << result.best_estimators << "\n";
  return 0;
}

struct EvalArgs {
  std::string model_path, data_path, split = "test";
  double test_frac = 0.2, val_frac = 0.2;
  std::string metrics_out;
};

int run_eval(const GlobalOpts& g, const EvalArgs& args) {
  std::ifstream in(args.model_path);
  if (!in) throw std::runtime_error("cannot open model: " + args.model_path);
  std::stringstream buf;
  buf << in.rdbuf();
  const auto saved = regress::model_from_json(buf.str());

  auto ds =
      load_and_split(args.data_path, args.test_frac, args.val_frac, g.seed);
  const auto indices = args.split == "all" ? dataset::all_indices(ds)
                                           : split_indices(ds, args.split);
  const auto view = dataset::regression_view(ds, saved.target, indices);
  if (view.targets.empty())
    throw std::runtime_error("no rows with the model target in split " +
                             args.split);

  std::vector<double> yhat;
  yhat.reserve(view.targets.size());
  for (const auto& x : view.features) yhat.push_back(regress::predict(saved, x));
  const auto metrics = regress::compute_metrics(view.targets, yhat);
  const std::string text =
      regress::metrics_json(regress::model_kind(saved.model),
                            dataset::target_name(saved.target), args.split,
                            metrics) +
      "\n";
  std::cout << text;
  if (!args.metrics_out.empty()) write_text_file(args.metrics_out, text);
  return 0;
}

int run_predict(const std::string& model_path, const std::string& ratios) {
  std::ifstream in(model_path);
  if (!in) throw std::runtime_error("cannot open model: " + model_path);
  std::stringstream buf;
  buf << in.rdbuf();
  const auto saved = regress::model_from_json(buf.str());
  const auto r = parse_ratios(ratios);
  std::cout << format_double(
                   regress::predict(saved, {r.e_ratio, r.rho_ratio, r.h_ratio}))
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "band gaps, Shapley rankings, and surrogate models for layered "
      "metamaterials"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value config file");
  app.option_defaults()->always_capture_default(true);

  GlobalOpts global;
  app.add_option("--seed", global.seed, "master random seed");
  app.add_option("--jobs", global.jobs, "worker threads (0 = hardware)");
  app.add_option("--out", global.out_dir, "output directory for default paths");

  BandArgs band_args;
  auto add_scan_opts = [&](CLI::App* cmd, BandArgs& a) {
    cmd->add_option("--ratios", a.ratios, "E,RHO,H layer-1:layer-2 ratios")
        ->required();
    cmd->add_option("--e2", a.e2, "layer-2 Young's modulus [Pa]");
    cmd->add_option("--rho2", a.rho2, "layer-2 density [kg/m^3]");
    cmd->add_option("--omega-max", a.omega_max,
                    "scan ceiling [rad/s] (0 = auto)");
    cmd->add_option("--samples", a.samples, "scan samples per window");
    cmd->add_option("--edge-tol", a.edge_tol, "relative edge tolerance");
    cmd->add_option("--doublings", a.doublings, "max window doublings");
  };

  auto* band_cmd = app.add_subcommand("band", "band diagram CSV + gap JSON");
  add_scan_opts(band_cmd, band_args);
  band_cmd->add_option("--out-csv", band_args.csv_path, "band diagram CSV");
  band_cmd->add_option("--out-json", band_args.json_path, "gap report JSON");

  BandArgs qoi_args;
  auto* qoi_cmd = app.add_subcommand("qoi", "gap report JSON for one point");
  add_scan_opts(qoi_cmd, qoi_args);

  ShapleyArgs shapley_args;
  auto* shapley_cmd =
      app.add_subcommand("shapley", "Shapley analysis of a cooperative game");
  shapley_cmd->add_option("--demo", shapley_args.demo,
                          "built-in demo game name");
  shapley_cmd->add_option("--game", shapley_args.game_path, "game JSON file");
  shapley_cmd->add_flag("--modify", shapley_args.modify,
                        "apply the monotone repair first");
  shapley_cmd->add_option("--tie-tol", shapley_args.tie_tol,
                          "relative tie tolerance");
  shapley_cmd->add_option("--out-json", shapley_args.json_path,
                          "also write the report here");

  DominanceArgs dom_args;
  auto* dom_cmd =
      app.add_subcommand("dominance", "dominance map over a parameter sweep");
  dom_cmd->add_option("--mode", dom_args.mode, "bragg | lookup | continuous");
  dom_cmd->add_option("--e-axis", dom_args.e_axis, "E-ratio axis");
  dom_cmd->add_option("--rho-axis", dom_args.rho_axis, "density-ratio axis");
  dom_cmd->add_option("--h-axis", dom_args.h_axis, "thickness-ratio axis");
  dom_cmd->add_option("--base", dom_args.base, "base point E,RHO,H");
  dom_cmd->add_option("--direction", dom_args.direction,
                      "decrease | increase");
  dom_cmd->add_option("--qoi", dom_args.qoi, "cutoff | width");
  dom_cmd->add_option("--table", dom_args.table_path,
                      "QoI lookup CSV (lookup mode)");
  dom_cmd->add_option("--range-lo", dom_args.range_lo, "continuous: low end");
  dom_cmd->add_option("--range-hi", dom_args.range_hi, "continuous: high end");
  dom_cmd->add_option("--step", dom_args.step, "continuous: grid step");
  dom_cmd->add_option("--tie-tol", dom_args.tie_tol, "relative tie tolerance");
  dom_cmd->add_option("--out-csv", dom_args.out_csv, "map CSV path");

  auto* dataset_cmd = app.add_subcommand("dataset", "generate or import data");
  dataset_cmd->require_subcommand(1);
  DatasetGenArgs gen_args;
  auto* gen_cmd = dataset_cmd->add_subcommand("gen", "run the QoI sweep");
  gen_cmd->add_option("--e-grid", gen_args.e_grid, "lo:hi:n[:log]");
  gen_cmd->add_option("--rho-grid", gen_args.rho_grid, "lo:hi:n[:log]");
  gen_cmd->add_option("--h-grid", gen_args.h_grid, "lo:hi:n[:log]");
  gen_cmd->add_option("--out-csv", gen_args.out_csv, "dataset CSV path");
  std::string import_in, import_reexport;
  auto* import_cmd =
      dataset_cmd->add_subcommand("import", "validate an external QoI table");
  import_cmd->add_option("--in", import_in, "CSV to import")->required();
  import_cmd->add_option("--reexport", import_reexport,
                         "write the canonical form here");

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "fit a surrogate model");
  train_cmd->add_option("--data", train_args.data_path, "dataset CSV")
      ->required();
  train_cmd->add_option("--model", train_args.model, "poly | forest | mlp");
  train_cmd->add_option("--target", train_args.target, "cutoff | width");
  train_cmd->add_option("--degree", train_args.degree, "poly degree");
  train_cmd->add_option("--depth", train_args.depth, "forest max depth");
  train_cmd->add_option("--trees", train_args.trees, "forest estimators");
  train_cmd->add_flag("--no-bootstrap", train_args.no_bootstrap,
                      "train every tree on the full set");
  train_cmd->add_option("--h1", train_args.h1, "mlp hidden width 1");
  train_cmd->add_option("--h2", train_args.h2, "mlp hidden width 2");
  train_cmd->add_option("--optimizer", train_args.optimizer, "adam | sgd");
  train_cmd->add_option("--lr", train_args.lr, "mlp learning rate");
  train_cmd->add_option("--weight-decay", train_args.weight_decay,
                        "decoupled weight decay");
  train_cmd->add_option("--epochs", train_args.epochs, "mlp epochs");
  train_cmd->add_option("--batch", train_args.batch,
                        "mlp batch size (0 = full)");
  train_cmd->add_option("--test-frac", train_args.test_frac, "test fraction");
  train_cmd->add_option("--val-frac", train_args.val_frac,
                        "validation fraction of the rest");
  train_cmd->add_option("--model-out", train_args.model_out,
                        "model JSON path");
  train_cmd->add_option("--metrics", train_args.metrics_out,
                        "also write test metrics here");
  train_cmd->add_option("--loss-history", train_args.loss_out,
                        "mlp loss history CSV");

  TuneArgs tune_args;
  auto* tune_cmd =
      app.add_subcommand("tune", "cross-validated forest hyper-parameters");
  tune_cmd->add_option("--data", tune_args.data_path, "dataset CSV")
      ->required();
  tune_cmd->add_option("--target", tune_args.target, "cutoff | width");
  tune_cmd->add_option("--depths", tune_args.depths, "depth grid");
  tune_cmd->add_option("--trees", tune_args.trees, "estimator grid");
  tune_cmd->add_option("--folds", tune_args.folds, "CV folds");
  tune_cmd->add_option("--test-frac", tune_args.test_frac,
                       "held-out fraction");
  tune_cmd->add_option("--out-csv", tune_args.out_csv, "curves CSV path");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "score a saved model");
  eval_cmd->add_option("--model", eval_args.model_path, "model JSON")
      ->required();
  eval_cmd->add_option("--data", eval_args.data_path, "dataset CSV")
      ->required();
  eval_cmd->add_option("--split", eval_args.split, "train | val | test | all");
  eval_cmd->add_option("--test-frac", eval_args.test_frac, "test fraction");
  eval_cmd->add_option("--val-frac", eval_args.val_frac,
                       "validation fraction of the rest");
  eval_cmd->add_option("--metrics", eval_args.metrics_out,
                       "also write metrics here");

  std::string predict_model, predict_ratios;
  auto* predict_cmd = app.add_subcommand("predict", "predict one QoI value");
  predict_cmd->add_option("--model", predict_model, "model JSON")->required();
  predict_cmd->add_option("--ratios", predict_ratios, "E,RHO,H")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  // Resolved configuration echo: every run is reproducible from this alone
  // (the block is valid --config input). Emitted on stderr so stdout stays
  // clean JSON/values for piping.
  std::cerr << "# resolved config\n" << app.config_to_str(true, false) << "\n";

  try {
    if (band_cmd->parsed()) return run_band(global, band_args, true);
    if (qoi_cmd->parsed()) return run_band(global, qoi_args, false);
    if (shapley_cmd->parsed()) return run_shapley(shapley_args);
    if (dom_cmd->parsed()) return run_dominance(global, dom_args);
    if (dataset_cmd->parsed()) {
      if (gen_cmd->parsed()) return run_dataset_gen(global, gen_args);
      if (import_cmd->parsed())
        return run_dataset_import(global, import_in, import_reexport);
    }
    if (train_cmd->parsed()) return run_train(global, train_args);
    if (tune_cmd->parsed()) return run_tune(global, tune_args);
    if (eval_cmd->parsed()) return run_eval(global, eval_args);
    if (predict_cmd->parsed())
      return run_predict(predict_model, predict_ratios);
    throw UsageError("no command given");
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

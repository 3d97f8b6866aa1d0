#include "metamat/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "metamat/num_format.hpp"
#include "metamat/parallel.hpp"
#include "metamat/rng.hpp"

namespace metamat::dataset {

std::string target_name(TargetKind kind) {
  return kind == TargetKind::cutoff ? "cutoff" : "width";
}

TargetKind target_from_name(const std::string& name) {
  if (name == "cutoff") return TargetKind::cutoff;
  if (name == "width") return TargetKind::width;
  throw std::invalid_argument("unknown target '" + name +
                              "' (expected cutoff or width)");
}

std::vector<double> grid_axis_values(const GridAxis& axis) {
  if (axis.count < 1) throw std::domain_error("grid axis: count must be >= 1");
  if (!(axis.lo > 0.0) || !(axis.hi >= axis.lo))
    throw std::domain_error("grid axis: need 0 < lo <= hi");
  std::vector<double> values(axis.count);
  if (axis.count == 1) {
    values[0] = axis.lo;
    return values;
  }
  for (int i = 0; i < axis.count; ++i) {
    const double t = static_cast<double>(i) / (axis.count - 1);
    values[i] = axis.log_scale
                    ? std::exp(std::log(axis.lo) +
                               t * (std::log(axis.hi) - std::log(axis.lo)))
                    : axis.lo + t * (axis.hi - axis.lo);
  }
  // pin both endpoints to the stated bounds exactly
  values.front() = axis.lo;
  values.back() = axis.hi;
  return values;
}

namespace {

std::string grid_detail(const GridSpec& grid) {
  std::ostringstream s;
  auto axis = [&](const char* name, const GridAxis& a) {
    s << name << ":" << format_double(a.lo) << ".." << format_double(a.hi)
      << "x" << a.count << (a.log_scale ? "(log)" : "(lin)");
  };
  axis("E", grid.e);
  s << " ";
  axis("RHO", grid.rho);
  s << " ";
  axis("H", grid.h);
  return s.str();
}

}  // namespace

Dataset generate_bragg(const GridSpec& grid,
                       const dispersion::MaterialLayer& layer2_stock,
                       const dispersion::ScanSettings& settings,
                       unsigned jobs) {
  const auto e_values = grid_axis_values(grid.e);
  const auto rho_values = grid_axis_values(grid.rho);
  const auto h_values = grid_axis_values(grid.h);

  const std::size_t total =
      e_values.size() * rho_values.size() * h_values.size();
  std::vector<Sample> evaluated(total);

  parallel_for(total, jobs, [&](std::size_t idx) {
    const std::size_t ih = idx % h_values.size();
    const std::size_t ir = (idx / h_values.size()) % rho_values.size();
    const std::size_t ie = idx / (h_values.size() * rho_values.size());
    Sample& s = evaluated[idx];
    s.e_ratio = e_values[ie];
    s.rho_ratio = rho_values[ir];
    s.h_ratio = h_values[ih];
    const auto report = dispersion::qois(
        {s.e_ratio, s.rho_ratio, s.h_ratio}, layer2_stock, settings);
    s.cutoff_hz = report.first_cutoff_hz;
    s.width_hz = report.first_gap_width_hz;
  });

  Dataset ds;
  ds.provenance.source = "generated";
  ds.provenance.detail = grid_detail(grid);
  for (auto& s : evaluated) {
    if (s.cutoff_hz && s.width_hz)
      ds.samples.push_back(s);
    else
      ++ds.provenance.excluded_count;
  }
  return ds;
}

namespace {

constexpr const char* kCsvHeader =
    "e_ratio,rho_ratio,h_ratio,f_cutoff_hz,gap_width_hz";

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(current);
      current.clear();
    } else if (c != '\r') {
      current += c;
    }
  }
  fields.push_back(current);
  return fields;
}

std::optional<double> parse_target(const std::string& field,
                                   const std::string& where) {
  if (field.empty()) return std::nullopt;
  const double v = parse_double(field, where);
  if (v < 0.0) throw std::invalid_argument(where + ": negative target");
  return v;
}

}  // namespace

Dataset parse_csv(std::istream& in, const std::string& stream_name) {
  Dataset ds;
  ds.provenance.source = "imported";
  ds.provenance.detail = stream_name;

  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument(stream_name + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader)
    throw std::invalid_argument(stream_name + ": bad header, expected '" +
                                std::string(kCsvHeader) + "'");

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = stream_name + " line " + std::to_string(line_no);
    const auto fields = split_fields(line);
    if (fields.size() != 5)
      throw std::invalid_argument(where + ": expected 5 fields, got " +
                                  std::to_string(fields.size()));
    Sample s;
    s.e_ratio = parse_double(fields[0], where);
    s.rho_ratio = parse_double(fields[1], where);
    s.h_ratio = parse_double(fields[2], where);
    if (!(s.e_ratio > 0.0) || !(s.rho_ratio > 0.0) || !(s.h_ratio > 0.0))
      throw std::invalid_argument(where + ": ratios must be > 0");
    s.cutoff_hz = parse_target(fields[3], where);
    s.width_hz = parse_target(fields[4], where);
    ds.samples.push_back(s);
  }
  return ds;
}

Dataset import_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  return parse_csv(in, path);
}

void export_csv(std::ostream& out, const Dataset& ds) {
  out << kCsvHeader << '\n';
  for (const auto& s : ds.samples) {
    out << format_double(s.e_ratio) << ',' << format_double(s.rho_ratio) << ','
        << format_double(s.h_ratio) << ',';
    if (s.cutoff_hz) out << format_double(*s.cutoff_hz);
    out << ',';
    if (s.width_hz) out << format_double(*s.width_hz);
    out << '\n';
  }
}

void write_csv_file(const std::string& path, const Dataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write dataset file: " + path);
  export_csv(out, ds);
}

std::string provenance_json(const Provenance& p) {
  nlohmann::ordered_json j;
  j["source"] = p.source;
  j["detail"] = p.detail;
  j["excluded_count"] = p.excluded_count;
  j["seed"] = p.seed;
  return j.dump(2);
}

Provenance provenance_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  Provenance p;
  p.source = j.at("source").get<std::string>();
  p.detail = j.at("detail").get<std::string>();
  p.excluded_count = j.at("excluded_count").get<std::size_t>();
  p.seed = j.at("seed").get<std::uint64_t>();
  return p;
}

void split(Dataset& ds, double test_frac, double val_frac, std::uint64_t seed) {
  if (!(test_frac > 0.0 && test_frac < 1.0) ||
      !(val_frac > 0.0 && val_frac < 1.0))
    throw std::domain_error("split: fractions must lie in (0, 1)");

  const std::size_t n = ds.samples.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);

  const std::size_t n_test = static_cast<std::size_t>(
      std::floor(static_cast<double>(n) * test_frac));
  const std::size_t n_val = static_cast<std::size_t>(
      std::floor(static_cast<double>(n - n_test) * val_frac));

  SplitIndices idx;
  idx.test.assign(order.begin(), order.begin() + n_test);
  idx.val.assign(order.begin() + n_test, order.begin() + n_test + n_val);
  idx.train.assign(order.begin() + n_test + n_val, order.end());
  std::sort(idx.test.begin(), idx.test.end());
  std::sort(idx.val.begin(), idx.val.end());
  std::sort(idx.train.begin(), idx.train.end());

  ds.splits = std::move(idx);
  ds.provenance.seed = seed;
}

RegressionView regression_view(const Dataset& ds, TargetKind target,
                               const std::vector<std::size_t>& subset) {
  RegressionView view;
  for (std::size_t i : subset) {
    const Sample& s = ds.samples.at(i);
    const auto& t = target == TargetKind::cutoff ? s.cutoff_hz : s.width_hz;
    if (!t) continue;
    view.features.push_back({s.e_ratio, s.rho_ratio, s.h_ratio});
    view.targets.push_back(*t);
    view.sample_indices.push_back(i);
  }
  return view;
}

std::vector<std::size_t> all_indices(const Dataset& ds) {
  std::vector<std::size_t> idx(ds.samples.size());
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

std::array<double, 3> Scaler::transform(const std::array<double, 3>& x) const {
  std::array<double, 3> z;
  for (int i = 0; i < 3; ++i) {
    const double s = sigma[i] > 0.0 ? sigma[i] : 1.0;
    z[i] = (x[i] - mean[i]) / s;
  }
  return z;
}

std::array<double, 3> Scaler::inverse(const std::array<double, 3>& z) const {
  std::array<double, 3> x;
  for (int i = 0; i < 3; ++i) {
    const double s = sigma[i] > 0.0 ? sigma[i] : 1.0;
    x[i] = z[i] * s + mean[i];
  }
  return x;
}

Scaler fit_scaler(const std::vector<std::array<double, 3>>& train_features) {
  if (train_features.empty())
    throw std::domain_error("fit_scaler: no training features");
  Scaler scaler;
  const double n = static_cast<double>(train_features.size());
  for (int f = 0; f < 3; ++f) {
    double sum = 0.0;
    for (const auto& row : train_features) sum += row[f];
    scaler.mean[f] = sum / n;
    double ss = 0.0;
    for (const auto& row : train_features) {
      const double d = row[f] - scaler.mean[f];
      ss += d * d;
    }
    scaler.sigma[f] = std::sqrt(ss / n);
  }
  return scaler;
}

}  // namespace metamat::dataset

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "metamat/dispersion.hpp"

namespace metamat::dataset {

/// One row: ratio features plus the two QoI targets. Absent targets mean
/// the configuration produced no band gap.
struct Sample {
  double e_ratio = 0.0;
  double rho_ratio = 0.0;
  double h_ratio = 0.0;
  std::optional<double> cutoff_hz;
  std::optional<double> width_hz;
};

enum class TargetKind { cutoff, width };

std::string target_name(TargetKind kind);
TargetKind target_from_name(const std::string& name);

struct GridAxis {
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;
  bool log_scale = false;
};

std::vector<double> grid_axis_values(const GridAxis& axis);

/// Default generation grid over the Bragg sweep ranges, 16 x 12 x 12 =
/// 2304 points. The E axis is linear: the first cut-off saturates above
/// E-ratio ~100, and linear spacing keeps the dataset dominated by that
/// regime, where the QoI surfaces are smooth (log spacing is available per
/// axis for sweeps that need it).
struct GridSpec {
  GridAxis e{0.1, 50000.0, 16, false};
  GridAxis rho{0.1, 9.5, 12, false};
  GridAxis h{0.1, 11.0, 12, false};
};

struct Provenance {
  std::string source;  // "generated" or "imported"
  std::string detail;  // grid description or source path
  std::size_t excluded_count = 0;
  std::uint64_t seed = 0;
};

struct SplitIndices {
  std::vector<std::size_t> train, val, test;
};

struct Dataset {
  std::vector<Sample> samples;
  Provenance provenance;
  std::optional<SplitIndices> splits;
};

/// Evaluates the dispersion QoIs over the grid. Points without a band gap
/// are excluded and counted in the provenance. Grid points are independent,
/// so evaluation parallelizes; samples always come out in grid order.
Dataset generate_bragg(const GridSpec& grid,
                       const dispersion::MaterialLayer& layer2_stock =
                           dispersion::kRubber,
                       const dispersion::ScanSettings& settings = {},
                       unsigned jobs = 1);

/// CSV schema (exact header): e_ratio,rho_ratio,h_ratio,f_cutoff_hz,gap_width_hz
/// Empty target fields denote a configuration without a band gap.
Dataset parse_csv(std::istream& in, const std::string& stream_name);
Dataset import_csv(const std::string& path);
void export_csv(std::ostream& out, const Dataset& ds);
void write_csv_file(const std::string& path, const Dataset& ds);

std::string provenance_json(const Provenance& p);
Provenance provenance_from_json(const std::string& text);

/// Seeded uniform shuffle; sizes are floor-rounded with the remainder going
/// to training: test = floor(n*test_frac), val = floor((n-test)*val_frac).
/// Index sets are sorted, disjoint, and exhaustive.
void split(Dataset& ds, double test_frac, double val_frac, std::uint64_t seed);

/// Rows (from the given subset, in order) whose requested target is present.
struct RegressionView {
  std::vector<std::array<double, 3>> features;
  std::vector<double> targets;
  std::vector<std::size_t> sample_indices;
};

RegressionView regression_view(const Dataset& ds, TargetKind target,
                               const std::vector<std::size_t>& subset);
std::vector<std::size_t> all_indices(const Dataset& ds);

/// Per-feature z-score scaler (population sigma), fitted on training
/// features only. A zero-spread feature transforms to 0 and inverts back
/// to its mean.
struct Scaler {
  std::array<double, 3> mean{};
  std::array<double, 3> sigma{};  // population sigma as fitted, may be 0

  std::array<double, 3> transform(const std::array<double, 3>& x) const;
  std::array<double, 3> inverse(const std::array<double, 3>& z) const;
};

Scaler fit_scaler(const std::vector<std::array<double, 3>>& train_features);

}  // namespace metamat::dataset

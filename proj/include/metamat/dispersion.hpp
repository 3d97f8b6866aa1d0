#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace metamat::dispersion {

/// One layer of the two-layer unit cell. Thickness is in dimensionless cell
/// units (the whole cell has width 1, treated as 1 m when reporting Hz).
struct MaterialLayer {
  double youngs_modulus_pa = 0.0;
  double density_kg_m3 = 0.0;
  double thickness = 0.0;
};

struct LayeredUnitCell {
  MaterialLayer layer1;
  MaterialLayer layer2;
};

/// layer1 : layer2 property ratios, all strictly positive.
struct ParameterRatios {
  double e_ratio = 1.0;
  double rho_ratio = 1.0;
  double h_ratio = 1.0;
};

struct GapInterval {
  double lower_hz = 0.0;
  double upper_hz = 0.0;
};

/// Ordered band gaps plus the two quantities of interest. The QoIs mirror
/// gaps[0] and are absent when no gap was found. If the scan ceiling fell
/// inside an open gap, the last interval is clipped there and flagged.
struct BandGapReport {
  std::vector<GapInterval> gaps;
  std::optional<double> first_cutoff_hz;
  std::optional<double> first_gap_width_hz;
  double omega_max_searched = 0.0;  // rad/s
  bool last_gap_truncated = false;
};

/// Scan controls for qois(). omega_max = 0 selects the default window
/// 40*pi*min(C1/h1, C2/h2). n_samples is the density per octave-equivalent
/// window: the total sample count scales with how many octaves the window
/// spans above the first band edge, and the window (with its samples) is
/// doubled up to max_doublings times until the first gap is bracketed.
struct ScanSettings {
  double omega_max = 0.0;
  int n_samples = 4096;
  double edge_tol = 1e-9;  // relative tolerance on the refined edge
  int max_doublings = 3;
};

/// Layer-2 stock used throughout the sweeps: rubber.
inline constexpr MaterialLayer kRubber{3.49e6, 1100.0, 1.0};

/// Longitudinal rod wave speed sqrt(E/rho). Throws std::domain_error on
/// non-positive input.
double wave_speed(double youngs_modulus_pa, double density_kg_m3);

/// Right-hand side of the layered-medium dispersion relation
///   cos(k h) = cos(w h1/C1) cos(w h2/C2)
///            - 1/2 (z + 1/z) sin(w h1/C1) sin(w h2/C2),  z = rho1 C1 / rho2 C2.
/// A real wave number exists iff the returned value lies in [-1, 1].
double dispersion_rhs(double omega_rad_s, const LayeredUnitCell& cell);

/// Scans (0, omega_max] on a uniform grid of n_samples points; maximal runs
/// with |rhs| > 1 become gaps and each interior edge is bisected on
/// |rhs| - 1 = 0 to relative tolerance edge_tol. Frequencies are in Hz.
BandGapReport find_band_gaps(const LayeredUnitCell& cell, double omega_max,
                             int n_samples, double edge_tol);

/// Cell with layer 1 = ratios times the layer-2 stock and thicknesses
/// h1 = r/(1+r), h2 = 1/(1+r) so the cell width is 1.
LayeredUnitCell make_cell(const ParameterRatios& ratios,
                          const MaterialLayer& layer2_stock);

double default_omega_max(const LayeredUnitCell& cell);

/// Band-gap QoIs for a ratio point. Widens the search window per settings
/// until the first gap is fully bracketed (or the doubling cap is hit).
BandGapReport qois(const ParameterRatios& ratios,
                   const MaterialLayer& layer2_stock = kRubber,
                   const ScanSettings& settings = {});

/// CSV rows `omega_rad_s,f_hz,rhs,propagating` on the uniform scan grid
/// (omega = 0 included), propagating in {0,1}.
void write_band_csv(std::ostream& out, const LayeredUnitCell& cell,
                    double omega_max, int n_samples);

/// {"gaps":[{"lower_hz":..,"upper_hz":..}],"first_cutoff_hz":..,
///  "first_gap_width_hz":..} with null for absent QoIs.
std::string gap_report_json(const BandGapReport& report);

void validate(const MaterialLayer& layer);
void validate(const LayeredUnitCell& cell);
void validate(const ParameterRatios& ratios);

}  // namespace metamat::dispersion

#pragma once

// Test-side reference implementations, independent of the library code paths
// they are used to check. Everything here is written against the layered-cell
// dispersion relation directly, in long double, with its own scan/refinement
// logic. Keep this file free of includes from include/metamat.

#include <cmath>
#include <cstdint>
#include <vector>

namespace oracle {

struct Cell {
  long double e1, rho1, h1;  // layer 1: Young's modulus [Pa], density, thickness
  long double e2, rho2, h2;  // layer 2
};

inline long double wave_speed_ld(long double e, long double rho) {
  return std::sqrt(e / rho);
}

// cos(w h1/C1) cos(w h2/C2) - 1/2 (z + 1/z) sin(w h1/C1) sin(w h2/C2),
// z = rho1 C1 / (rho2 C2), evaluated term by term in long double.
inline long double rhs_ld(long double omega, const Cell& c) {
  const long double c1 = wave_speed_ld(c.e1, c.rho1);
  const long double c2 = wave_speed_ld(c.e2, c.rho2);
  const long double a = omega * c.h1 / c1;
  const long double b = omega * c.h2 / c2;
  const long double z = (c.rho1 * c1) / (c.rho2 * c2);
  return std::cos(a) * std::cos(b) -
         0.5L * (z + 1.0L / z) * std::sin(a) * std::sin(b);
}

struct Gap {
  long double lower;  // rad/s
  long double upper;
  bool truncated = false;  // upper clipped at the scan ceiling
};

// Dense uniform scan: a gap is a maximal run of samples with |rhs| > 1.
// Edges are the midpoints of the bracketing sample pair, optionally refined
// by the oracle's own long-double bisection.
inline std::vector<Gap> scan_gaps(const Cell& c, long double omega_max,
                                  std::int64_t n_samples, bool refine = true) {
  std::vector<Gap> gaps;
  const long double step = omega_max / static_cast<long double>(n_samples);
  bool prev_in = false;  // |rhs(0)| == 1 exactly
  long double prev_w = 0.0L;
  long double open = 0.0L;

  auto bisect = [&](long double out_pt, long double in_pt) {
    if (!refine) return 0.5L * (out_pt + in_pt);
    for (int it = 0; it < 200; ++it) {
      const long double mid = 0.5L * (out_pt + in_pt);
      if (std::fabs(rhs_ld(mid, c)) > 1.0L)
        in_pt = mid;
      else
        out_pt = mid;
      if (std::fabs(in_pt - out_pt) <= 1e-15L * std::fabs(in_pt)) break;
    }
    return 0.5L * (out_pt + in_pt);
  };

  for (std::int64_t i = 1; i <= n_samples; ++i) {
    const long double w = step * static_cast<long double>(i);
    const bool in = std::fabs(rhs_ld(w, c)) > 1.0L;
    if (in && !prev_in) open = bisect(prev_w, w);
    if (!in && prev_in) gaps.push_back({open, bisect(w, prev_w), false});
    prev_in = in;
    prev_w = w;
  }
  if (prev_in) gaps.push_back({open, omega_max, true});
  return gaps;
}

inline long double hz(long double omega) {
  return omega / (2.0L * std::acos(-1.0L));
}

// Builds the ratio-parameterized cell the way the sweep convention states:
// layer 1 = ratios times the layer-2 stock, h1 = r/(1+r), h2 = 1/(1+r).
inline Cell ratio_cell(long double e_ratio, long double rho_ratio,
                       long double h_ratio, long double e2 = 3.49e6L,
                       long double rho2 = 1100.0L) {
  Cell c;
  c.e2 = e2;
  c.rho2 = rho2;
  c.e1 = e_ratio * e2;
  c.rho1 = rho_ratio * rho2;
  c.h1 = h_ratio / (1.0L + h_ratio);
  c.h2 = 1.0L / (1.0L + h_ratio);
  return c;
}

// Default scan ceiling used throughout: 40*pi*min(C1/h1, C2/h2).
inline long double default_omega_max(const Cell& c) {
  const long double c1 = wave_speed_ld(c.e1, c.rho1);
  const long double c2 = wave_speed_ld(c.e2, c.rho2);
  const long double m = std::min(c1 / c.h1, c2 / c.h2);
  return 40.0L * std::acos(-1.0L) * m;
}

}  // namespace oracle

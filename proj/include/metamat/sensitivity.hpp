#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "metamat/dispersion.hpp"
#include "metamat/game.hpp"

namespace metamat::dataset {
struct Dataset;
}

namespace metamat::sensitivity {

enum class Direction { decrease, increase };
enum class QoiKind { first_cutoff, gap_width };
enum class AxisScale { linear, logarithmic };

/// Player order used everywhere: E ratio, density ratio, thickness ratio.
inline constexpr std::array<const char*, 3> kPlayerNames{"E", "RHO", "H"};

/// Grid sweep description. Axes hold the point values each player can take;
/// base is the rest configuration every coalition falls back to.
struct SweepSpec {
  std::array<std::vector<double>, 3> axes;
  std::array<double, 3> base{0.1, 0.1, 0.1};
  Direction direction = Direction::decrease;
  QoiKind qoi = QoiKind::first_cutoff;
  std::array<AxisScale, 3> scales{AxisScale::logarithmic, AxisScale::linear,
                                  AxisScale::linear};
  double tie_tol = 1e-9;
};

void validate(const SweepSpec& spec);

using Evaluator =
    std::function<dispersion::BandGapReport(const dispersion::ParameterRatios&)>;

enum class CellLabelKind { dominant, tie, none, no_bandgap };

struct CellLabel {
  CellLabelKind kind = CellLabelKind::none;
  std::vector<int> members;  // player indices, ascending
};

struct MapCell {
  std::array<double, 3> point{};
  CellLabel label;
  std::array<double, 3> shapley{};  // values of the repaired game
  std::optional<std::array<double, 3>> dominance_pct;
};

/// Cells in row-major order: E outermost, H innermost.
struct DominanceMap {
  SweepSpec spec;
  std::vector<MapCell> cells;
};

/// Builds the per-point cooperative game. Coalition members take their
/// point value, everyone else stays at base; the payoff is the directional
/// QoI improvement over the base configuration. Configurations without a
/// band gap contribute no improvement (payoff 0); for decrease games a
/// gapless base makes every payoff 0.
game::CooperativeGame build_game_at(const std::array<double, 3>& point,
                                    const SweepSpec& spec,
                                    const Evaluator& evaluate);

/// Full sweep: per cell, build the game, repair it with monotone_modify,
/// take Shapley values and the dominance label. Cells whose grand-coalition
/// configuration (or base, for decrease games) has no band gap are labeled
/// no_bandgap. Evaluation failures abort with the offending point named.
DominanceMap dominance_map(const SweepSpec& spec, const Evaluator& evaluate,
                           unsigned jobs = 1);

/// Two-player game on a scalar function: v(S) = f(c_S) - f(base) with
/// coalition members at their point coordinate. Returns exact Shapley values.
game::ShapleyResult continuous_shapley(
    const std::function<double(double, double)>& f,
    std::array<double, 2> point, std::array<double, 2> base,
    double tie_tol = 1e-9);

/// CSV export, header:
/// e_ratio,rho_ratio,h_ratio,label,phi_e,phi_rho,phi_h,dom_e_pct,dom_rho_pct,dom_h_pct
void write_dominance_csv(std::ostream& out, const DominanceMap& map);

/// E | RHO | H | TIE:<members joined by +> | NONE | NO_BANDGAP
std::string label_string(const CellLabel& label);

/// Evaluator backed by an imported QoI table (sonic-crystal path). Throws
/// std::runtime_error naming the point when a configuration is missing.
Evaluator make_lookup_evaluator(const dataset::Dataset& table);

}  // namespace metamat::sensitivity

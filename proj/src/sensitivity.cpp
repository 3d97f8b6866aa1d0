#include "metamat/sensitivity.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "metamat/dataset.hpp"
#include "metamat/num_format.hpp"
#include "metamat/parallel.hpp"

namespace metamat::sensitivity {

void validate(const SweepSpec& spec) {
  for (int p = 0; p < 3; ++p) {
    const auto& axis = spec.axes[p];
    if (axis.empty())
      throw std::domain_error(std::string("sweep spec: empty axis for ") +
                              kPlayerNames[p]);
    for (std::size_t i = 0; i + 1 < axis.size(); ++i)
      if (!(axis[i] < axis[i + 1]))
        throw std::domain_error(std::string("sweep spec: axis for ") +
                                kPlayerNames[p] + " must be strictly increasing");
    if (!(spec.base[p] > 0.0))
      throw std::domain_error("sweep spec: base values must be > 0");
  }
}

namespace {

std::optional<double> qoi_of(const dispersion::BandGapReport& report,
                             QoiKind kind) {
  return kind == QoiKind::first_cutoff ? report.first_cutoff_hz
                                       : report.first_gap_width_hz;
}

dispersion::ParameterRatios coalition_config(
    const std::array<double, 3>& point, const std::array<double, 3>& base,
    unsigned mask) {
  dispersion::ParameterRatios r;
  r.e_ratio = (mask & 1u) ? point[0] : base[0];
  r.rho_ratio = (mask & 2u) ? point[1] : base[1];
  r.h_ratio = (mask & 4u) ? point[2] : base[2];
  return r;
}

// Payoff table for one grid point given the already-evaluated base QoI.
// Returns the eight coalition values (index = player mask).
std::vector<double> coalition_payoffs(const std::array<double, 3>& point,
                                      const SweepSpec& spec,
                                      const Evaluator& evaluate,
                                      const std::optional<double>& base_qoi,
                                      std::optional<double>* grand_qoi_out) {
  std::vector<double> v(8, 0.0);
  if (spec.direction == Direction::decrease && !base_qoi) {
    if (grand_qoi_out) *grand_qoi_out = std::nullopt;
    return v;  // no reference level: no improvement anywhere
  }
  const double reference =
      spec.direction == Direction::decrease ? *base_qoi : base_qoi.value_or(0.0);
  for (unsigned mask = 1; mask < 8; ++mask) {
    const auto report = evaluate(coalition_config(point, spec.base, mask));
    const auto q = qoi_of(report, spec.qoi);
    if (mask == 7 && grand_qoi_out) *grand_qoi_out = q;
    if (!q) continue;  // no band gap: counts as no improvement
    v[mask] = spec.direction == Direction::decrease ? reference - *q
                                                    : *q - reference;
  }
  return v;
}

game::CooperativeGame make_game(std::vector<double> payoffs) {
  return game::CooperativeGame(
      {kPlayerNames[0], kPlayerNames[1], kPlayerNames[2]}, std::move(payoffs));
}

}  // namespace

game::CooperativeGame build_game_at(const std::array<double, 3>& point,
                                    const SweepSpec& spec,
                                    const Evaluator& evaluate) {
  validate(spec);
  const auto base_report = evaluate(
      {spec.base[0], spec.base[1], spec.base[2]});
  return make_game(coalition_payoffs(point, spec, evaluate,
                                     qoi_of(base_report, spec.qoi), nullptr));
}

DominanceMap dominance_map(const SweepSpec& spec, const Evaluator& evaluate,
                           unsigned jobs) {
  validate(spec);
  DominanceMap map;
  map.spec = spec;

  const auto& [e_axis, rho_axis, h_axis] = spec.axes;
  map.cells.resize(e_axis.size() * rho_axis.size() * h_axis.size());

  const auto base_report =
      evaluate({spec.base[0], spec.base[1], spec.base[2]});
  const auto base_qoi = qoi_of(base_report, spec.qoi);

  parallel_for(map.cells.size(), jobs, [&](std::size_t idx) {
    MapCell& cell = map.cells[idx];
    const std::size_t ih = idx % h_axis.size();
    const std::size_t ir = (idx / h_axis.size()) % rho_axis.size();
    const std::size_t ie = idx / (h_axis.size() * rho_axis.size());
    cell.point = {e_axis[ie], rho_axis[ir], h_axis[ih]};

    try {
      if (spec.direction == Direction::decrease && !base_qoi) {
        cell.label.kind = CellLabelKind::no_bandgap;
        return;
      }
      std::optional<double> grand_qoi;
      auto payoffs =
          coalition_payoffs(cell.point, spec, evaluate, base_qoi, &grand_qoi);
      if (!grand_qoi) {
        cell.label.kind = CellLabelKind::no_bandgap;
        return;
      }
      const auto repaired = game::monotone_modify(make_game(std::move(payoffs)));
      const auto shapley = game::shapley_values(repaired, spec.tie_tol);
      for (int p = 0; p < 3; ++p) cell.shapley[p] = shapley.values[p];
      if (shapley.dominance_pct) {
        cell.dominance_pct = std::array<double, 3>{
            (*shapley.dominance_pct)[0], (*shapley.dominance_pct)[1],
            (*shapley.dominance_pct)[2]};
      }
      const auto label = game::dominance(shapley);
      switch (label.kind) {
        case game::DominanceLabel::Kind::dominant:
          cell.label.kind = CellLabelKind::dominant;
          break;
        case game::DominanceLabel::Kind::tie:
          cell.label.kind = CellLabelKind::tie;
          break;
        case game::DominanceLabel::Kind::none:
          cell.label.kind = CellLabelKind::none;
          break;
      }
      cell.label.members = label.members;
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "dominance map failed at point (e=" << format_double(cell.point[0])
          << ", rho=" << format_double(cell.point[1])
          << ", h=" << format_double(cell.point[2]) << "): " << e.what();
      throw std::runtime_error(msg.str());
    }
  });
  return map;
}

game::ShapleyResult continuous_shapley(
    const std::function<double(double, double)>& f,
    std::array<double, 2> point, std::array<double, 2> base, double tie_tol) {
  const double f_base = f(base[0], base[1]);
  std::vector<double> v(4, 0.0);
  v[1] = f(point[0], base[1]) - f_base;
  v[2] = f(base[0], point[1]) - f_base;
  v[3] = f(point[0], point[1]) - f_base;
  game::CooperativeGame g({"X1", "X2"}, std::move(v));
  return game::shapley_values(g, tie_tol);
}

std::string label_string(const CellLabel& label) {
  switch (label.kind) {
    case CellLabelKind::none:
      return "NONE";
    case CellLabelKind::no_bandgap:
      return "NO_BANDGAP";
    case CellLabelKind::dominant:
      return kPlayerNames[label.members.front()];
    case CellLabelKind::tie: {
      std::string s = "TIE:";
      for (std::size_t i = 0; i < label.members.size(); ++i) {
        if (i) s += '+';
        s += kPlayerNames[label.members[i]];
      }
      return s;
    }
  }
  return "NONE";
}

void write_dominance_csv(std::ostream& out, const DominanceMap& map) {
  out << "e_ratio,rho_ratio,h_ratio,label,phi_e,phi_rho,phi_h,"
         "dom_e_pct,dom_rho_pct,dom_h_pct\n";
  for (const auto& cell : map.cells) {
    out << format_double(cell.point[0]) << ',' << format_double(cell.point[1])
        << ',' << format_double(cell.point[2]) << ','
        << label_string(cell.label);
    for (int p = 0; p < 3; ++p) out << ',' << format_double(cell.shapley[p]);
    for (int p = 0; p < 3; ++p) {
      out << ',';
      if (cell.dominance_pct) out << format_double((*cell.dominance_pct)[p]);
    }
    out << '\n';
  }
}

namespace {

std::string ratio_key(const dispersion::ParameterRatios& r) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g|%.12g|%.12g", r.e_ratio, r.rho_ratio,
                r.h_ratio);
  return buf;
}

}  // namespace

Evaluator make_lookup_evaluator(const dataset::Dataset& table) {
  auto lut = std::make_shared<std::map<std::string, dataset::Sample>>();
  for (const auto& sample : table.samples)
    (*lut)[ratio_key({sample.e_ratio, sample.rho_ratio, sample.h_ratio})] =
        sample;
  return [lut](const dispersion::ParameterRatios& r) {
    const auto it = lut->find(ratio_key(r));
    if (it == lut->end()) {
      std::ostringstream msg;
      msg << "QoI lookup table has no entry for (e=" << format_double(r.e_ratio)
          << ", rho=" << format_double(r.rho_ratio)
          << ", h=" << format_double(r.h_ratio) << ")";
      throw std::runtime_error(msg.str());
    }
    dispersion::BandGapReport report;
    const auto& s = it->second;
    if (s.cutoff_hz && s.width_hz) {
      report.gaps.push_back({*s.cutoff_hz, *s.cutoff_hz + *s.width_hz});
      report.first_cutoff_hz = s.cutoff_hz;
      report.first_gap_width_hz = s.width_hz;
    } else if (s.cutoff_hz || s.width_hz) {
      report.first_cutoff_hz = s.cutoff_hz;
      report.first_gap_width_hz = s.width_hz;
    }
    return report;
  };
}

}  // namespace metamat::sensitivity

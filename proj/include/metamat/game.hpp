#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace metamat::game {

/// Coalition bitmask: bit i set means players()[i] is a member.
using Coalition = std::uint32_t;

// Finite cooperative game with a total characteristic function, stored as
// one payoff per coalition mask. Immutable after construction.
class CooperativeGame {
 public:
  static constexpr int kMaxPlayers = 12;

  /// values[mask] is v(coalition mask); values[0] must be 0 and the table
  /// must be total (2^n entries). Throws std::domain_error otherwise.
  CooperativeGame(std::vector<std::string> players, std::vector<double> values);

  int player_count() const { return static_cast<int>(players_.size()); }
  const std::vector<std::string>& players() const { return players_; }
  const std::vector<double>& values() const { return v_; }
  double value(Coalition s) const { return v_[s]; }
  Coalition grand_coalition() const {
    return static_cast<Coalition>((std::size_t{1} << players_.size()) - 1);
  }

 private:
  std::vector<std::string> players_;
  std::vector<double> v_;
};

/// Per-player Shapley values with dominance percentages and a tie-aware
/// ranking (tiers of player indices, best tier first).
struct ShapleyResult {
  std::vector<double> values;
  double total = 0.0;  // sum of values = v(grand coalition)
  std::optional<std::vector<double>> dominance_pct;  // absent unless total > 0
  std::vector<std::vector<int>> ranking;
};

/// Exact Shapley values via the subset-weighted closed form
///   phi_i = sum_{S not containing i} |S|!(n-|S|-1)!/n! (v(S+i) - v(S)).
/// Players whose values differ by at most tie_tol relatively share a tier.
ShapleyResult shapley_values(const CooperativeGame& g, double tie_tol = 1e-9);

struct SuperadditivityCheck {
  bool holds = true;
  /// Disjoint non-empty pairs (A, B) with v(A|B) < v(A) + v(B), A < B.
  std::vector<std::pair<Coalition, Coalition>> violations;
};

SuperadditivityCheck is_superadditive(const CooperativeGame& g);

/// Monotone closure v'(S) = max_{T subset of S} v(T). Restricted to pairs
/// this is the "take the better part" repair rule; applying it to every
/// coalition reproduces the repaired three-player tables exactly and is
/// idempotent.
CooperativeGame monotone_modify(const CooperativeGame& g);

struct DominanceLabel {
  enum class Kind { dominant, tie, none };
  Kind kind = Kind::none;
  std::vector<int> members;  // player indices; empty for none
};

/// Top ranking tier, or none when total <= 0 or no player has positive value.
DominanceLabel dominance(const ShapleyResult& result);

/// JSON form: {"players":[...],"coalitions":[{"members":[...],"value":...}]}.
/// A missing empty coalition implies 0; any other missing coalition, an
/// unknown member, or a duplicate coalition is a format error.
CooperativeGame game_from_json(const std::string& text);
std::string game_to_json(const CooperativeGame& g);

}  // namespace metamat::game

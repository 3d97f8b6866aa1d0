#include "metamat/game.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

namespace metamat::game {

CooperativeGame::CooperativeGame(std::vector<std::string> players,
                                 std::vector<double> values)
    : players_(std::move(players)), v_(std::move(values)) {
  if (players_.empty())
    throw std::domain_error("cooperative game: player list is empty");
  if (players_.size() > kMaxPlayers)
    throw std::domain_error("cooperative game: more than 12 players");
  const std::size_t expected = std::size_t{1} << players_.size();
  if (v_.size() != expected)
    throw std::domain_error(
        "cooperative game: characteristic function must be total (2^n "
        "entries)");
  if (v_[0] != 0.0)
    throw std::domain_error("cooperative game: v(empty) must be 0");
  for (std::size_t i = 0; i + 1 < players_.size(); ++i)
    for (std::size_t j = i + 1; j < players_.size(); ++j)
      if (players_[i] == players_[j])
        throw std::domain_error("cooperative game: duplicate player name '" +
                                players_[i] + "'");
}

namespace {

bool relatively_tied(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

std::vector<std::vector<int>> rank_tiers(const std::vector<double>& values,
                                         double tie_tol) {
  std::vector<int> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return values[a] > values[b]; });

  std::vector<std::vector<int>> tiers;
  for (int idx : order) {
    if (!tiers.empty() &&
        relatively_tied(values[tiers.back().front()], values[idx], tie_tol)) {
      tiers.back().push_back(idx);
    } else {
      tiers.push_back({idx});
    }
  }
  return tiers;
}

}  // namespace

ShapleyResult shapley_values(const CooperativeGame& g, double tie_tol) {
  const int n = g.player_count();

  // w[s] = s! (n-1-s)! / n!
  std::vector<double> factorial(n + 1, 1.0);
  for (int i = 1; i <= n; ++i) factorial[i] = factorial[i - 1] * i;
  std::vector<double> weight(n, 0.0);
  for (int s = 0; s < n; ++s)
    weight[s] = factorial[s] * factorial[n - 1 - s] / factorial[n];

  ShapleyResult result;
  result.values.assign(n, 0.0);
  const Coalition full = g.grand_coalition();
  for (int i = 0; i < n; ++i) {
    const Coalition bit = Coalition{1} << i;
    double phi = 0.0;
    for (Coalition s = 0; s <= full; ++s) {
      if (s & bit) continue;
      const int size = std::popcount(s);
      phi += weight[size] * (g.value(s | bit) - g.value(s));
    }
    result.values[i] = phi;
  }

  result.total = std::accumulate(result.values.begin(), result.values.end(), 0.0);
  if (result.total > 0.0) {
    std::vector<double> pct(n);
    for (int i = 0; i < n; ++i) pct[i] = 100.0 * result.values[i] / result.total;
    result.dominance_pct = std::move(pct);
  }
  result.ranking = rank_tiers(result.values, tie_tol);
  return result;
}

SuperadditivityCheck is_superadditive(const CooperativeGame& g) {
  SuperadditivityCheck check;
  const Coalition full = g.grand_coalition();
  for (Coalition a = 1; a <= full; ++a) {
    const Coalition rest = full & ~a;
    // b runs over non-empty subsets of the complement; b > a keeps each
    // unordered pair once
    for (Coalition b = rest; b != 0; b = (b - 1) & rest) {
      if (b <= a) continue;
      if (g.value(a | b) < g.value(a) + g.value(b)) {
        check.holds = false;
        check.violations.emplace_back(a, b);
      }
    }
  }
  std::sort(check.violations.begin(), check.violations.end());
  return check;
}

CooperativeGame monotone_modify(const CooperativeGame& g) {
  std::vector<double> v = g.values();
  const Coalition full = g.grand_coalition();
  // subset DP: v'(S) = max(v(S), max_{i in S} v'(S \ {i}))
  for (Coalition s = 1; s <= full; ++s) {
    double best = v[s];
    for (int i = 0; i < g.player_count(); ++i) {
      const Coalition bit = Coalition{1} << i;
      if (s & bit) best = std::max(best, v[s & ~bit]);
    }
    v[s] = best;
  }
  return CooperativeGame(g.players(), std::move(v));
}

DominanceLabel dominance(const ShapleyResult& result) {
  DominanceLabel label;
  if (result.values.empty() || result.total <= 0.0) return label;
  const auto& top = result.ranking.front();
  const double top_value = result.values[top.front()];
  if (top_value <= 0.0) return label;
  label.kind = top.size() == 1 ? DominanceLabel::Kind::dominant
                               : DominanceLabel::Kind::tie;
  label.members = top;
  std::sort(label.members.begin(), label.members.end());
  return label;
}

CooperativeGame game_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("game JSON: ") + e.what());
  }
  if (!j.contains("players") || !j["players"].is_array())
    throw std::invalid_argument("game JSON: missing players array");
  std::vector<std::string> players = j["players"].get<std::vector<std::string>>();
  if (players.empty() || players.size() > CooperativeGame::kMaxPlayers)
    throw std::invalid_argument("game JSON: need 1..12 players");

  const std::size_t table = std::size_t{1} << players.size();
  std::vector<double> values(table, 0.0);
  std::vector<bool> seen(table, false);
  seen[0] = true;  // empty coalition defaults to 0

  if (!j.contains("coalitions") || !j["coalitions"].is_array())
    throw std::invalid_argument("game JSON: missing coalitions array");
  for (const auto& entry : j["coalitions"]) {
    if (!entry.contains("members") || !entry.contains("value"))
      throw std::invalid_argument(
          "game JSON: coalition needs members and value");
    Coalition mask = 0;
    for (const auto& m : entry["members"]) {
      const std::string name = m.get<std::string>();
      const auto it = std::find(players.begin(), players.end(), name);
      if (it == players.end())
        throw std::invalid_argument("game JSON: unknown player '" + name + "'");
      mask |= Coalition{1} << (it - players.begin());
    }
    if (seen[mask] && mask != 0)
      throw std::invalid_argument("game JSON: duplicate coalition");
    const double value = entry["value"].get<double>();
    if (mask == 0 && value != 0.0)
      throw std::invalid_argument("game JSON: v(empty) must be 0");
    values[mask] = value;
    seen[mask] = true;
  }
  for (std::size_t s = 1; s < table; ++s)
    if (!seen[s])
      throw std::invalid_argument(
          "game JSON: characteristic function is not total (missing "
          "coalition)");
  return CooperativeGame(std::move(players), std::move(values));
}

std::string game_to_json(const CooperativeGame& g) {
  nlohmann::ordered_json j;
  j["players"] = g.players();
  j["coalitions"] = nlohmann::ordered_json::array();
  const Coalition full = g.grand_coalition();
  for (Coalition s = 0; s <= full; ++s) {
    nlohmann::ordered_json entry;
    entry["members"] = nlohmann::ordered_json::array();
    for (int i = 0; i < g.player_count(); ++i)
      if (s & (Coalition{1} << i)) entry["members"].push_back(g.players()[i]);
    entry["value"] = g.value(s);
    j["coalitions"].push_back(std::move(entry));
  }
  return j.dump(2);
}

}  // namespace metamat::game

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "metamat/game.hpp"
#include "metamat/rng.hpp"

using namespace metamat;
using namespace metamat::game;

namespace {

// Report-writing game: A, B, C alone write 20/27/35 pages, pairs 55/62/74,
// all three 100.
CooperativeGame writing_game() {
  //                 {}  A   B   AB  C   AC  BC  ABC
  return CooperativeGame({"A", "B", "C"},
                         {0, 20, 27, 55, 35, 62, 74, 100});
}

// Same cast, but A slows pairs down: AB = 10, AC = 17, ABC = 70.
CooperativeGame soured_game() {
  return CooperativeGame({"A", "B", "C"}, {0, 20, 27, 10, 35, 17, 74, 70});
}

CooperativeGame random_game(Rng& rng, int n) {
  std::vector<std::string> players;
  for (int i = 0; i < n; ++i) players.push_back(std::string(1, char('a' + i)));
  std::vector<double> v(std::size_t{1} << n, 0.0);
  for (std::size_t s = 1; s < v.size(); ++s) v[s] = rng.uniform(-100.0, 100.0);
  return CooperativeGame(std::move(players), std::move(v));
}

// Independent route: average marginal contribution over all n! orderings.
std::vector<double> shapley_by_permutations(const CooperativeGame& g) {
  const int n = g.player_count();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> sums(n, 0.0);
  long permutations = 0;
  do {
    Coalition built = 0;
    for (int idx : order) {
      const Coalition next = built | (Coalition{1} << idx);
      sums[idx] += g.value(next) - g.value(built);
      built = next;
    }
    ++permutations;
  } while (std::next_permutation(order.begin(), order.end()));
  for (auto& s : sums) s /= static_cast<double>(permutations);
  return sums;
}

}  // namespace

TEST_CASE("prize-sharing Shapley values for the writing game") {
  const auto result = shapley_values(writing_game());
  REQUIRE(result.values.size() == 3);
  CHECK(result.values[0] == doctest::Approx(24.5).epsilon(1e-12));
  CHECK(result.values[1] == doctest::Approx(34.0).epsilon(1e-12));
  CHECK(result.values[2] == doctest::Approx(41.5).epsilon(1e-12));
  CHECK(result.total == doctest::Approx(100.0).epsilon(1e-12));
  REQUIRE(result.dominance_pct.has_value());
  CHECK((*result.dominance_pct)[0] == doctest::Approx(24.5).epsilon(1e-12));
  CHECK((*result.dominance_pct)[1] == doctest::Approx(34.0).epsilon(1e-12));
  CHECK((*result.dominance_pct)[2] == doctest::Approx(41.5).epsilon(1e-12));
}

TEST_CASE("Shapley values for the non-super-additive variant") {
  const auto result = shapley_values(soured_game());
  CHECK(result.values[0] == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(result.values[1] == doctest::Approx(31.5).epsilon(1e-12));
  CHECK(result.values[2] == doctest::Approx(39.0).epsilon(1e-12));
}

TEST_CASE("two-player game without the disruptive member") {
  CooperativeGame g({"B", "C"}, {0, 27, 35, 74});
  const auto result = shapley_values(g);
  CHECK(result.values[0] == doctest::Approx(33.0).epsilon(1e-12));
  CHECK(result.values[1] == doctest::Approx(41.0).epsilon(1e-12));
  REQUIRE(result.dominance_pct.has_value());
  CHECK((*result.dominance_pct)[0] ==
        doctest::Approx(100.0 * 33 / 74).epsilon(1e-12));
  CHECK((*result.dominance_pct)[1] ==
        doctest::Approx(100.0 * 41 / 74).epsilon(1e-12));
}

TEST_CASE("super-additivity check") {
  CHECK(is_superadditive(writing_game()).holds);
  CHECK(is_superadditive(writing_game()).violations.empty());

  const auto check = is_superadditive(soured_game());
  CHECK_FALSE(check.holds);
  // v({A} u {B}) = 10 < 20 + 27
  const std::pair<Coalition, Coalition> ab{1u, 2u};
  CHECK(std::find(check.violations.begin(), check.violations.end(), ab) !=
        check.violations.end());

  CooperativeGame solo({"A"}, {0, 5});
  CHECK(is_superadditive(solo).holds);
}

TEST_CASE("monotone closure repairs the soured game as expected") {
  const auto repaired = monotone_modify(soured_game());
  CHECK(repaired.value(0b001) == 20.0);
  CHECK(repaired.value(0b010) == 27.0);
  CHECK(repaired.value(0b100) == 35.0);
  CHECK(repaired.value(0b011) == 27.0);  // AB: max(10, 20, 27)
  CHECK(repaired.value(0b101) == 35.0);  // AC: max(17, 20, 35)
  CHECK(repaired.value(0b110) == 74.0);
  CHECK(repaired.value(0b111) == 74.0);  // ABC: max over all subsets

  // repaired Shapley values and dominance percentages
  const auto result = shapley_values(repaired);
  CHECK(result.values[0] == doctest::Approx(40.0 / 6).epsilon(1e-12));
  CHECK(result.values[1] == doctest::Approx(178.0 / 6).epsilon(1e-12));
  CHECK(result.values[2] == doctest::Approx(226.0 / 6).epsilon(1e-12));
  REQUIRE(result.dominance_pct.has_value());
  CHECK((*result.dominance_pct)[2] ==
        doctest::Approx(100.0 * 226 / 444).epsilon(1e-12));
}

TEST_CASE("monotone closure is idempotent and conservative") {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(4));
    const auto g = random_game(rng, n);
    const auto m = monotone_modify(g);

    bool was_monotone = true;
    const Coalition full = g.grand_coalition();
    for (Coalition s = 0; s <= full; ++s) {
      CHECK(m.value(s) >= g.value(s));  // closure only raises
      for (int i = 0; i < n; ++i) {
        const Coalition bit = Coalition{1} << i;
        if (s & bit) {
          CHECK(m.value(s) >= m.value(s & ~bit));  // closure is monotone
          if (g.value(s) < g.value(s & ~bit)) was_monotone = false;
        }
      }
    }

    const auto twice = monotone_modify(m);
    bool unchanged_by_second = true;
    bool equals_original = true;
    for (Coalition s = 0; s <= full; ++s) {
      if (twice.value(s) != m.value(s)) unchanged_by_second = false;
      if (m.value(s) != g.value(s)) equals_original = false;
    }
    CHECK(unchanged_by_second);
    CHECK(equals_original == was_monotone);
  }

  CooperativeGame zeros({"A", "B"}, {0, 0, 0, 0});
  const auto m = monotone_modify(zeros);
  for (Coalition s = 0; s < 4; ++s) CHECK(m.value(s) == 0.0);
}

TEST_CASE("efficiency on random games") {
  Rng rng(22);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(4));
    const auto g = random_game(rng, n);
    const auto result = shapley_values(g);
    const double grand = g.value(g.grand_coalition());
    const double scale = std::max(1.0, std::abs(grand));
    CHECK(std::abs(result.total - grand) <= 1e-9 * scale);
  }
}

TEST_CASE("permutation and subset routes agree") {
  Rng rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(4));
    const auto g = random_game(rng, n);
    const auto fast = shapley_values(g).values;
    const auto slow = shapley_by_permutations(g);
    for (int i = 0; i < n; ++i)
      CHECK(std::abs(fast[i] - slow[i]) <=
            1e-12 * std::max(1.0, std::abs(slow[i])));
  }
}

TEST_CASE("symmetric players get equal values") {
  // v depends only on coalition size for players 0 and 1
  Rng rng(24);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = random_game(rng, 3);
    // symmetrize players 0 and 1: average v over the swap
    std::vector<double> v = g.values();
    auto swap_mask = [](Coalition s) {
      const Coalition rest = s & ~Coalition{3};
      Coalition out = rest;
      if (s & 1) out |= 2;
      if (s & 2) out |= 1;
      return out;
    };
    for (Coalition s = 0; s < 8; ++s) {
      const Coalition t = swap_mask(s);
      if (t > s) {
        const double avg = 0.5 * (v[s] + v[t]);
        v[s] = avg;
        v[t] = avg;
      }
    }
    CooperativeGame sym(g.players(), v);
    const auto result = shapley_values(sym);
    CHECK(std::abs(result.values[0] - result.values[1]) <= 1e-12);
  }
}

TEST_CASE("dummy player receives exactly zero") {
  Rng rng(25);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = random_game(rng, 3);
    // make player 2 contribute nothing to any coalition
    std::vector<double> v = g.values();
    for (Coalition s = 0; s < 8; ++s)
      if (s & 4) v[s] = v[s & ~Coalition{4}];
    CooperativeGame dummy(g.players(), v);
    CHECK(shapley_values(dummy).values[2] == 0.0);
  }
}

TEST_CASE("linearity of the Shapley operator") {
  Rng rng(26);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g1 = random_game(rng, 4);
    const auto g2 = random_game(rng, 4);
    const double alpha = rng.uniform(-2.0, 2.0);
    const double beta = rng.uniform(-2.0, 2.0);
    std::vector<double> combo(16);
    for (Coalition s = 0; s < 16; ++s)
      combo[s] = alpha * g1.value(s) + beta * g2.value(s);
    const auto lhs = shapley_values(CooperativeGame(g1.players(), combo)).values;
    const auto a = shapley_values(g1).values;
    const auto b = shapley_values(g2).values;
    for (int i = 0; i < 4; ++i)
      CHECK(std::abs(lhs[i] - (alpha * a[i] + beta * b[i])) <=
            1e-9 * std::max(1.0, std::abs(lhs[i])));
  }
}

TEST_CASE("scaling the game leaves ranking and percentages unchanged") {
  Rng rng(27);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = random_game(rng, 3);
    const double c = rng.uniform(0.1, 10.0);
    std::vector<double> v = g.values();
    for (auto& x : v) x *= c;
    const auto base = shapley_values(g);
    const auto scaled = shapley_values(CooperativeGame(g.players(), v));
    CHECK(base.ranking == scaled.ranking);
    if (base.dominance_pct) {
      REQUIRE(scaled.dominance_pct.has_value());
      for (int i = 0; i < 3; ++i)
        CHECK((*scaled.dominance_pct)[i] ==
              doctest::Approx((*base.dominance_pct)[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("ranking ties and dominance labels") {
  CooperativeGame tied({"A", "B"}, {0, 5, 5, 10});
  const auto result = shapley_values(tied, 1e-9);
  REQUIRE(result.ranking.size() == 1);
  CHECK(result.ranking[0] == std::vector<int>{0, 1});
  const auto label = dominance(result);
  CHECK(label.kind == DominanceLabel::Kind::tie);
  CHECK(label.members == std::vector<int>{0, 1});

  const auto repaired = shapley_values(monotone_modify(soured_game()));
  const auto top = dominance(repaired);
  CHECK(top.kind == DominanceLabel::Kind::dominant);
  CHECK(top.members == std::vector<int>{2});  // C

  CooperativeGame zeros({"A", "B"}, {0, 0, 0, 0});
  CHECK(dominance(shapley_values(zeros)).kind == DominanceLabel::Kind::none);

  CooperativeGame negative({"A", "B"}, {0, -3, -4, -10});
  CHECK(dominance(shapley_values(negative)).kind ==
        DominanceLabel::Kind::none);
}

TEST_CASE("single-player and invalid games") {
  CooperativeGame solo({"A"}, {0, 7});
  CHECK(shapley_values(solo).values[0] == 7.0);

  CHECK_THROWS_AS(CooperativeGame({}, {0}), std::domain_error);
  CHECK_THROWS_AS(CooperativeGame({"A"}, {0, 1, 2}), std::domain_error);
  CHECK_THROWS_AS(CooperativeGame({"A", "B"}, {1, 0, 0, 0}),
                  std::domain_error);
  CHECK_THROWS_AS(CooperativeGame({"A", "A"}, {0, 0, 0, 0}),
                  std::domain_error);

  // the exact-table representation caps at 12 players
  std::vector<std::string> big;
  for (int i = 0; i < 13; ++i) big.push_back(std::string(1, char('a' + i)));
  CHECK_THROWS_AS(CooperativeGame(big, std::vector<double>(1 << 13, 0.0)),
                  std::domain_error);
  std::vector<std::string> twelve(big.begin(), big.begin() + 12);
  CHECK(shapley_values(CooperativeGame(twelve,
                                       std::vector<double>(1 << 12, 0.0)))
            .values.size() == 12);
}

TEST_CASE("game JSON round-trips and validates") {
  const auto g = soured_game();
  const auto text = game_to_json(g);
  const auto back = game_from_json(text);
  REQUIRE(back.player_count() == 3);
  for (Coalition s = 0; s < 8; ++s) CHECK(back.value(s) == g.value(s));

  // missing empty coalition is implied zero
  const char* no_empty = R"({
    "players": ["A", "B"],
    "coalitions": [
      {"members": ["A"], "value": 1},
      {"members": ["B"], "value": 2},
      {"members": ["A", "B"], "value": 4}
    ]})";
  CHECK(game_from_json(no_empty).value(0) == 0.0);

  // any other missing coalition is a format error
  const char* missing = R"({
    "players": ["A", "B"],
    "coalitions": [
      {"members": ["A"], "value": 1},
      {"members": ["A", "B"], "value": 4}
    ]})";
  CHECK_THROWS_AS(game_from_json(missing), std::invalid_argument);

  const char* unknown = R"({
    "players": ["A"],
    "coalitions": [{"members": ["Z"], "value": 1}]})";
  CHECK_THROWS_AS(game_from_json(unknown), std::invalid_argument);

  CHECK_THROWS_AS(game_from_json("not json"), std::invalid_argument);
}

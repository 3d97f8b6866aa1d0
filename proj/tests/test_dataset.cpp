#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "metamat/dataset.hpp"
#include "metamat/rng.hpp"

using namespace metamat;
using namespace metamat::dataset;

namespace {

Dataset synthetic(std::size_t n) {
  Dataset ds;
  Rng rng(100 + n);
  for (std::size_t i = 0; i < n; ++i) {
    Sample s;
    s.e_ratio = rng.log_uniform(1.0, 100000.0);  // sonic-style ranges
    s.rho_ratio = rng.uniform(1.0, 10.0);
    s.h_ratio = rng.uniform(1.0, 10.0);
    if (i % 7 != 3) {  // sprinkle in some no-gap rows
      s.cutoff_hz = rng.uniform(1.0, 500.0);
      s.width_hz = rng.uniform(0.0, 100.0);
    }
    ds.samples.push_back(s);
  }
  return ds;
}

}  // namespace

TEST_CASE("split sizes follow the floor convention") {
  auto ds = synthetic(2269);
  split(ds, 0.2, 0.2, 7);
  REQUIRE(ds.splits.has_value());
  // floor(2269 * 0.2) = 453, floor(1816 * 0.2) = 363, remainder to train
  CHECK(ds.splits->test.size() == 453);
  CHECK(ds.splits->val.size() == 363);
  CHECK(ds.splits->train.size() == 1453);
}

TEST_CASE("split is deterministic, disjoint, and exhaustive") {
  auto ds = synthetic(500);
  split(ds, 0.2, 0.2, 42);
  const auto first = *ds.splits;
  split(ds, 0.2, 0.2, 42);
  CHECK(ds.splits->train == first.train);
  CHECK(ds.splits->val == first.val);
  CHECK(ds.splits->test == first.test);

  std::set<std::size_t> all;
  for (const auto* part : {&first.train, &first.val, &first.test})
    for (auto i : *part) CHECK(all.insert(i).second);
  CHECK(all.size() == 500);

  split(ds, 0.2, 0.2, 43);
  CHECK(ds.splits->test != first.test);  // seed actually matters
}

TEST_CASE("tiny split rounds down to empty validation") {
  auto ds = synthetic(5);
  split(ds, 0.2, 0.2, 1);
  CHECK(ds.splits->test.size() == 1);
  CHECK(ds.splits->val.size() == 0);
  CHECK(ds.splits->train.size() == 4);

  CHECK_THROWS_AS(split(ds, 0.0, 0.2, 1), std::domain_error);
  CHECK_THROWS_AS(split(ds, 0.2, 1.0, 1), std::domain_error);
}

TEST_CASE("scaler standardizes the training features") {
  std::vector<std::array<double, 3>> train{{1.0, 5.0, 2.0}, {3.0, 5.0, 6.0}};
  const auto scaler = fit_scaler(train);

  // {1, 3} with population sigma 1 maps to {-1, +1}
  CHECK(scaler.transform(train[0])[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(scaler.transform(train[1])[0] == doctest::Approx(1.0).epsilon(1e-12));
  // constant column maps to zero and inverts back to its mean
  CHECK(scaler.transform(train[0])[1] == 0.0);
  CHECK(scaler.inverse({0.0, 0.0, 0.0})[1] == doctest::Approx(5.0));

  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const std::array<double, 3> x{rng.uniform(-10, 10), rng.uniform(-10, 10),
                                  rng.uniform(-10, 10)};
    const auto back = scaler.inverse(scaler.transform(x));
    for (int f = 0; f < 3; ++f)
      CHECK(back[f] ==
            doctest::Approx(x[f]).epsilon(1e-12).scale(std::abs(x[f]) + 1));
  }
}

TEST_CASE("scaler sees only the training rows") {
  auto ds = synthetic(200);
  split(ds, 0.2, 0.2, 5);
  const auto view = regression_view(ds, TargetKind::cutoff, ds.splits->train);
  const auto fitted = fit_scaler(view.features);

  auto perturbed = ds;
  for (auto i : perturbed.splits->test) {
    perturbed.samples[i].e_ratio *= 3.0;
    perturbed.samples[i].cutoff_hz = 1e6;
  }
  const auto view2 =
      regression_view(perturbed, TargetKind::cutoff, perturbed.splits->train);
  const auto refitted = fit_scaler(view2.features);
  for (int f = 0; f < 3; ++f) {
    CHECK(fitted.mean[f] == refitted.mean[f]);
    CHECK(fitted.sigma[f] == refitted.sigma[f]);
  }
}

TEST_CASE("CSV export/import round-trips bit-identically") {
  const auto ds = synthetic(64);
  std::ostringstream out;
  export_csv(out, ds);

  std::istringstream in(out.str());
  const auto back = parse_csv(in, "roundtrip");
  REQUIRE(back.samples.size() == ds.samples.size());
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    CHECK(back.samples[i].e_ratio == ds.samples[i].e_ratio);
    CHECK(back.samples[i].rho_ratio == ds.samples[i].rho_ratio);
    CHECK(back.samples[i].h_ratio == ds.samples[i].h_ratio);
    CHECK(back.samples[i].cutoff_hz == ds.samples[i].cutoff_hz);
    CHECK(back.samples[i].width_hz == ds.samples[i].width_hz);
  }

  // and the re-export is byte-identical
  std::ostringstream out2;
  export_csv(out2, back);
  CHECK(out.str() == out2.str());
}

TEST_CASE("CSV import errors name the offending line") {
  const char* header = "e_ratio,rho_ratio,h_ratio,f_cutoff_hz,gap_width_hz\n";

  {
    std::istringstream in(std::string(header) + "1,2,3,10,5\n-1,2,3,10,5\n");
    try {
      parse_csv(in, "bad");
      FAIL("expected a parse error");
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
  }
  {
    std::istringstream in(std::string(header) + "1,2,xyz,10,5\n");
    CHECK_THROWS_AS(parse_csv(in, "bad"), std::invalid_argument);
  }
  {
    std::istringstream in(std::string(header) + "1,2,3,10\n");
    CHECK_THROWS_AS(parse_csv(in, "bad"), std::invalid_argument);
  }
  {
    std::istringstream in("wrong,header\n1,2,3,4,5\n");
    CHECK_THROWS_AS(parse_csv(in, "bad"), std::invalid_argument);
  }
  {
    std::istringstream in(std::string(header) + "1,2,3,-5,1\n");
    CHECK_THROWS_AS(parse_csv(in, "bad"), std::invalid_argument);
  }
  {
    // empty targets are valid no-gap rows, not errors
    std::istringstream in(std::string(header) + "1,2,3,,\n");
    const auto ds = parse_csv(in, "ok");
    REQUIRE(ds.samples.size() == 1);
    CHECK_FALSE(ds.samples[0].cutoff_hz.has_value());
  }
}

TEST_CASE("regression views skip rows without the requested target") {
  Dataset ds;
  ds.samples.push_back({1, 1, 1, 10.0, 5.0});
  ds.samples.push_back({2, 2, 2, std::nullopt, std::nullopt});
  ds.samples.push_back({3, 3, 3, 30.0, std::nullopt});
  const auto cutoff = regression_view(ds, TargetKind::cutoff, all_indices(ds));
  CHECK(cutoff.targets == std::vector<double>{10.0, 30.0});
  const auto width = regression_view(ds, TargetKind::width, all_indices(ds));
  CHECK(width.targets == std::vector<double>{5.0});
  CHECK(width.sample_indices == std::vector<std::size_t>{0});
}

TEST_CASE("generation excludes impedance-matched points and counts them") {
  GridSpec grid;
  grid.e = {2.0, 2.0, 1, false};
  grid.rho = {0.5, 0.5, 1, false};
  grid.h = {1.0, 1.0, 1, false};
  const auto ds = generate_bragg(grid);
  CHECK(ds.samples.empty());
  CHECK(ds.provenance.excluded_count == 1);
  CHECK(ds.provenance.source == "generated");
}

TEST_CASE("generation at the base point matches the dispersion oracle") {
  GridSpec grid;
  grid.e = {0.1, 0.1, 1, false};
  grid.rho = {0.1, 0.1, 1, false};
  grid.h = {0.1, 0.1, 1, false};
  const auto ds = generate_bragg(grid);
  REQUIRE(ds.samples.size() == 1);
  CHECK(*ds.samples[0].cutoff_hz ==
        doctest::Approx(16.9525452845597).epsilon(1e-8));
  CHECK(*ds.samples[0].width_hz ==
        doctest::Approx(13.7181090358255).epsilon(1e-8));
}

TEST_CASE("generation is order independent across worker counts") {
  GridSpec grid;
  grid.e = {0.1, 100.0, 3, true};
  grid.rho = {0.5, 5.0, 3, false};
  grid.h = {0.5, 5.0, 2, false};
  const auto a = generate_bragg(grid, dispersion::kRubber, {}, 1);
  const auto b = generate_bragg(grid, dispersion::kRubber, {}, 4);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(a.samples[i].e_ratio == b.samples[i].e_ratio);
    CHECK(a.samples[i].cutoff_hz == b.samples[i].cutoff_hz);
    CHECK(a.samples[i].width_hz == b.samples[i].width_hz);
  }
  CHECK(a.provenance.excluded_count == b.provenance.excluded_count);
}

TEST_CASE("default sweep grid retains about 2269 samples") {
  const auto ds = generate_bragg(GridSpec{}, dispersion::kRubber, {}, 0);
  CHECK(ds.samples.size() == 2304);  // 16 x 12 x 12, nothing excluded
  CHECK(ds.provenance.excluded_count == 0);
}

TEST_CASE("grid axis values") {
  const auto lin = grid_axis_values({1.0, 3.0, 5, false});
  REQUIRE(lin.size() == 5);
  CHECK(lin.front() == 1.0);
  CHECK(lin.back() == 3.0);
  CHECK(lin[2] == doctest::Approx(2.0).epsilon(1e-15));

  const auto log = grid_axis_values({0.1, 1000.0, 5, true});
  REQUIRE(log.size() == 5);
  CHECK(log.front() == 0.1);
  CHECK(log.back() == 1000.0);
  CHECK(log[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(log[2] == doctest::Approx(10.0).epsilon(1e-12));

  CHECK(grid_axis_values({2.0, 2.0, 1, false}) == std::vector<double>{2.0});
  CHECK_THROWS_AS(grid_axis_values({0.0, 1.0, 4, false}), std::domain_error);
  CHECK_THROWS_AS(grid_axis_values({1.0, 2.0, 0, false}), std::domain_error);
}

TEST_CASE("provenance JSON round-trip") {
  Provenance p{"generated", "E:0.1..50000x16(log)", 35, 42};
  const auto back = provenance_from_json(provenance_json(p));
  CHECK(back.source == p.source);
  CHECK(back.detail == p.detail);
  CHECK(back.excluded_count == p.excluded_count);
  CHECK(back.seed == p.seed);
}

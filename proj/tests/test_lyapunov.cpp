#include <doctest.h>

#include <cmath>
#include <random>

#include "dilation/catalog.hpp"
#include "dilation/lyapunov.hpp"

using namespace dilation;

namespace {

const double kGolden = std::log((3.0 + std::sqrt(5.0)) / 2.0);

TheoremConfig small_config() {
  TheoremConfig c;
  c.family_budget = 2;
  c.n_schedule = {5, 10, 15, 20};
  c.nl_schedule = {200, 1000};
  c.m_list = {1, 2, 5};
  return c;
}

}  // namespace

TEST_CASE("spectrum examples") {
  const Point x = Point::Constant(2, 0.2718);
  const auto id = lyapunov_spectrum(make_system("identity"), x, 500, 50);
  for (double chi : id.chis) CHECK(chi == 0.0);
  CHECK(id.n_used == 450);
  CHECK(id.transient_discarded == 50);

  const auto cat = lyapunov_spectrum(make_system("cat_map"), x, 10000, 100);
  CHECK(std::abs(cat.chis[0] - kGolden) <= 1e-8);
  CHECK(std::abs(cat.chis[1] + kGolden) <= 1e-8);

  const auto diag = lyapunov_spectrum(make_system("diag_toral"), x, 2000, 0);
  CHECK(std::abs(diag.chis[0] - std::log(3.0)) <= 1e-10);
  CHECK(std::abs(diag.chis[1] - std::log(2.0)) <= 1e-10);

  CHECK_THROWS_AS(lyapunov_spectrum(make_system("cat_map"), x, 10, 10), std::invalid_argument);
  CHECK_THROWS_AS(lyapunov_spectrum(make_system("cat_map"), Point::Zero(3), 10, 1), DimensionError);
}

TEST_CASE("partial sums") {
  const Point x = Point::Constant(2, 0.11);
  const auto cat = lyapunov_spectrum(make_system("cat_map"), x, 5000, 100);
  CHECK(std::abs(chi_partial_sum(cat, 2)) <= 1e-8);
  const auto diag = lyapunov_spectrum(make_system("diag_toral"), x, 500, 0);
  CHECK(chi_partial_sum(diag, 1) == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(chi_partial_sum(diag, 2) == diag.chis[0] + diag.chis[1]);
  CHECK_THROWS_AS(chi_partial_sum(diag, 3), std::invalid_argument);
  CHECK_THROWS_AS(chi_partial_sum(diag, 0), std::invalid_argument);
}

TEST_CASE("spectrum properties") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  SUBCASE("linear spectra do not depend on the start") {
    for (int trial = 0; trial < 4; ++trial) {
      const Point x = Point::NullaryExpr(2, [&] { return unif(rng); });
      const auto s = lyapunov_spectrum(make_system("cat_map"), x, 4000, 100);
      CHECK(std::abs(s.chis[0] - kGolden) <= 1e-8);
    }
  }
  SUBCASE("partial sums match cocycle growth for linear systems") {
    const Point x = Point::Constant(2, 0.3);
    for (const std::string id : {"cat_map", "diag_toral"}) {
      const auto sys = make_system(id);
      const auto s = lyapunov_spectrum(sys, x, 10000, 1000);
      for (int k = 1; k <= 2; ++k) {
        CAPTURE(id);
        CHECK(std::abs(cocycle_log_norm(sys, x, 10000, k).value / 10000 - chi_partial_sum(s, k)) <= 1e-6);
      }
    }
  }
  SUBCASE("sorted, and the full sum is the mean log determinant") {
    for (const std::string id : {"standard_map", "perturbed_cat", "contraction", "doubling_nd"}) {
      const auto sys = make_system(id);
      const Point x = sys.from_unit_cube(Point::NullaryExpr(2, [&] { return unif(rng); }));
      const int n = 3000, transient = 300;
      const auto s = lyapunov_spectrum(sys, x, n, transient);
      CHECK(s.chis[0] >= s.chis[1]);
      double mean_log_det = 0.0;
      Point y = x;
      for (int step = 0; step < n; ++step) {
        if (step >= transient) mean_log_det += std::log(std::abs(jacobian(sys, y).determinant()));
        y = evaluate(sys, y);
      }
      mean_log_det /= n - transient;
      CAPTURE(id);
      CHECK(std::abs(s.chis[0] + s.chis[1] - mean_log_det) <= 1e-8);
    }
  }
}

TEST_CASE("limit diagnostic") {
  SUBCASE("linear systems are constant in m") {
    const auto sys = make_system("diag_toral");
    const auto mu = build_empirical_measure(sys, Point::Constant(2, 0.4), 500, 10);
    const auto series = limit_diagnostic(mu, sys, 1, {1, 2, 5, 10}, 50.0);
    REQUIRE(series.size() == 4);
    for (const auto& [m, v] : series) CHECK(std::abs(v - series.front().second) <= 1e-8);
  }
  SUBCASE("identity is zero") {
    const auto sys = make_system("identity");
    const auto mu = build_empirical_measure(sys, Point::Constant(2, 0.4), 100, 5);
    for (const auto& [m, v] : limit_diagnostic(mu, sys, 2, {1, 5}, 50.0)) CHECK(v == 0.0);
  }
  SUBCASE("standard map subadditivity") {
    const auto sys = make_system("standard_map", {{"K", 1.5}});
    const auto mu = build_empirical_measure(sys, Point::Constant(2, 0.123), 5000, 10);
    const auto series = limit_diagnostic(mu, sys, 1, {1, 10}, 50.0);
    CHECK(series[1].second <= series[0].second + 0.05);
  }
  SUBCASE("m must stay below n_l") {
    const auto sys = make_system("cat_map");
    const auto mu = build_empirical_measure(sys, Point::Constant(2, 0.4), 10, 1);
    CHECK_THROWS_AS(limit_diagnostic(mu, sys, 1, {10}, 50.0), std::invalid_argument);
    CHECK_THROWS_AS(limit_diagnostic(mu, sys, 1, {}, 50.0), std::invalid_argument);
  }
}

TEST_CASE("theorem verification") {
  SUBCASE("cat map") {
    const auto sys = make_system("cat_map");
    auto config = small_config();
    const auto one = verify_theorem(sys, 1, config);
    CHECK(one.verdict);
    CHECK(std::abs(one.dilation.d_k_hat - kGolden) <= 0.05);
    CHECK(std::abs(one.chi_partial_sum - kGolden) <= 1e-6);
    config.tolerance = 0.02;
    const auto two = verify_theorem(sys, 2, config);
    CHECK(two.verdict);
    CHECK(std::abs(two.dilation.d_k_hat) <= 0.02);
    CHECK(std::abs(two.chi_partial_sum) <= 1e-8);
  }
  SUBCASE("identity") {
    const auto sys = make_system("identity");
    for (int k = 1; k <= 2; ++k) {
      const auto rep = verify_theorem(sys, k, small_config());
      CHECK(rep.verdict);
      CHECK(std::abs(rep.dilation.d_k_hat) <= 1e-9);
      CHECK(rep.chi_partial_sum == 0.0);
    }
  }
  SUBCASE("report structure") {
    const auto rep = verify_theorem(make_system("diag_toral"), 1, small_config());
    CHECK(rep.verdict == (rep.dilation.d_k_hat <= rep.chi_partial_sum + rep.tolerance));
    REQUIRE(rep.levels.size() == 2);
    CHECK(rep.levels[0].n_l == 200);
    CHECK(rep.levels[0].spreads.size() == 3);
    CHECK(rep.levels[1].witness.n == 1000);
    CHECK(rep.limit_diagnostic.size() == 3);
    CHECK(rep.spectrum.transient_discarded == 100);
    CHECK(rep.family.size() == 4);
    bool saw_dilation = false;
    for (const auto& [stage, seconds] : rep.stage_seconds) {
      CHECK(seconds >= 0.0);
      saw_dilation = saw_dilation || stage == "dilation";
    }
    CHECK(saw_dilation);
  }
  SUBCASE("invalid configs") {
    const auto sys = make_system("cat_map");
    auto config = small_config();
    config.m_list = {1, 300};
    CHECK_THROWS_AS(verify_theorem(sys, 1, config), std::invalid_argument);
    config = small_config();
    config.n_schedule = {10, 5};
    CHECK_THROWS_AS(verify_theorem(sys, 1, config), std::invalid_argument);
    CHECK_THROWS_AS(verify_theorem(sys, 3, small_config()), std::invalid_argument);
  }
  SUBCASE("stage failures are tagged") {
    const StageError e("witness", "boom");
    CHECK(e.stage() == "witness");
    CHECK(std::string(e.what()) == "witness: boom");
  }
}

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "dilation/catalog.hpp"
#include "dilation/measure.hpp"

using namespace dilation;

namespace {

Disk axis_disk(const SystemDef& system, int axis) {
  Disk disk;
  disk.id = "axis";
  disk.k = 1;
  disk.base = system.center();
  disk.frame = Matrix::Zero(system.dim(), 1);
  disk.frame(axis, 0) = 1.0;
  disk.scale = 0.1;
  return disk;
}

WitnessResult witness_at(const SystemDef& system, const Point& x, int n, int k) {
  WitnessResult w;
  w.x_witness = x;
  w.n = n;
  w.k = k;
  w.log_cocycle = cocycle_log_norm(system, x, n, k).value;
  return w;
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("dilation_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("witness examples") {
  SUBCASE("linear maps pick the first node") {
    const auto cat = make_system("cat_map");
    const auto w = witness_point(cat, axis_disk(cat, 0), 10, 1, default_grid(1));
    CHECK(w.node_index == 0);
    CHECK(w.log_cocycle >= w.log_ratio - 1e-12);
  }
  SUBCASE("identity") {
    const auto id = make_system("identity");
    const auto w = witness_point(id, axis_disk(id, 1), 10, 1, default_grid(1));
    CHECK(w.log_cocycle == 0.0);
    CHECK(std::abs(w.log_ratio) <= 1e-15);
  }
  SUBCASE("standard map, n = 15") {
    const auto sm = make_system("standard_map", {{"K", 1.5}});
    for (const auto& disk : default_disk_family(sm, 1, 4, 2)) {
      const auto w = witness_point(sm, disk, 15, 1, default_grid(1));
      CHECK(w.log_cocycle >= w.log_ratio - 1e-12);
      CHECK(w.log_cocycle >= w.log_ratio - std::log(2.0));
      CHECK(w.epsilon <= 1e-12);
    }
  }
  SUBCASE("witness node attains the maximum node cocycle") {
    const auto pc = make_system("perturbed_cat");
    const auto disk = default_disk_family(pc, 1, 1, 3).back();
    const auto grid = default_grid(1);
    const auto w = witness_point(pc, disk, 20, 1, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(cocycle_log_norm(pc, disk_point(pc, disk, grid.node(i)), 20, 1).value <= w.log_cocycle + 1e-12);
    }
  }
  SUBCASE("errors") {
    const auto cat = make_system("cat_map");
    CHECK_THROWS_AS(witness_point(cat, axis_disk(cat, 0), 0, 1, default_grid(1)), std::invalid_argument);
    CHECK_THROWS_AS(witness_point(cat, axis_disk(cat, 0), 5, 2, default_grid(2)), std::invalid_argument);
  }
}

TEST_CASE("empirical measure") {
  const auto cat = make_system("cat_map");
  const Point x = Point::Constant(2, 0.1234);
  const auto mu = build_empirical_measure(cat, x, 100, 7);
  CHECK(mu.atoms.size() == 94);
  CHECK(mu.total_mass() == 94.0 / 100.0);
  CHECK(mu.atom_weight() == 0.01);
  for (std::size_t p = 0; p + 1 < mu.atoms.size(); ++p) CHECK(mu.atoms[p + 1] == evaluate(cat, mu.atoms[p]));
  const auto pair = build_empirical_measure(cat, x, 10, 9);
  CHECK(pair.atoms.size() == 2);
  CHECK(pair.total_mass() == doctest::Approx(0.2));
  CHECK_THROWS_AS(build_empirical_measure(cat, x, 10, 10), std::invalid_argument);
}

TEST_CASE("spreading on a diagonal map against closed forms") {
  const auto diag = make_system("diag_toral");
  const double l3 = std::log(3.0);
  const int n_l = 50;
  const int m = 5;
  const auto spread = spread_in_time(diag, witness_at(diag, Point::Constant(2, 0.3), n_l, 1), m, 1, 50.0);
  const auto& rep = spread.report;
  CHECK(rep.middle == doctest::Approx(l3 * (n_l - m + 1) / static_cast<double>(n_l)).epsilon(1e-12));
  double tail = 0.0, head = 0.0;
  for (int i = 0; i < m; ++i) {
    CHECK(i + m * rep.q[static_cast<std::size_t>(i)] + rep.r[static_cast<std::size_t>(i)] == n_l);
    CHECK(rep.r[static_cast<std::size_t>(i)] >= 0);
    CHECK(rep.r[static_cast<std::size_t>(i)] < m);
    tail += rep.r[static_cast<std::size_t>(i)] * l3;
    head += i * l3;
  }
  CHECK(rep.a_l == doctest::Approx(tail / (m * n_l)).epsilon(1e-12));
  CHECK(rep.b_l == doctest::Approx(head / (m * n_l)).epsilon(1e-12));
  CHECK(rep.bound_L == doctest::Approx(3.0));
  CHECK(rep.a_l <= rep.ab_bound + 1e-12);
  CHECK(rep.b_l <= rep.ab_bound + 1e-12);
  CHECK(rep.chain_slack <= 1e-9);
  CHECK(rep.lhs == doctest::Approx(l3));
  for (double t : rep.telescoped) CHECK(rep.log_full <= t + 1e-9);
}

TEST_CASE("spreading on the cat map, k = 2") {
  const auto cat = make_system("cat_map");
  for (int m : {1, 3, 10}) {
    const auto spread = spread_in_time(cat, witness_at(cat, Point::Constant(2, 0.2), 200, 2), m, 2, 50.0);
    CHECK(std::abs(spread.report.middle) <= 1e-8);
  }
}

TEST_CASE("spreading boundary case m = n_l - 1") {
  const auto sm = make_system("standard_map", {{"K", 1.5}});
  const int n_l = 40;
  const auto spread = spread_in_time(sm, witness_at(sm, Point::Constant(2, 0.17), n_l, 1), n_l - 1, 1, 50.0);
  CHECK(spread.measure.atoms.size() == 2);
  CHECK(spread.measure.total_mass() == doctest::Approx(2.0 / n_l));
  CHECK(spread.report.chain_slack <= 1e-9);
  CHECK(spread.report.a_l <= spread.report.ab_bound + 1e-12);
  CHECK(spread.report.b_l <= spread.report.ab_bound + 1e-12);
}

TEST_CASE("spreading chain on nonlinear orbits") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (const std::string id : {"standard_map", "perturbed_cat", "doubling_nd"}) {
    const auto sys = make_system(id);
    for (int trial = 0; trial < 3; ++trial) {
      const Point x = Point::NullaryExpr(2, [&] { return unif(rng); });
      for (int k = 1; k <= 2; ++k) {
        for (int m : {1, 2, 7}) {
          const auto rep = spread_in_time(sys, witness_at(sys, x, 120, k), m, k, 50.0).report;
          CAPTURE(id);
          CAPTURE(m);
          CHECK(rep.chain_slack <= 1e-9);
          CHECK(rep.a_l <= rep.ab_bound + 1e-9);
          CHECK(rep.b_l <= rep.ab_bound + 1e-9);
          for (double t : rep.telescoped) CHECK(rep.log_full <= t + 1e-9);
        }
      }
    }
  }
  const auto cat = make_system("cat_map");
  CHECK_THROWS_AS(spread_in_time(cat, witness_at(cat, Point::Constant(2, 0.2), 10, 1), 10, 1, 50.0),
                  std::invalid_argument);
}

TEST_CASE("integrate_log_norm") {
  SUBCASE("identity") {
    const auto id = make_system("identity");
    const auto mu = build_empirical_measure(id, Point::Constant(2, 0.4), 50, 3);
    for (double r : {0.0, 1.0, 100.0}) CHECK(integrate_log_norm(mu, id, 3, 1, r) == 0.0);
  }
  SUBCASE("doubling has a constant integrand") {
    const auto dbl = make_system("doubling");
    const auto mu = build_empirical_measure(dbl, Point::Constant(1, 0.3), 80, 10);
    for (int m : {1, 4, 9}) {
      const double expected = std::log(2.0) * mu.total_mass();
      CHECK(std::abs(integrate_log_norm(mu, dbl, m, 1, 50.0) - expected) <= 1e-10);
    }
  }
  SUBCASE("inactive truncation") {
    const auto sm = make_system("standard_map");
    const auto mu = build_empirical_measure(sm, Point::Constant(2, 0.3), 100, 5);
    const double plain = integrate_log_norm(mu, sm, 5, 1, 1e300);
    CHECK(integrate_log_norm(mu, sm, 5, 1, 0.0) == plain);
  }
  SUBCASE("truncation is monotone and saturates") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> unif(0.05, 0.95);
    std::uniform_real_distribution<double> scale(0.1, 0.9);
    for (int trial = 0; trial < 6; ++trial) {
      const auto sys = make_system("contraction", {{"s", scale(rng)}});
      const auto mu = build_empirical_measure(sys, Point::NullaryExpr(2, [&] { return unif(rng); }), 60, 4);
      for (int k = 1; k <= 2; ++k) {
        double lowest = 0.0;
        for (const auto& atom : mu.atoms) lowest = std::min(lowest, cocycle_log_norm(sys, atom, 4, k).value);
        double prev = std::numeric_limits<double>::infinity();
        for (double r : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
          const double v = integrate_log_norm(mu, sys, 4, k, r);
          CHECK(v <= prev);
          prev = v;
        }
        double untruncated = 0.0;
        for (const auto& atom : mu.atoms) untruncated += cocycle_log_norm(sys, atom, 4, k).value;
        untruncated *= mu.atom_weight() / 4;
        CHECK(integrate_log_norm(mu, sys, 4, k, -lowest + 1.0) == doctest::Approx(untruncated).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("invariance residual") {
  const auto cat = make_system("cat_map");
  SUBCASE("fixed point") {
    const auto mu = build_empirical_measure(cat, Point::Zero(2), 100, 1);
    CHECK(invariance_residual(mu, cat, 20, 1) == 0.0);
  }
  SUBCASE("constant test function") {
    const auto mu = build_empirical_measure(cat, Point::Constant(2, 0.31), 100, 1);
    TestFunction g;
    g.wave = Eigen::VectorXi::Zero(2);
    g.phase = 0.4;
    CHECK(test_function_residual(mu, cat, g) == 0.0);
  }
  SUBCASE("decreases with orbit length") {
    const Point x = Point::Constant(2, 0.1234567);
    const double small = invariance_residual(build_empirical_measure(cat, x, 1000, 10), cat, 20, 1);
    const double large = invariance_residual(build_empirical_measure(cat, x, 10000, 10), cat, 20, 1);
    CHECK(large < small);
    CHECK(large < 0.02);
  }
  SUBCASE("test functions are seeded and nonconstant") {
    const auto a = make_test_functions(3, 20, 5);
    const auto b = make_test_functions(3, 20, 5);
    REQUIRE(a.size() == 20);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].wave == b[i].wave);
      CHECK(a[i].phase == b[i].phase);
      CHECK_FALSE(a[i].wave.isZero());
      CHECK(a[i].wave.cwiseAbs().maxCoeff() <= 3);
    }
  }
  CHECK_THROWS_AS(invariance_residual(build_empirical_measure(cat, Point::Zero(2), 10, 1), cat, 0, 1),
                  std::invalid_argument);
}

TEST_CASE("measure cache") {
  const auto sm = make_system("standard_map", {{"K", 0.5}});
  const Point x = Point::Constant(2, 0.123456789);
  const auto dir = scratch_dir("cache");
  const auto first = cached_empirical_measure(dir, sm, x, 300, 5);
  const auto path = dir / measure_cache_key(sm, x, 300, 5);
  REQUIRE(std::filesystem::exists(path));
  const auto second = cached_empirical_measure(dir, sm, x, 300, 5);
  REQUIRE(first.atoms.size() == second.atoms.size());
  for (std::size_t i = 0; i < first.atoms.size(); ++i) CHECK(first.atoms[i] == second.atoms[i]);

  const auto loaded = load_measure(path, sm);
  REQUIRE(loaded.has_value());
  CHECK(loaded->atoms.back() == first.atoms.back());
  CHECK_FALSE(load_measure(path, make_system("standard_map", {{"K", 0.6}})).has_value());
  CHECK(measure_cache_key(sm, x, 300, 5) != measure_cache_key(sm, x, 300, 6));
  CHECK(measure_cache_key(sm, x, 300, 5) != measure_cache_key(make_system("standard_map"), x, 300, 5));

  {
    std::ofstream broken(path);
    broken << "garbage\n";
  }
  const auto rebuilt = cached_empirical_measure(dir, sm, x, 300, 5);
  CHECK(rebuilt.atoms.back() == first.atoms.back());
  std::filesystem::remove_all(dir);
}

#include <doctest.h>

#include <cmath>
#include <random>

#include "dilation/catalog.hpp"
#include "dilation/dynamics.hpp"

using namespace dilation;

namespace {

Point pt(std::initializer_list<double> v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

// Central differences written against map_raw, independent of the library's own helper.
Matrix central_differences(const SystemDef& system, const Point& x, double h) {
  const int d = system.dim();
  Matrix out(d, d);
  for (int j = 0; j < d; ++j) {
    Point plus = x, minus = x;
    plus[j] += h;
    minus[j] -= h;
    out.col(j) = (system.map_raw(plus) - system.map_raw(minus)) / (2.0 * h);
  }
  return out;
}

}  // namespace

TEST_CASE("identity leaves points fixed") {
  const auto sys = make_system("identity");
  const Point y = evaluate(sys, pt({0.3, 0.7}));
  CHECK(y[0] == 0.3);
  CHECK(y[1] == 0.7);
}

TEST_CASE("cat map at (0.5, 0.5)") {
  // [[2,1],[1,1]] (0.5, 0.5) = (1.5, 1.0) which wraps to (0.5, 0.0).
  const Point y = evaluate(make_system("cat_map"), pt({0.5, 0.5}));
  CHECK(y[0] == 0.5);
  CHECK(y[1] == 0.0);
}

TEST_CASE("doubling map at 0.75") {
  CHECK(evaluate(make_system("doubling"), pt({0.75}))[0] == 0.5);
}

TEST_CASE("constant jacobians of linear systems") {
  const auto cat = make_system("cat_map");
  Matrix expected(2, 2);
  expected << 2, 1, 1, 1;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    CHECK((jacobian(cat, pt({unif(rng), unif(rng)})) - expected).norm() == 0.0);
  }
  CHECK(jacobian(make_system("doubling"), pt({0.37}))(0, 0) == 2.0);
}

TEST_CASE("orbits") {
  SUBCASE("n = 0 holds only the start") {
    const Orbit orbit = iterate(make_system("cat_map"), pt({0.2, 0.4}), 0);
    REQUIRE(orbit.points.size() == 1);
    CHECK(orbit.length() == 0);
    CHECK(orbit.start()[0] == 0.2);
  }
  SUBCASE("cat map fixes the origin") {
    const Orbit orbit = iterate(make_system("cat_map"), pt({0.0, 0.0}), 10);
    REQUIRE(orbit.points.size() == 11);
    for (const auto& p : orbit.points) CHECK(p.norm() == 0.0);
  }
  SUBCASE("doubling map from 1/3 against exact rationals") {
    // Numerators over 3 under p -> 2p mod 3.
    const Orbit orbit = iterate(make_system("doubling"), pt({1.0 / 3.0}), 2);
    int num = 1;
    for (const auto& p : orbit.points) {
      CHECK(p[0] == doctest::Approx(num / 3.0).epsilon(1e-15));
      num = (2 * num) % 3;
    }
  }
  SUBCASE("negative length is rejected") {
    CHECK_THROWS_AS(iterate(make_system("cat_map"), pt({0.1, 0.1}), -1), std::invalid_argument);
  }
}

TEST_CASE("dimension mismatch") {
  CHECK_THROWS_AS(evaluate(make_system("cat_map"), pt({0.1})), DimensionError);
  CHECK_THROWS_AS(jacobian(make_system("doubling"), pt({0.1, 0.2})), DimensionError);
}

TEST_CASE("analytic jacobians agree with central differences") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(0.05, 0.95);
  for (const auto& entry : catalog()) {
    CAPTURE(entry.id);
    const auto sys = make_system(entry.id);
    for (int i = 0; i < 100; ++i) {
      Point x(sys.dim());
      for (int j = 0; j < sys.dim(); ++j) x[j] = unif(rng);
      const Matrix analytic = jacobian(sys, x);
      const Matrix fd = central_differences(sys, x, 1e-6);
      const double rel = (analytic - fd).norm() / std::max(analytic.norm(), 1.0);
      CHECK(rel <= 1e-5);
      CHECK(jacobian_fd_error(sys, x) <= 1e-5);
    }
  }
  SUBCASE("standard map at the origin") {
    const auto sys = make_system("standard_map", {{"K", 1.0}});
    const Point x = pt({0.0, 0.0});
    const Matrix fd = central_differences(sys, x, 1e-6);
    CHECK((jacobian(sys, x) - fd).norm() / jacobian(sys, x).norm() <= 1e-5);
  }
}

TEST_CASE("long orbits stay in the domain") {
  for (const auto& entry : catalog()) {
    CAPTURE(entry.id);
    const auto sys = make_system(entry.id);
    Point x = sys.from_unit_cube(Eigen::VectorXd::Constant(sys.dim(), 0.123));
    for (int step = 0; step < 10000; ++step) {
      x = evaluate(sys, x);
      REQUIRE(sys.contains(x));
    }
  }
}

TEST_CASE("lipschitz bounds") {
  CHECK(lipschitz_bound(make_system("identity"), 64) == 1.0);
  CHECK(lipschitz_bound(make_system("cat_map"), 64) == doctest::Approx((3.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-12));
  CHECK(lipschitz_bound(make_system("contraction"), 64) == 1.0);
  SUBCASE("monotone in the sample count") {
    for (const char* id : {"standard_map", "perturbed_cat"}) {
      CAPTURE(id);
      const auto sys = make_system(id);
      double prev = 0.0;
      for (int samples : {1, 4, 16, 64, 256, 1024}) {
        const double value = lipschitz_bound(sys, samples);
        CHECK(value >= prev);
        prev = value;
      }
    }
  }
}

TEST_CASE("catalog") {
  CHECK_THROWS_AS(make_system("no_such_system"), std::invalid_argument);
  CHECK_THROWS_AS(make_system("standard_map", {{"Q", 1.0}}), std::invalid_argument);
  CHECK(make_system("standard_map").params().at("K") == 1.0);
  CHECK_FALSE(known_spectrum("standard_map").has_value());
  const auto cat = known_spectrum("cat_map");
  REQUIRE(cat.has_value());
  CHECK((*cat)[0] == doctest::Approx(std::log((3.0 + std::sqrt(5.0)) / 2.0)));
  const auto diag = known_spectrum("diag_toral");
  REQUIRE(diag.has_value());
  CHECK((*diag)[0] == doctest::Approx(std::log(3.0)));
  CHECK((*diag)[1] == doctest::Approx(std::log(2.0)));
}

TEST_CASE("torus wrapping") {
  const auto sys = make_system("cat_map");
  const Point w = sys.wrap(pt({1.0, -0.25}));
  CHECK(w[0] == 0.0);
  CHECK(w[1] == 0.75);
  CHECK(sys.contains(w));
  CHECK_FALSE(sys.contains(pt({1.0, 0.5})));
}

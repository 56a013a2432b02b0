#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "vofem/errors.hpp"
#include "vofem/fracops.hpp"
#include "vofem/tmesh.hpp"

using namespace vofem;

TEST_CASE("mesh nodes") {
  SUBCASE("uniform") {
    const auto m = build_mesh(1.0, 4, 1.0);
    const double expect[] = {0, 0.25, 0.5, 0.75, 1};
    for (int n = 0; n <= 4; ++n) CHECK(m.t(n) == expect[n]);
  }
  SUBCASE("quadratic grading") {
    const auto m = build_mesh(1.0, 4, 2.0);
    const double expect[] = {0, 1.0 / 16, 0.25, 9.0 / 16, 1};
    for (int n = 0; n <= 4; ++n) CHECK(m.t(n) == doctest::Approx(expect[n]).epsilon(1e-15));
  }
  SUBCASE("longer horizon") {
    const auto m = build_mesh(2.0, 2, 3.0);
    CHECK(m.t(0) == 0.0);
    CHECK(m.t(1) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(m.t(2) == 2.0);
  }
}

TEST_CASE("mesh rejects bad parameters") {
  CHECK_THROWS_AS(build_mesh(1.0, 0, 1.0), DomainError);
  CHECK_THROWS_AS(build_mesh(1.0, 4, 0.9), DomainError);
  CHECK_THROWS_AS(build_mesh(0.0, 4, 1.0), DomainError);
}

TEST_CASE("uniform grading is the uniform partition") {
  for (int N : {1, 3, 7, 64, 1000}) {
    const auto m = build_mesh(1.5, N, 1.0);
    for (int n = 0; n <= N; ++n) CHECK(std::abs(m.t(n) - 1.5 * n / N) <= 1e-15 * 1.5);
  }
}

TEST_CASE("mesh invariants on random meshes") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> steps(1, 64);
  std::uniform_real_distribution<double> grad(1.0, 5.0), horizon(0.1, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int N = steps(rng);
    const double r = grad(rng), T = horizon(rng);
    const auto m = build_mesh(T, N, r);
    CHECK(m.t(0) == 0.0);
    CHECK(m.t(N) == T);
    for (int n = 1; n <= N; ++n) {
      CHECK(m.t(n) > m.t(n - 1));
      CHECK(std::abs(m.t(n) - T * std::pow(double(n) / N, r)) <= 1e-14 * T);
      CHECK(m.tau(n) == doctest::Approx(m.t(n) - m.t(n - 1)).epsilon(1e-15));
      const double lo = r * T * std::pow(n - 1.0, r - 1) / std::pow(N, r);
      const double hi = r * T * std::pow(double(n), r - 1) / std::pow(N, r);
      CHECK(m.tau(n) >= lo * (1 - 1e-12));
      CHECK(m.tau(n) <= hi * (1 + 1e-12));
    }
  }
}

TEST_CASE("automatic grading") {
  CHECK(auto_grading(1.0) == 1.0);
  CHECK(auto_grading(0.6) == doctest::Approx(2.0 / 0.6));
  CHECK(auto_grading(0.8) == doctest::Approx(2.5));
}

TEST_CASE("guarded power") {
  CHECK(guarded_pow(0.0, 0.3) == 0.0);
  CHECK(guarded_pow(-1e-300, 0.3) == 0.0);
  CHECK(guarded_pow(1e-200, 0.5) == doctest::Approx(1e-100).epsilon(1e-14));
  CHECK(guarded_pow(4.0, 0.5) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("weights for order one are all one") {
  const auto mesh = build_mesh(1.0, 9, 2.7);
  const auto order = make_constant_order(1.0);
  for (int n = 1; n <= 9; ++n) {
    const auto row = weight_row(mesh, order, n);
    for (int k = 0; k < n; ++k) CHECK(row.b(k) == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("weights for order one half") {
  const auto order = make_constant_order(0.5);
  CHECK(weight_row(build_mesh(1.0, 4, 1.0), order, 1).b(0) == doctest::Approx(2.0).epsilon(1e-14));
  const auto row = weight_row(build_mesh(1.0, 2, 1.0), order, 2);
  CHECK(row.b(0) == doctest::Approx(0.585786437626905).epsilon(1e-13));
  CHECK(row.b(1) == doctest::Approx(1.414213562373095).epsilon(1e-13));
  // independent check of the first entry from its definition
  CHECK(row.b(0) == doctest::Approx((1.0 - std::sqrt(0.5)) / 0.5).epsilon(1e-14));
}

TEST_CASE("weight row index range") {
  const auto mesh = build_mesh(1.0, 4, 1.0);
  const auto order = make_constant_order(0.5);
  CHECK_THROWS_AS(weight_row(mesh, order, 0), IndexError);
  CHECK_THROWS_AS(weight_row(mesh, order, 5), IndexError);
}

TEST_CASE("weight inequalities on random instances") {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> steps(1, 64);
  std::uniform_real_distribution<double> grad(1.0, 5.0), a(0.05, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int N = steps(rng);
    const auto mesh = build_mesh(1.0, N, grad(rng));
    const auto order = trial % 2 ? make_transition_order(a(rng), a(rng)) : make_constant_order(a(rng));
    const int n = std::uniform_int_distribution<int>(1, N)(rng);
    const auto row = weight_row(mesh, order, n);
    const double al = order(mesh.t(n));
    CHECK(row.alpha_n == al);
    CHECK(row.b(n - 1) == doctest::Approx(std::pow(mesh.tau(n), al - 1)).epsilon(1e-12));
    for (int k = 1; k <= n; ++k) {
      CHECK(row.b(k - 1) > 0.0);
      if (k > 1) CHECK(row.b(k - 1) >= row.b(k - 2) * (1 - 1e-14));
      if (k < n) {
        const double lo = al * std::pow(mesh.t(n) - mesh.t(k - 1), al - 1);
        const double hi = al * std::pow(mesh.t(n) - mesh.t(k), al - 1);
        CHECK(row.b(k - 1) >= lo * (1 - 1e-12));
        CHECK(row.b(k - 1) <= hi * (1 + 1e-12));
      }
    }
    if (al < 1.0)
      for (int k = 2; k <= n; ++k) CHECK(row.b(k - 1) > row.b(k - 2));
  }
}

TEST_CASE("discrete operator annihilates constants") {
  const auto mesh = build_mesh(1.0, 16, 3.0);
  const auto order = make_transition_order(0.6, 0.4);
  const std::vector<double> g(17, 2.5);
  for (int n = 1; n <= 16; ++n) CHECK(discrete_caputo(std::span(g).first(n + 1), mesh, order, n) == 0.0);
}

TEST_CASE("discrete operator is exact on linear data") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> coef(-2.0, 2.0), a(0.1, 1.0), grad(1.0, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int N = 1 + trial;
    const auto mesh = build_mesh(1.0, N, grad(rng));
    const auto order = make_transition_order(a(rng), a(rng));
    const double c0 = coef(rng), c1 = coef(rng);
    std::vector<double> g(N + 1), shifted(N + 1);
    for (int n = 0; n <= N; ++n) {
      g[n] = c1 * mesh.t(n);
      shifted[n] = c0 + g[n];
    }
    for (int n = 1; n <= N; ++n) {
      const double al = order(mesh.t(n));
      const double exact = c1 * std::pow(mesh.t(n), al) / std::tgamma(1 + al);
      const auto row = weight_row(mesh, order, n);
      const double got = discrete_caputo(std::span(g).first(n + 1), row);
      CHECK(std::abs(got - exact) <= 1e-12 * std::abs(exact));
      // an offset only adds rounding of the data, amplified by the weights
      double amplification = 0.0;
      for (int k = 1; k <= n; ++k) amplification += row.b(k - 1) * (std::abs(shifted[k]) + std::abs(shifted[k - 1]));
      const double drift = 4 * std::numeric_limits<double>::epsilon() * amplification / std::tgamma(1 + al);
      const double got_shifted = discrete_caputo(std::span(shifted).first(n + 1), row);
      CHECK(std::abs(got_shifted - exact) <= 1e-12 * std::abs(exact) + drift);
    }
  }
}

TEST_CASE("discrete operator approximates the Caputo derivative of t^2") {
  const auto mesh = build_mesh(1.0, 64, 1.0);
  const auto order = make_constant_order(0.5);
  std::vector<double> g(65);
  for (int n = 0; n <= 64; ++n) g[n] = mesh.t(n) * mesh.t(n);
  const ScalarFn sq{[](double t) { return t * t; }, [](double t) { return 2 * t; }};
  const double ref = caputo_vo(sq, order, 1.0);
  CHECK(ref == doctest::Approx(2.0 / std::tgamma(2.5)).epsilon(1e-10));
  CHECK(std::abs(discrete_caputo(g, mesh, order, 64) - ref) <= 2e-3);
}

TEST_CASE("discrete operator checks the history length") {
  const auto mesh = build_mesh(1.0, 4, 1.0);
  const std::vector<double> g(3, 0.0);
  CHECK_THROWS_AS(discrete_caputo(g, mesh, make_constant_order(0.5), 4), LengthError);
}

TEST_CASE("weight table with and without caching") {
  const auto mesh = build_mesh(1.0, 12, 2.0);
  const auto order = make_transition_order(0.7, 0.3);
  WeightTable cached(mesh, order, true), fresh(mesh, order, false);
  for (int n : {3, 7, 3, 12, 1}) {
    const auto direct = weight_row(mesh, order, n);
    CHECK(cached.row(n).b == direct.b);
    CHECK(fresh.row(n).b == direct.b);
  }
}

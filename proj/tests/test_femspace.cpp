#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "vofem/errors.hpp"
#include "vofem/femspace.hpp"

using namespace vofem;

namespace {

constexpr double kPi = std::numbers::pi;

double factorial(int n) { return std::tgamma(n + 1.0); }

double sum_all(const SparseMatrix& A) {
  double s = 0.0;
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) s += it.value();
  return s;
}

// Piecewise-linear function with the given interior coefficients on a 1D mesh.
double eval_1d(const SpatialMesh& mesh, const FieldVector& c, double x) {
  const Eigen::VectorXd v = to_vertex_values(mesh, c);
  const int i = std::min(int(x / mesh.h), mesh.cells - 1);
  const double s = (x - i * mesh.h) / mesh.h;
  return (1 - s) * v(i) + s * v(i + 1);
}

double log2_ratio(double a, double b) { return std::log2(a / b); }

}  // namespace

TEST_CASE("mesh counts") {
  SUBCASE("interval") {
    const auto m = build_box_mesh(1, 4);
    CHECK(m.simplices.size() == 4);
    CHECK(m.num_dofs() == 3);
  }
  SUBCASE("square") {
    const auto m = build_box_mesh(2, 2);
    CHECK(m.simplices.size() == 8);
    CHECK(m.num_dofs() == 1);
    CHECK(m.vertices[m.dof_vertex[0]].isApprox(Point(0.5, 0.5, 0)));
  }
  SUBCASE("cube") {
    const auto m = build_box_mesh(3, 2);
    CHECK(m.simplices.size() == 48);
    CHECK(m.num_dofs() == 1);
  }
  for (int d = 1; d <= 3; ++d)
    for (int c : {2, 3, 5}) {
      const auto m = build_box_mesh(d, c);
      CHECK(m.simplices.size() == std::size_t(std::pow(c, d) * factorial(d)));
      CHECK(m.num_vertices() == int(std::pow(c + 1, d)));
      CHECK(m.num_dofs() == int(std::pow(c - 1, d)));
      CHECK(m.h == doctest::Approx(1.0 / c));
    }
}

TEST_CASE("mesh rejects bad parameters") {
  CHECK_THROWS_AS(build_box_mesh(0, 4), DomainError);
  CHECK_THROWS_AS(build_box_mesh(4, 4), DomainError);
  CHECK_THROWS_AS(build_box_mesh(2, 1), DomainError);
}

TEST_CASE("simplex volumes are positive and fill the box") {
  for (int d = 1; d <= 3; ++d) {
    const auto m = build_box_mesh(d, 4);
    double total = 0.0;
    for (std::size_t s = 0; s < m.simplices.size(); ++s) {
      const double v = simplex_volume(m, int(s));
      CHECK(v > 0.0);
      CHECK(v == doctest::Approx(std::pow(0.25, d) / factorial(d)).epsilon(1e-12));
      total += v;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("boundary vertices are exactly those on a face") {
  for (int d = 1; d <= 3; ++d) {
    const auto m = build_box_mesh(d, 3);
    for (int v = 0; v < m.num_vertices(); ++v) {
      bool on_face = false;
      for (int j = 0; j < d; ++j) on_face = on_face || m.vertices[v](j) == 0.0 || m.vertices[v](j) == 1.0;
      CHECK(m.is_boundary(v) == on_face);
      if (!on_face) CHECK(m.dof_vertex[m.interior_index[v]] == v);
    }
  }
}

TEST_CASE("1D mass matrix entries") {
  const auto m = build_box_mesh(1, 4);
  const SparseMatrix M = assemble_mass(m);
  for (int i = 0; i < 3; ++i) CHECK(M.coeff(i, i) == doctest::Approx(1.0 / 6).epsilon(1e-14));
  CHECK(M.coeff(0, 1) == doctest::Approx(1.0 / 24).epsilon(1e-14));
  CHECK(M.coeff(1, 2) == doctest::Approx(1.0 / 24).epsilon(1e-14));
  CHECK(M.coeff(0, 2) == 0.0);
  // two-point Gauss per element reproduces the diagonal: 2 * int_0^h (x/h)^2 = 2h/3
  const double g = 1 / std::sqrt(3.0), h = 0.25;
  const double w1 = 0.5 * (1 - g), w2 = 0.5 * (1 + g);
  CHECK(2 * (h / 2) * (w1 * w1 + w2 * w2) == doctest::Approx(M.coeff(1, 1)).epsilon(1e-14));
}

TEST_CASE("mass matrix partition of unity and symmetry") {
  for (int d = 1; d <= 3; ++d) {
    const auto m = build_box_mesh(d, 4);
    CHECK(sum_all(assemble_mass(m, DofScope::full)) == doctest::Approx(1.0).epsilon(1e-13));
    const SparseMatrix M = assemble_mass(m);
    CHECK((SparseMatrix(M.transpose()) - M).norm() == 0.0);
  }
}

TEST_CASE("1D stiffness entries") {
  const auto m = build_box_mesh(1, 4);
  const SparseMatrix A = assemble_stiffness(m, make_diagonal_diffusion(Eigen::Vector3d::Constant(1e-3)));
  CHECK(A.coeff(1, 0) == doctest::Approx(-0.004).epsilon(1e-13));
  CHECK(A.coeff(1, 1) == doctest::Approx(0.008).epsilon(1e-13));
  CHECK(A.coeff(1, 2) == doctest::Approx(-0.004).epsilon(1e-13));
}

TEST_CASE("stiffness annihilates constants and is SPD") {
  const auto K = make_diffusion([](const Point& x) {
    Eigen::Matrix3d k = Eigen::Matrix3d::Identity() * (1 + x(0));
    k(0, 1) = k(1, 0) = 0.2;
    return k;
  });
  for (int d = 1; d <= 3; ++d) {
    const auto m = build_box_mesh(d, 4);
    AssemblyOptions full;
    full.scope = DofScope::full;
    const SparseMatrix Af = assemble_stiffness(m, make_diagonal_diffusion(Eigen::Vector3d(1, 2, 3)), full);
    CHECK((Af * Eigen::VectorXd::Ones(Af.rows())).lpNorm<Eigen::Infinity>() <= 1e-12);
    if (d > 1) {
      const SparseMatrix Av = assemble_stiffness(m, K, full);
      CHECK((Av * Eigen::VectorXd::Ones(Av.rows())).lpNorm<Eigen::Infinity>() <= 1e-12);
      const SparseMatrix A = assemble_stiffness(m, K);
      CHECK((SparseMatrix(A.transpose()) - A).norm() <= 1e-13 * A.norm());
    }
  }
  const auto m = build_box_mesh(3, 6);
  const SparseMatrix A = assemble_stiffness(m, make_diagonal_diffusion(Eigen::Vector3d::Constant(1e-3)));
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  Eigen::VectorXd b(A.rows());
  for (auto& v : b) v = u(rng);
  SolverConfig cfg;
  const auto res = cg_solve(A, b, cfg);
  CHECK(res.residual <= cfg.rel_tol);
  CHECK(res.x.dot(A * res.x) > 0.0);
}

TEST_CASE("quadrature point sampling matches barycentre sampling for constant K") {
  const auto m = build_box_mesh(2, 5);
  const auto K = make_diffusion([](const Point&) { return Eigen::Matrix3d::Identity() * 0.3; });
  AssemblyOptions qp;
  qp.sample_at_quadrature_points = true;
  CHECK((assemble_stiffness(m, K, qp) - assemble_stiffness(m, K)).norm() <= 1e-14);
}

TEST_CASE("diffusion checks") {
  const auto m = build_box_mesh(2, 3);
  const auto bounds = check_diffusion(m, make_diagonal_diffusion(Eigen::Vector3d(1e-3, 2e-3, 5.0)));
  CHECK(bounds.lower == doctest::Approx(1e-3));
  CHECK(bounds.upper == doctest::Approx(2e-3));
  auto asym = make_diffusion([](const Point&) {
    Eigen::Matrix3d k = Eigen::Matrix3d::Identity();
    k(0, 1) = 0.5;
    return k;
  });
  CHECK_THROWS_AS(check_diffusion(m, asym), DomainError);
  auto indefinite = make_diffusion([](const Point&) { return Eigen::Vector3d(1, -1, 1).asDiagonal().toDenseMatrix(); });
  CHECK_THROWS_AS(check_diffusion(m, indefinite), DomainError);
}

TEST_CASE("simplex rule integrates degree-4 monomials exactly") {
  // int over the unit reference simplex of x^a y^b z^c = a! b! c! d! ... / (a + b + c + d)!
  for (int d = 1; d <= 3; ++d) {
    const auto& rule = simplex_rule(d);
    for (int a = 0; a <= 4; ++a)
      for (int b = 0; a + b <= 4; ++b)
        for (int c = 0; a + b + c <= 4; ++c) {
          if ((d < 2 && b) || (d < 3 && c)) continue;
          double sum = 0.0;
          for (std::size_t q = 0; q < rule.size(); ++q) {
            const auto& l = rule.bary[q];
            sum += rule.weights[q] * std::pow(l(1), a) * std::pow(d > 1 ? l(2) : 1.0, b) *
                   std::pow(d > 2 ? l(3) : 1.0, c);
          }
          sum /= factorial(d);
          const double exact = factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + d);
          CHECK(std::abs(sum - exact) <= 1e-13 * exact);
        }
  }
}

TEST_CASE("L2 norms of sine products") {
  const auto m1 = build_box_mesh(1, 256);
  CHECK(l2_error(m1, FieldVector::Zero(m1.num_dofs()), [](const Point& x) { return std::sin(2 * kPi * x(0)); }) ==
        doctest::Approx(std::sqrt(0.5)).epsilon(1e-10));
  const auto m3 = build_box_mesh(3, 8);
  auto prod = [](const Point& x) { return std::sin(2 * kPi * x(0)) * std::sin(2 * kPi * x(1)) * std::sin(2 * kPi * x(2)); };
  CHECK(l2_error(m3, FieldVector::Zero(m3.num_dofs()), prod) == doctest::Approx(std::pow(0.5, 1.5)).epsilon(1e-3));
}

TEST_CASE("L2 error vanishes on S_h") {
  const auto m = build_box_mesh(2, 4);
  // x y (1 - x)(1 - y) is not in S_h; its interpolant is, so compare the interpolant with itself
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(-1, 1);
  FieldVector c(m.num_dofs());
  for (auto& v : c) v = u(rng);
  const auto mesh1 = build_box_mesh(1, 8);
  FieldVector c1(mesh1.num_dofs());
  for (auto& v : c1) v = u(rng);
  CHECK(l2_error(mesh1, c1, [&](const Point& x) { return eval_1d(mesh1, c1, x(0)); }) <= 1e-14);
}

TEST_CASE("interpolation and vertex values") {
  const auto m = build_box_mesh(2, 4);
  auto f = [](const Point& x) { return x(0) * (1 - x(0)) * x(1); };
  const FieldVector c = interpolate(m, f);
  const Eigen::VectorXd v = to_vertex_values(m, c);
  for (int i = 0; i < m.num_vertices(); ++i)
    CHECK(v(i) == doctest::Approx(m.is_boundary(i) ? 0.0 : f(m.vertices[i])));
}

TEST_CASE("load vector of a constant sums to the interior mass") {
  const auto m = build_box_mesh(3, 4);
  const FieldVector b = assemble_load(m, [](const Point&) { return 1.0; });
  const SparseMatrix M = assemble_mass(m, DofScope::full);
  CHECK(b.size() == m.num_dofs());
  double expect = 0.0;
  for (int i = 0; i < m.num_dofs(); ++i) expect += M.row(m.dof_vertex[i]).sum();
  CHECK(b.sum() == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("Ritz projection is the identity on S_h") {
  const auto K = make_diagonal_diffusion(Eigen::Vector3d::Constant(1e-3));
  SUBCASE("1D random function") {
    const auto m = build_box_mesh(1, 8);
    FieldVector c(m.num_dofs());
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(-1, 1);
    for (auto& v : c) v = u(rng);
    SpatialField g{[&](const Point& x) { return eval_1d(m, c, x(0)); }, {}};
    CHECK((ritz_project(m, K, g) - c).lpNorm<Eigen::Infinity>() <= 1e-10);
  }
  SUBCASE("2D hat at the centre") {
    const auto m = build_box_mesh(2, 2);
    auto hat = [](const Point& x) {
      const double u = (x(0) - 0.5) / 0.5, v = (x(1) - 0.5) / 0.5;
      return std::max(0.0, 1.0 - std::max({std::abs(u), std::abs(v), std::abs(u - v)}));
    };
    const FieldVector face_route = ritz_project(m, K, SpatialField{hat, {}});
    REQUIRE(face_route.size() == 1);
    CHECK(face_route(0) == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("zero data") {
    const auto m = build_box_mesh(3, 3);
    SpatialField zero{[](const Point&) { return 0.0; }, [](const Point&) { return Eigen::Vector3d::Zero().eval(); }};
    CHECK(ritz_project(m, K, zero).norm() == 0.0);
  }
}

TEST_CASE("Ritz projection converges at second order") {
  const auto K = make_diagonal_diffusion(Eigen::Vector3d::Constant(1e-3));
  SpatialField g{[](const Point& x) { return std::sin(kPi * x(0)); },
                 [](const Point& x) { return Eigen::Vector3d(kPi * std::cos(kPi * x(0)), 0, 0); }};
  std::vector<double> errors;
  for (int c : {8, 16, 32}) {
    const auto m = build_box_mesh(1, c);
    errors.push_back(l2_error(m, ritz_project(m, K, g), g.value));
  }
  for (int i = 0; i + 1 < 3; ++i) {
    const double rate = log2_ratio(errors[i], errors[i + 1]);
    CHECK(rate >= 1.9);
    CHECK(rate <= 2.1);
  }
}

TEST_CASE("gradient and face routes give the same projection") {
  const auto K = make_diagonal_diffusion(Eigen::Vector3d(1e-3, 2e-3, 3e-3));
  auto val = [](const Point& x) { return std::sin(2 * kPi * x(0)) * std::sin(kPi * x(1)) * std::sin(kPi * x(2)); };
  auto grad = [](const Point& x) {
    const double sx = std::sin(2 * kPi * x(0)), sy = std::sin(kPi * x(1)), sz = std::sin(kPi * x(2));
    return Eigen::Vector3d(2 * kPi * std::cos(2 * kPi * x(0)) * sy * sz, kPi * sx * std::cos(kPi * x(1)) * sz,
                           kPi * sx * sy * std::cos(kPi * x(2)));
  };
  const auto m = build_box_mesh(3, 6);
  const FieldVector a = ritz_project(m, K, SpatialField{val, grad});
  const FieldVector b = ritz_project(m, K, SpatialField{val, {}});
  // both routes are quadrature approximations of the same load
  CHECK((a - b).lpNorm<Eigen::Infinity>() <= 1e-3 * a.lpNorm<Eigen::Infinity>());
}

TEST_CASE("Ritz projection rejects data that does not vanish on the boundary") {
  const auto m = build_box_mesh(2, 4);
  SpatialField g{[](const Point&) { return 1.0; }, {}};
  CHECK_THROWS_AS(ritz_project(m, make_diagonal_diffusion(Eigen::Vector3d::Ones()), g), DomainError);
}

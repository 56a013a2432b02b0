#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <vector>

#include "vofem/errors.hpp"

namespace vofem::quad {

template <typename Scalar>
struct Rule1D {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> nodes;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] by Newton iteration on P_n.
template <typename Scalar = double>
Rule1D<Scalar> gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: n must be positive");
  Rule1D<Scalar> rule{Eigen::Matrix<Scalar, Eigen::Dynamic, 1>(n),
                      Eigen::Matrix<Scalar, Eigen::Dynamic, 1>(n)};
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    Scalar z = std::cos(std::numbers::pi_v<Scalar> * (i + Scalar(0.75)) / (n + Scalar(0.5)));
    Scalar dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      Scalar p1 = 1, p2 = 0;
      for (int j = 1; j <= n; ++j) {
        const Scalar p3 = p2;
        p2 = p1;
        p1 = ((2 * j - 1) * z * p2 - (j - 1) * p3) / j;
      }
      dp = n * (z * p1 - p2) / (z * z - 1);
      const Scalar dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) <= 4 * std::numeric_limits<Scalar>::epsilon()) break;
    }
    Scalar p1 = 1, p2 = 0;
    for (int j = 1; j <= n; ++j) {
      const Scalar p3 = p2;
      p2 = p1;
      p1 = ((2 * j - 1) * z * p2 - (j - 1) * p3) / j;
    }
    dp = n * (z * p1 - p2) / (z * z - 1);
    const Scalar w = 2 / ((1 - z * z) * dp * dp);
    rule.nodes(i) = -z;
    rule.nodes(n - 1 - i) = z;
    rule.weights(i) = w;
    rule.weights(n - 1 - i) = w;
  }
  if (n % 2 == 1) rule.nodes(half - 1) = 0;
  return rule;
}

/// n-point Gauss-Jacobi rule on [-1, 1] for the weight (1 - x)^a (1 + x)^b,
/// via the Golub-Welsch eigenproblem of the Jacobi matrix.
template <typename Scalar = double>
Rule1D<Scalar> gauss_jacobi(int n, Scalar a, Scalar b) {
  if (n < 1) throw DomainError("gauss_jacobi: n must be positive");
  if (!(a > -1) || !(b > -1)) throw DomainError("gauss_jacobi: exponents must exceed -1");
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Vec diag(n), sub(std::max(n - 1, 1));
  const Scalar ab = a + b;
  for (int k = 0; k < n; ++k) {
    const Scalar s = 2 * k + ab;
    diag(k) = (k == 0) ? (b - a) / (ab + 2) : (b * b - a * a) / (s * (s + 2));
  }
  for (int k = 1; k < n; ++k) {
    const Scalar s = 2 * k + ab;
    sub(k - 1) = std::sqrt(4 * k * (k + a) * (k + b) * (k + ab) / (s * s * (s + 1) * (s - 1)));
  }
  const Scalar mu0 = std::exp((ab + 1) * std::log(Scalar(2)) + std::lgamma(a + 1) + std::lgamma(b + 1) -
                              std::lgamma(ab + 2));
  Rule1D<Scalar> rule;
  if (n == 1) {
    rule.nodes = Vec::Constant(1, diag(0));
    rule.weights = Vec::Constant(1, mu0);
    return rule;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> eig;
  eig.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
  rule.nodes = eig.eigenvalues();
  rule.weights = mu0 * eig.eigenvectors().row(0).transpose().array().square();
  return rule;
}

/// Quadrature on the reference d-simplex in barycentric coordinates.
/// Weights sum to 1, i.e. they are fractions of the simplex volume.
template <typename Scalar = double>
struct SimplexRule {
  int dim = 0;
  std::vector<Eigen::Matrix<Scalar, 4, 1>> bary;
  std::vector<Scalar> weights;

  std::size_t size() const { return weights.size(); }
};

/// Conical product (collapsed coordinate) rule, exact for total degree
/// 2n - 1. Built recursively: the d-simplex is the cone over the
/// (d-1)-simplex, with Jacobian (1 - z)^(d-1) absorbed by Gauss-Jacobi.
template <typename Scalar = double>
SimplexRule<Scalar> conical_simplex_rule(int dim, int n) {
  if (dim < 0 || dim > 3) throw DomainError("conical_simplex_rule: dim must be 0..3");
  SimplexRule<Scalar> rule;
  rule.dim = 0;
  Eigen::Matrix<Scalar, 4, 1> vertex = Eigen::Matrix<Scalar, 4, 1>::Zero();
  vertex(0) = 1;
  rule.bary.push_back(vertex);
  rule.weights.push_back(1);

  for (int d = 1; d <= dim; ++d) {
    const auto gj = gauss_jacobi<Scalar>(n, Scalar(d - 1), Scalar(0));
    SimplexRule<Scalar> next;
    next.dim = d;
    const Scalar total = gj.weights.sum();
    for (std::size_t p = 0; p < rule.size(); ++p) {
      for (int q = 0; q < n; ++q) {
        const Scalar z = (gj.nodes(q) + 1) / 2;
        Eigen::Matrix<Scalar, 4, 1> lam = (1 - z) * rule.bary[p];
        lam(d) = z;
        next.bary.push_back(lam);
        next.weights.push_back(rule.weights[p] * gj.weights(q) / total);
      }
    }
    rule = std::move(next);
  }
  return rule;
}

/// Integrates an integrand h(s, t - s) over [0, t] when h may carry
/// algebraic singularities at both ends. Each half of the interval is cut
/// into panels whose breakpoints accumulate at the endpoint as (i/P)^grading;
/// the distance to the nearer endpoint is passed through exactly so the
/// integrand never has to form a cancelling difference. P is doubled until
/// two successive sums agree to rel_tol relative to the integral of |h|.
struct GradedPanelConfig {
  double rel_tol = 1e-10;
  int max_panels = 1 << 16;
  double grading = 12.0;
  int order = 16;
  int initial_panels = 4;
};

struct GradedPanelResult {
  double value;
  double error_estimate;
  int panels;
};

template <typename Integrand>
GradedPanelResult graded_panel_integral(Integrand&& h, double t, const GradedPanelConfig& cfg) {
  static thread_local int cached_order = -1;
  static thread_local Rule1D<double> gl;
  if (cached_order != cfg.order) {
    gl = gauss_legendre<double>(cfg.order);
    cached_order = cfg.order;
  }
  const double half = 0.5 * t;

  auto sweep = [&](int panels, double& abs_sum) {
    double sum = 0.0;
    abs_sum = 0.0;
    for (int i = 0; i < panels; ++i) {
      const double a = half * std::pow(double(i) / panels, cfg.grading);
      const double b = half * std::pow(double(i + 1) / panels, cfg.grading);
      const double mid = 0.5 * (a + b), rad = 0.5 * (b - a);
      for (int q = 0; q < cfg.order; ++q) {
        const double u = mid + rad * gl.nodes(q);
        const double w = rad * gl.weights(q);
        // left half: s = u, distance to t is t - u; right half: t - s = u.
        const double left = h(u, t - u);
        const double right = h(t - u, u);
        sum += w * (left + right);
        abs_sum += w * (std::abs(left) + std::abs(right));
      }
    }
    return sum;
  };

  int panels = cfg.initial_panels;
  double scale = 0.0;
  double coarse = sweep(panels, scale);
  double est = 0.0;
  while (panels * 2 <= cfg.max_panels) {
    panels *= 2;
    double fine_scale = 0.0;
    const double fine = sweep(panels, fine_scale);
    est = std::abs(fine - coarse);
    if (est <= cfg.rel_tol * fine_scale) return {fine, est, panels};
    coarse = fine;
  }
  throw QuadratureError("graded_panel_integral: tolerance not met at max_panels", est);
}

}  // namespace vofem::quad

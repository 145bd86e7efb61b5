#include "stokesvem/error.hpp"
#include "stokesvem/polyspace.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace svem {

namespace {

using Rule1d = std::pair<std::vector<double>, std::vector<double>>;

// n-point Gauss-Legendre on [-1, 1] by Newton iteration on P_n.
Rule1d gauss_legendre(int n) {
  std::vector<double> x(n), w(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged root.
    double p0 = 1.0, p1 = 0.0;
    for (int j = 1; j <= n; ++j) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
    }
    dp = n * (z * p0 - p1) / (z * z - 1.0);
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

constexpr int max_points = max_quadrature_degree / 2 + 2;

const Rule1d& cached_rule(int n) {
  static const std::array<Rule1d, max_points + 1> table = [] {
    std::array<Rule1d, max_points + 1> t;
    for (int m = 1; m <= max_points; ++m) t[m] = gauss_legendre(m);
    return t;
  }();
  return table[n];
}

void check_degree(int degree) {
  if (degree < 0 || degree > max_quadrature_degree)
    fail(ErrorKind::InvalidArgument, "unsupported quadrature degree " + std::to_string(degree));
}

} // namespace

double QuadratureRule::total_weight() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre_unit(int degree) {
  if (degree < 0 || degree > max_quadrature_degree + 2)
    fail(ErrorKind::InvalidArgument, "unsupported quadrature degree " + std::to_string(degree));
  const int n = degree / 2 + 1;
  auto [x, w] = cached_rule(n);
  for (int i = 0; i < n; ++i) {
    x[i] = 0.5 * (x[i] + 1.0);
    w[i] *= 0.5;
  }
  return {x, w};
}

QuadratureRule triangle_quadrature(const Triangle& tri, int degree) {
  check_degree(degree);
  // Collapsed (Duffy) product rule: x = u, y = v (1 - u), Jacobian (1 - u).
  const auto [xu, wu] = gauss_legendre_unit(degree + 1);
  const auto [xv, wv] = gauss_legendre_unit(degree);
  const Vec2 e1 = tri[1] - tri[0];
  const Vec2 e2 = tri[2] - tri[0];
  const double jac = std::abs(e1.x() * e2.y() - e1.y() * e2.x());
  QuadratureRule q;
  q.degree = degree;
  q.points.reserve(xu.size() * xv.size());
  q.weights.reserve(xu.size() * xv.size());
  for (std::size_t i = 0; i < xu.size(); ++i)
    for (std::size_t j = 0; j < xv.size(); ++j) {
      const double x = xu[i];
      const double y = xv[j] * (1.0 - x);
      q.points.push_back(tri[0] + x * e1 + y * e2);
      q.weights.push_back(wu[i] * wv[j] * (1.0 - x) * jac);
    }
  return q;
}

QuadratureRule cell_quadrature(const CellGeometry& cell, int degree) {
  check_degree(degree);
  QuadratureRule q;
  q.degree = degree;
  for (const auto& t : subtriangulate(cell)) {
    auto qt = triangle_quadrature(t, degree);
    q.points.insert(q.points.end(), qt.points.begin(), qt.points.end());
    q.weights.insert(q.weights.end(), qt.weights.begin(), qt.weights.end());
  }
  return q;
}

QuadratureRule edge_quadrature(const Vec2& a, const Vec2& b, int degree) {
  check_degree(degree);
  const auto [x, w] = gauss_legendre_unit(degree);
  const double len = (b - a).norm();
  QuadratureRule q;
  q.degree = degree;
  for (std::size_t i = 0; i < x.size(); ++i) {
    q.points.push_back(a + x[i] * (b - a));
    q.weights.push_back(w[i] * len);
  }
  return q;
}

} // namespace svem

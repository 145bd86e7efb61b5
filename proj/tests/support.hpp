// Shared helpers for the test binaries: fixture access and random generators.
#pragma once

#include "stokesvem/harness.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

namespace svem::test {

inline const nlohmann::json& fixtures() {
  static const nlohmann::json doc = [] {
    std::ifstream in(SVEM_FIXTURE_FILE);
    if (!in) throw std::runtime_error("missing fixture file " SVEM_FIXTURE_FILE);
    return nlohmann::json::parse(in);
  }();
  return doc;
}

// Small deterministic generator; each test seeds its own.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform(double a = 0.0, double b = 1.0) { return std::uniform_real_distribution<double>(a, b)(eng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  Eigen::VectorXd vector(int n, double scale = 1.0) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = uniform(-scale, scale);
    return v;
  }

private:
  std::mt19937_64 eng_;
};

// Convex polygon with n vertices on a randomly stretched, rotated and shifted ellipse.
inline std::vector<Vec2> random_convex_polygon(Rng& rng, int n) {
  std::vector<double> angles(n);
  const double gap = 2.0 * std::numbers::pi / n;
  for (int i = 0; i < n; ++i) angles[i] = i * gap + rng.uniform(0.1, 0.9) * gap;
  const double ax = rng.uniform(0.5, 2.0), ay = rng.uniform(0.5, 2.0), rot = rng.uniform(0.0, std::numbers::pi);
  const double scale = std::pow(10.0, rng.uniform(-2.0, 1.0));
  const Vec2 shift(rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0));
  std::vector<Vec2> pts;
  for (double t : angles) {
    const Vec2 e(ax * std::cos(t), ay * std::sin(t));
    const Vec2 r(std::cos(rot) * e.x() - std::sin(rot) * e.y(), std::sin(rot) * e.x() + std::cos(rot) * e.y());
    pts.push_back(shift + scale * r);
  }
  return pts;
}

inline PolyMesh single_cell_mesh(const std::vector<Vec2>& polygon) {
  std::vector<int> cell(polygon.size());
  for (std::size_t i = 0; i < polygon.size(); ++i) cell[i] = static_cast<int>(i);
  return PolyMesh(polygon, {cell});
}

inline PolyMesh unit_square_cell() { return single_cell_mesh({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

// Cells drawn from the generated triangle, hexagon and L-shape meshes.
inline std::vector<CellGeometry> sample_cells() {
  std::vector<CellGeometry> cells;
  const PolyMesh meshes[] = {generate_uniform_triangles(4, 4), generate_hex_dominant(3),
                             generate_lshape(2, LShapeCells::Triangles), generate_lshape(2, LShapeCells::Polygons)};
  for (const PolyMesh& m : meshes)
    for (int c = 0; c < m.num_cells(); ++c) cells.push_back(m.geometry(c));
  return cells;
}

// Component-major vector polynomial with random coefficients over `basis`.
inline VectorFunction vector_polynomial(const MonomialBasis& basis, const Eigen::VectorXd& coeffs) {
  return [basis, coeffs](const Vec2& x) { return eval_vector(basis, coeffs, x); };
}

} // namespace svem::test

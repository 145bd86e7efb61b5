#include "stokesvem/error.hpp"
#include "stokesvem/mesh.hpp"

#include <cmath>
#include <functional>
#include <map>

namespace svem {

namespace {

// Integer lattice point; all generators work on a lattice first so that shared
// vertices are identified exactly.
using Key = std::pair<long, long>;

class LatticeBuilder {
public:
  explicit LatticeBuilder(std::function<Vec2(const Key&)> to_physical) : to_physical_(std::move(to_physical)) {}

  void add_cell(const std::vector<Key>& loop) {
    std::vector<int> cell;
    cell.reserve(loop.size());
    for (const Key& k : loop) {
      auto [it, inserted] = index_.try_emplace(k, static_cast<int>(vertices_.size()));
      if (inserted) vertices_.push_back(to_physical_(k));
      cell.push_back(it->second);
    }
    cells_.push_back(std::move(cell));
  }

  PolyMesh build() && { return PolyMesh(std::move(vertices_), std::move(cells_)); }

private:
  std::function<Vec2(const Key&)> to_physical_;
  std::map<Key, int> index_;
  std::vector<Vec2> vertices_;
  std::vector<std::vector<int>> cells_;
};

struct LatticeBox {
  long x0, y0, x1, y1;
};

void add_grid_triangles(LatticeBuilder& b, const LatticeBox& box) {
  for (long j = box.y0; j < box.y1; ++j)
    for (long i = box.x0; i < box.x1; ++i) {
      b.add_cell({{i, j}, {i + 1, j}, {i + 1, j + 1}});
      b.add_cell({{i, j}, {i + 1, j + 1}, {i, j + 1}});
    }
}

// Sutherland-Hodgman against one axis-aligned half plane.
// axis 0: x, axis 1: y; keep points with sense*(coord - level) >= 0.
std::vector<Vec2> clip_half_plane(const std::vector<Vec2>& poly, int axis, double level, double sense) {
  std::vector<Vec2> out;
  const std::size_t n = poly.size();
  auto inside = [&](const Vec2& p) { return sense * (p[axis] - level) >= 0.0; };
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& cur = poly[i];
    const Vec2& prev = poly[(i + n - 1) % n];
    const bool ci = inside(cur), pi = inside(prev);
    if (ci != pi) {
      const double t = (level - prev[axis]) / (cur[axis] - prev[axis]);
      out.push_back(prev + t * (cur - prev));
    }
    if (ci) out.push_back(cur);
  }
  return out;
}

void add_clipped_hexagons(LatticeBuilder& b, const LatticeBox& box) {
  // Pointy-top hexagons: centers (2i + (j odd), 3j), vertices center + (+-1,+-1), (0,+-2).
  const long jmin = box.y0 / 3 - 1, jmax = box.y1 / 3 + 1;
  for (long j = jmin; j <= jmax; ++j) {
    const long shift = (j % 2 != 0) ? 1 : 0;
    for (long i = box.x0 / 2 - 1; i <= box.x1 / 2 + 1; ++i) {
      const Vec2 c(static_cast<double>(2 * i + shift), static_cast<double>(3 * j));
      std::vector<Vec2> poly = {c + Vec2(1, -1), c + Vec2(1, 1),   c + Vec2(0, 2),
                                c + Vec2(-1, 1), c + Vec2(-1, -1), c + Vec2(0, -2)};
      poly = clip_half_plane(poly, 0, static_cast<double>(box.x0), 1.0);
      if (!poly.empty()) poly = clip_half_plane(poly, 0, static_cast<double>(box.x1), -1.0);
      if (!poly.empty()) poly = clip_half_plane(poly, 1, static_cast<double>(box.y0), 1.0);
      if (!poly.empty()) poly = clip_half_plane(poly, 1, static_cast<double>(box.y1), -1.0);
      std::vector<Key> loop;
      for (const Vec2& p : poly) {
        const Key k{std::lround(p.x()), std::lround(p.y())};
        if (std::abs(p.x() - k.first) > 1e-9 || std::abs(p.y() - k.second) > 1e-9)
          fail(ErrorKind::Internal, "hexagon clipping produced an off-lattice point");
        if (loop.empty() || loop.back() != k) loop.push_back(k);
      }
      while (loop.size() > 1 && loop.front() == loop.back()) loop.pop_back();
      if (loop.size() < 3) continue;
      double a2 = 0.0;
      for (std::size_t q = 0; q < loop.size(); ++q) {
        const Key& u = loop[q];
        const Key& v = loop[(q + 1) % loop.size()];
        a2 += static_cast<double>(u.first * v.second - v.first * u.second);
      }
      if (a2 <= 0.5) continue;
      b.add_cell(loop);
    }
  }
}

long hex_columns(int rows, double aspect) {
  return std::max(1L, std::lround(1.5 * rows * aspect + 1e-9));
}

} // namespace

PolyMesh generate_uniform_triangles(int nx, int ny, const Rect& rect) {
  if (nx < 1 || ny < 1) fail(ErrorKind::InvalidArgument, "triangle grid counts must be >= 1");
  if (!(rect.width() > 0.0 && rect.height() > 0.0)) fail(ErrorKind::InvalidArgument, "rectangle must have positive extent");
  LatticeBuilder b([&](const Key& k) {
    return Vec2(rect.x0 + rect.width() * static_cast<double>(k.first) / nx,
                rect.y0 + rect.height() * static_cast<double>(k.second) / ny);
  });
  add_grid_triangles(b, {0, 0, nx, ny});
  return std::move(b).build();
}

PolyMesh generate_hex_dominant(int rows, const Rect& rect) {
  if (rows < 1) fail(ErrorKind::InvalidArgument, "hexagon row count must be >= 1");
  if (!(rect.width() > 0.0 && rect.height() > 0.0)) fail(ErrorKind::InvalidArgument, "rectangle must have positive extent");
  const long cols = hex_columns(rows, rect.width() / rect.height());
  const long xl = 2 * cols, yl = 3L * rows;
  LatticeBuilder b([&](const Key& k) {
    return Vec2(rect.x0 + rect.width() * static_cast<double>(k.first) / static_cast<double>(xl),
                rect.y0 + rect.height() * static_cast<double>(k.second) / static_cast<double>(yl));
  });
  add_clipped_hexagons(b, {0, 0, xl, yl});
  return std::move(b).build();
}

PolyMesh generate_lshape(int n, LShapeCells kind) {
  if (n < 1) fail(ErrorKind::InvalidArgument, "L-shape resolution must be >= 1");
  if (kind == LShapeCells::Triangles) {
    LatticeBuilder b([&](const Key& k) {
      return Vec2(-1.0 + static_cast<double>(k.first) / n, -1.0 + static_cast<double>(k.second) / n);
    });
    add_grid_triangles(b, {0, 0, n, n});
    add_grid_triangles(b, {0, n, n, 2L * n});
    add_grid_triangles(b, {n, n, 2L * n, 2L * n});
    return std::move(b).build();
  }
  const long xl = 2 * hex_columns(n, 1.0), yl = 3L * n;
  LatticeBuilder b([&](const Key& k) {
    return Vec2(-1.0 + static_cast<double>(k.first) / static_cast<double>(xl),
                -1.0 + static_cast<double>(k.second) / static_cast<double>(yl));
  });
  add_clipped_hexagons(b, {0, 0, xl, yl});
  add_clipped_hexagons(b, {0, yl, xl, 2 * yl});
  add_clipped_hexagons(b, {xl, yl, 2 * xl, 2 * yl});
  return std::move(b).build();
}

} // namespace svem

#include "stokesvem/mesh.hpp"

#include "stokesvem/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace svem {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double orient(const Vec2& a, const Vec2& b, const Vec2& c) { return cross(b - a, c - a); }

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

// Closed-segment intersection test with a scale-relative tolerance.
bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2, double tol) {
  const double d1 = orient(q1, q2, p1), d2 = orient(q1, q2, p2);
  const double d3 = orient(p1, p2, q1), d4 = orient(p1, p2, q2);
  if (((d1 > tol && d2 < -tol) || (d1 < -tol && d2 > tol)) &&
      ((d3 > tol && d4 < -tol) || (d3 < -tol && d4 > tol)))
    return true;
  if (std::abs(d1) <= tol && on_segment(q1, q2, p1)) return true;
  if (std::abs(d2) <= tol && on_segment(q1, q2, p2)) return true;
  if (std::abs(d3) <= tol && on_segment(p1, p2, q1)) return true;
  if (std::abs(d4) <= tol && on_segment(p1, p2, q2)) return true;
  return false;
}

bool polygon_is_simple(const std::vector<Vec2>& poly) {
  const std::size_t n = poly.size();
  double scale = 0.0;
  for (const auto& p : poly) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  double len2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) len2 = std::max(len2, (poly[(i + 1) % n] - poly[i]).squaredNorm());
  const double tol = 1e-14 * std::max(len2, scale * scale);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    if ((b - a).squaredNorm() <= tol) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      const Vec2& c = poly[j];
      const Vec2& d = poly[(j + 1) % n];
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) {
        // Adjacent edges share one endpoint; they may only overlap if they fold back.
        const Vec2& shared = (j == i + 1) ? b : a;
        const Vec2& other1 = (j == i + 1) ? a : b;
        const Vec2& other2 = (j == i + 1) ? d : c;
        if (std::abs(orient(shared, other1, other2)) <= tol &&
            (other1 - shared).dot(other2 - shared) > 0.0)
          return false;
        continue;
      }
      if (segments_intersect(a, b, c, d, tol)) return false;
    }
  }
  return true;
}

CellGeometry make_geometry(const std::vector<Vec2>& pts) {
  CellGeometry g;
  g.vertices = pts;
  const std::size_t n = pts.size();
  double a2 = 0.0;
  Vec2 c = Vec2::Zero();
  // Shift by the first vertex to limit cancellation.
  const Vec2 o = pts[0];
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 p = pts[i] - o;
    const Vec2 q = pts[(i + 1) % n] - o;
    const double w = cross(p, q);
    a2 += w;
    c += w * (p + q);
  }
  g.area = 0.5 * a2;
  g.centroid = o + c / (3.0 * a2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) g.diameter = std::max(g.diameter, (pts[i] - pts[j]).norm());
  return g;
}

} // namespace

double signed_area(const std::vector<Vec2>& polygon) {
  double a2 = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) a2 += cross(polygon[i], polygon[(i + 1) % polygon.size()]);
  return 0.5 * a2;
}

bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& polygon) {
  // Strict interior test via winding number; boundary points count as outside.
  const std::size_t n = polygon.size();
  int winding = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = polygon[i];
    const Vec2& b = polygon[(i + 1) % n];
    const double o = orient(a, b, p);
    const double scale = (b - a).squaredNorm();
    if (std::abs(o) <= 1e-14 * scale && on_segment(a, b, p)) return false;
    if (a.y() <= p.y()) {
      if (b.y() > p.y() && o > 0) ++winding;
    } else if (b.y() <= p.y() && o < 0) {
      --winding;
    }
  }
  return winding != 0;
}

PolyMesh::PolyMesh(std::vector<Vec2> vertices, std::vector<std::vector<int>> cells)
    : vertices_(std::move(vertices)), cells_(std::move(cells)) {
  if (cells_.empty()) fail(ErrorKind::Validation, "mesh has no cells");
  const int nv = num_vertices();
  for (int v = 0; v < nv; ++v)
    if (!vertices_[v].allFinite())
      fail(ErrorKind::Validation, "vertex " + std::to_string(v) + " has non-finite coordinates");

  std::map<std::pair<int, int>, int> edge_index;
  cell_edges_.resize(cells_.size());
  geometry_.reserve(cells_.size());
  for (int c = 0; c < num_cells(); ++c) {
    const auto& loop = cells_[c];
    const std::string where = "cell " + std::to_string(c);
    if (loop.size() < 3) fail(ErrorKind::Validation, where + " has fewer than 3 vertices");
    std::set<int> seen;
    for (int v : loop) {
      if (v < 0 || v >= nv) fail(ErrorKind::Validation, where + " references missing vertex " + std::to_string(v));
      if (!seen.insert(v).second)
        fail(ErrorKind::Validation, where + " repeats vertex index " + std::to_string(v));
    }
    std::vector<Vec2> pts;
    pts.reserve(loop.size());
    for (int v : loop) pts.push_back(vertices_[v]);
    if (!polygon_is_simple(pts)) fail(ErrorKind::Validation, where + " is not a simple polygon");
    if (signed_area(pts) <= 0.0) fail(ErrorKind::Validation, where + " is not counterclockwise");

    CellGeometry geo = make_geometry(pts);
    const std::size_t n = loop.size();
    for (std::size_t i = 0; i < n; ++i) {
      const int a = loop[i];
      const int b = loop[(i + 1) % n];
      const auto key = std::minmax(a, b);
      const int sign = a < b ? 1 : -1;
      auto [it, inserted] = edge_index.try_emplace({key.first, key.second}, num_edges());
      if (inserted) {
        Edge e;
        e.v = {key.first, key.second};
        e.cells = {c, -1};
        const Vec2 t = vertices_[key.second] - vertices_[key.first];
        e.length = t.norm();
        e.normal = Vec2(t.y(), -t.x()) / e.length;
        edges_.push_back(e);
      } else {
        Edge& e = edges_[it->second];
        if (e.cells[1] >= 0)
          fail(ErrorKind::Validation, where + ": edge (" + std::to_string(a) + "," + std::to_string(b) +
                                          ") is shared by more than two cells");
        const auto& other = cell_edges_[e.cells[0]];
        const auto prev = std::find_if(other.begin(), other.end(), [&](const EdgeRef& r) { return r.edge == it->second; });
        if (prev->sign == sign)
          fail(ErrorKind::Validation, where + " overlaps cell " + std::to_string(e.cells[0]) +
                                          " (inconsistent orientation on a shared edge)");
        e.cells[1] = c;
      }
      cell_edges_[c].push_back({it->second, sign});

      CellEdge ce;
      ce.edge = it->second;
      ce.sign = sign;
      ce.a = vertices_[a];
      ce.b = vertices_[b];
      const Vec2 t = ce.b - ce.a;
      ce.length = t.norm();
      ce.tangent = t / ce.length;
      ce.normal = Vec2(ce.tangent.y(), -ce.tangent.x());
      geo.edges.push_back(ce);
    }
    geometry_.push_back(std::move(geo));
  }
}

double PolyMesh::h_max() const {
  double h = 0.0;
  for (const auto& g : geometry_) h = std::max(h, g.diameter);
  return h;
}

double PolyMesh::total_area() const {
  double a = 0.0;
  for (const auto& g : geometry_) a += g.area;
  return a;
}

std::vector<Triangle> subtriangulate(const CellGeometry& cell) {
  if (cell.vertices.size() == 3) return {Triangle{cell.vertices[0], cell.vertices[1], cell.vertices[2]}};
  std::vector<Triangle> fan;
  fan.reserve(cell.vertices.size());
  const std::size_t n = cell.vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    Triangle t{cell.centroid, cell.vertices[i], cell.vertices[(i + 1) % n]};
    const double a = 0.5 * orient(t[0], t[1], t[2]);
    if (!(a > 1e-14 * cell.diameter * cell.diameter)) {
      std::ostringstream os;
      os << "cell is not star-shaped with respect to its centroid (fan triangle " << i << " has area " << a << ")";
      fail(ErrorKind::Geometry, os.str());
    }
    fan.push_back(t);
  }
  return fan;
}

InvariantReport check_invariants(const PolyMesh& mesh, double domain_area) {
  InvariantReport rep;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& g = mesh.geometry(c);
    if (g.area <= 0.0) rep.problems.push_back("cell " + std::to_string(c) + " has non-positive area");
    try {
      const auto tris = subtriangulate(g);
      double a = 0.0;
      for (const auto& t : tris) a += 0.5 * orient(t[0], t[1], t[2]);
      if (std::abs(a - g.area) > 1e-13 * g.area)
        rep.problems.push_back("cell " + std::to_string(c) + " subtriangulation area mismatch");
    } catch (const Error& e) {
      rep.problems.push_back("cell " + std::to_string(c) + ": " + e.what());
    }
  }
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const auto& edge = mesh.edges()[e];
    if (edge.cells[1] < 0) continue;
    int s0 = 0, s1 = 0;
    for (const auto& r : mesh.cell_edges(edge.cells[0]))
      if (r.edge == e) s0 = r.sign;
    for (const auto& r : mesh.cell_edges(edge.cells[1]))
      if (r.edge == e) s1 = r.sign;
    if (s0 + s1 != 0) rep.problems.push_back("interior edge " + std::to_string(e) + " has equal incidence signs");
  }
  if (domain_area >= 0.0) {
    const double a = mesh.total_area();
    if (std::abs(a - domain_area) > 1e-12 * domain_area)
      rep.problems.push_back("cell areas sum to " + std::to_string(a) + ", expected " + std::to_string(domain_area));
  }
  return rep;
}

} // namespace svem

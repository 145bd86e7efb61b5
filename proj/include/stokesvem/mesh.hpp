// Polygonal meshes: storage, per-cell geometry, generators and JSON I/O.
#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

namespace svem {

using Vec2 = Eigen::Vector2d;

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
};

/// Global edge. Endpoints are stored with v[0] < v[1]; the global normal is the
/// tangent v[0] -> v[1] rotated clockwise, i.e. (t_y, -t_x).
struct Edge {
  std::array<int, 2> v{};
  std::array<int, 2> cells{-1, -1};
  Vec2 normal = Vec2::Zero();
  double length = 0.0;
};

/// Local view of an edge from one cell. Local edge i runs from cell vertex i
/// to vertex i+1; sign is +1 when the cell's outward normal equals the
/// global edge normal.
struct EdgeRef {
  int edge = -1;
  int sign = 1;
};

struct CellEdge {
  int edge = -1;
  int sign = 1;
  Vec2 a, b; // start and end, counterclockwise around the cell
  double length = 0.0;
  Vec2 normal;  // outward unit normal
  Vec2 tangent; // counterclockwise unit tangent
};

struct CellGeometry {
  std::vector<Vec2> vertices;
  Vec2 centroid;
  double diameter = 0.0;
  double area = 0.0;
  std::vector<CellEdge> edges;
};

using Triangle = std::array<Vec2, 3>;

/// Immutable polygonal mesh. Cells are counterclockwise vertex loops.
class PolyMesh {
public:
  /// Validates the input and builds edge connectivity. Throws Error
  /// (Validation) naming the offending cell on bad input.
  PolyMesh(std::vector<Vec2> vertices, std::vector<std::vector<int>> cells);

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_cells() const { return static_cast<int>(cells_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<std::vector<int>>& cells() const { return cells_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<EdgeRef>& cell_edges(int cell) const { return cell_edges_[cell]; }
  const CellGeometry& geometry(int cell) const { return geometry_[cell]; }

  bool is_boundary_edge(int edge) const { return edges_[edge].cells[1] < 0; }
  double h_max() const;
  double total_area() const;

private:
  std::vector<Vec2> vertices_;
  std::vector<std::vector<int>> cells_;
  std::vector<Edge> edges_;
  std::vector<std::vector<EdgeRef>> cell_edges_;
  std::vector<CellGeometry> geometry_;
};

double signed_area(const std::vector<Vec2>& polygon);
bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& polygon);

/// Result of check_invariants(); empty `problems` means the mesh is fine.
struct InvariantReport {
  std::vector<std::string> problems;
  bool ok() const { return problems.empty(); }
};

/// Checks partition and orientation properties, including star-shapedness of
/// every cell with respect to its centroid. `domain_area` < 0 skips the area test.
InvariantReport check_invariants(const PolyMesh& mesh, double domain_area = -1.0);

/// Centroid fan. A triangle is returned unchanged. Throws Error (Geometry) if
/// a fan triangle has non-positive area.
std::vector<Triangle> subtriangulate(const CellGeometry& cell);

PolyMesh generate_uniform_triangles(int nx, int ny, const Rect& rect = {});

/// Hexagon tiling clipped to `rect`; `rows` hexagon rows in the vertical direction.
PolyMesh generate_hex_dominant(int rows, const Rect& rect = {});

enum class LShapeCells { Triangles, Polygons };

/// L-shaped domain (-1,1)^2 minus [0,1)x(-1,0], three n x n patches.
PolyMesh generate_lshape(int n, LShapeCells kind);

struct LoadedMesh {
  PolyMesh mesh;
  std::vector<std::string> warnings;
};

LoadedMesh load_mesh(const std::string& path);
LoadedMesh parse_mesh_json(const std::string& text);
std::string mesh_to_json(const PolyMesh& mesh);
void save_mesh(const PolyMesh& mesh, const std::string& path);

} // namespace svem

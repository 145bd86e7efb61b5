#include "stokesvem/error.hpp"
#include "stokesvem/mesh.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace svem {

namespace {

using nlohmann::json;

int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

} // namespace

LoadedMesh parse_mesh_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Parse, "mesh JSON parse error at line " + std::to_string(line_of_offset(text, e.byte)) + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("vertices") || !doc.contains("cells"))
    fail(ErrorKind::Parse, "mesh JSON must be an object with \"vertices\" and \"cells\"");

  std::vector<Vec2> vertices;
  std::vector<std::vector<int>> cells;
  try {
    for (const auto& v : doc.at("vertices")) {
      if (!v.is_array() || v.size() != 2) fail(ErrorKind::Parse, "vertex entries must be [x, y] pairs");
      vertices.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
    }
    for (const auto& c : doc.at("cells")) cells.push_back(c.get<std::vector<int>>());
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, std::string("mesh JSON has wrong value types: ") + e.what());
  }

  std::vector<std::string> warnings;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::vector<Vec2> pts;
    bool indices_ok = true;
    for (int v : cells[c]) {
      if (v < 0 || v >= static_cast<int>(vertices.size())) {
        indices_ok = false;
        break;
      }
      pts.push_back(vertices[v]);
    }
    if (indices_ok && pts.size() >= 3 && signed_area(pts) < 0.0) {
      std::reverse(cells[c].begin(), cells[c].end());
      warnings.push_back("cell " + std::to_string(c) + " was clockwise and has been reoriented");
    }
  }
  return LoadedMesh{PolyMesh(std::move(vertices), std::move(cells)), std::move(warnings)};
}

LoadedMesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open mesh file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_mesh_json(ss.str());
}

std::string mesh_to_json(const PolyMesh& mesh) {
  json doc;
  doc["vertices"] = json::array();
  for (const auto& v : mesh.vertices()) doc["vertices"].push_back({v.x(), v.y()});
  doc["cells"] = mesh.cells();
  return doc.dump();
}

void save_mesh(const PolyMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write mesh file " + path);
  out << mesh_to_json(mesh) << '\n';
  if (!out) fail(ErrorKind::Io, "failed writing mesh file " + path);
}

} // namespace svem

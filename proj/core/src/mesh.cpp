#include "relief/mesh.hpp"

#include <cmath>
#include <map>
#include <string>

#include "relief/errors.hpp"

namespace relief {

namespace {

Point3 sub(const Point3& a, const Point3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }

Point3 cross(const Point3& a, const Point3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

double dot(const Point3& a, const Point3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

}  // namespace

void MeshParams::validate() const {
  if (stride < 1) throw InvalidArgument("stride must be at least 1");
  if (!(scale_xy > 0) || !(height_mm > 0)) {
    throw InvalidArgument("scale_xy and height_mm must be positive");
  }
  if (!(base_mm >= 0.5)) throw InvalidArgument("base_mm must be at least 0.5 mm");
}

Point3 winding_normal(const SolidMesh& mesh, const Facet& facet) {
  const auto& a = mesh.vertices[facet.v[0]];
  const auto& b = mesh.vertices[facet.v[1]];
  const auto& c = mesh.vertices[facet.v[2]];
  const Point3 n = cross(sub(b, a), sub(c, a));
  const double len = std::sqrt(dot(n, n));
  if (len == 0.0) return {};
  return {n.x / len, n.y / len, n.z / len};
}

SolidMesh heightfield_to_solid(const ReliefMap& map, const MeshParams& params) {
  params.validate();
  const int s = params.stride;
  const int cols = map.width() > 0 ? (map.width() - 1) / s + 1 : 0;
  const int rows = map.height() > 0 ? (map.height() - 1) / s + 1 : 0;
  if (cols < 2 || rows < 2) {
    throw DegenerateGrid("height field samples to " + std::to_string(cols) + "x" +
                         std::to_string(rows) + "; at least 2x2 is required");
  }

  SolidMesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(2) * cols * rows);
  const double step = s * params.scale_xy;
  for (int layer = 0; layer < 2; ++layer) {
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        double z = 0.0;
        if (layer == 0) {
          const double h = map.heights(j * s, i * s);
          if (!(h >= 0.0 && h < 1.0)) {
            throw InvalidArgument("height " + std::to_string(h) + " at cell (" +
                                  std::to_string(j * s) + ", " + std::to_string(i * s) +
                                  ") is outside [0, 1)");
          }
          z = params.base_mm + h * params.height_mm;
        }
        mesh.vertices.push_back({j * step, (rows - 1 - i) * step, z});
      }
    }
  }

  const auto top = [cols](int i, int j) { return static_cast<std::uint32_t>(i * cols + j); };
  const auto bottom = [cols, rows](int i, int j) {
    return static_cast<std::uint32_t>(rows * cols + i * cols + j);
  };
  auto add = [&mesh](std::uint32_t a, std::uint32_t b, std::uint32_t c) {
    Facet f{{a, b, c}, {}};
    f.normal = winding_normal(mesh, f);
    mesh.facets.push_back(f);
  };

  mesh.facets.reserve(static_cast<std::size_t>(4) * (cols - 1) * (rows - 1) +
                      4 * (cols - 1) + 4 * (rows - 1));
  // Row index grows toward -y, so (i,j),(i+1,j),(i+1,j+1) runs
  // counter-clockwise seen from above.
  for (int i = 0; i + 1 < rows; ++i) {
    for (int j = 0; j + 1 < cols; ++j) {
      add(top(i, j), top(i + 1, j), top(i + 1, j + 1));
      add(top(i, j), top(i + 1, j + 1), top(i, j + 1));
      add(bottom(i, j), bottom(i + 1, j + 1), bottom(i + 1, j));
      add(bottom(i, j), bottom(i, j + 1), bottom(i + 1, j + 1));
    }
  }

  // Walk the rim counter-clockwise seen from above; each step p -> q gets a
  // wall quad facing outward.
  auto wall = [&](int pi, int pj, int qi, int qj) {
    add(top(pi, pj), bottom(pi, pj), bottom(qi, qj));
    add(top(pi, pj), bottom(qi, qj), top(qi, qj));
  };
  for (int j = 0; j + 1 < cols; ++j) wall(rows - 1, j, rows - 1, j + 1);
  for (int i = rows - 1; i > 0; --i) wall(i, cols - 1, i - 1, cols - 1);
  for (int j = cols - 1; j > 0; --j) wall(0, j, 0, j - 1);
  for (int i = 0; i + 1 < rows; ++i) wall(i, 0, i + 1, 0);
  return mesh;
}

double signed_volume(const SolidMesh& mesh) {
  double six_v = 0.0;
  for (const auto& f : mesh.facets) {
    const auto& a = mesh.vertices[f.v[0]];
    const auto& b = mesh.vertices[f.v[1]];
    const auto& c = mesh.vertices[f.v[2]];
    six_v += dot(a, cross(b, c));
  }
  return six_v / 6.0;
}

EdgeReport check_edges(const SolidMesh& mesh) {
  // Undirected edge -> (uses in low->high direction, uses in high->low).
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::pair<int, int>> uses;
  for (const auto& f : mesh.facets) {
    for (int k = 0; k < 3; ++k) {
      const std::uint32_t a = f.v[k], b = f.v[(k + 1) % 3];
      auto& u = uses[{std::min(a, b), std::max(a, b)}];
      (a < b ? u.first : u.second)++;
    }
  }
  EdgeReport report;
  report.edges = uses.size();
  for (const auto& [edge, u] : uses) {
    const int total = u.first + u.second;
    if (total == 1) ++report.open_edges;
    if (total > 2) ++report.overshared_edges;
    if (total == 2 && u.first != 1) ++report.misoriented_edges;
  }
  return report;
}

}  // namespace relief

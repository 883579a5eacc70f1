#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "relief/assembly.hpp"
#include "relief/geometry.hpp"

namespace relief {

/// Printing parameters; lengths in millimeters.
struct MeshParams {
  int stride = 1;          // sample every stride-th cell
  double scale_xy = 0.25;  // mm per sampled source cell
  double height_mm = 20.0; // mm for height 1.0
  double base_mm = 2.0;    // slab under height 0

  /// Throws InvalidArgument on stride < 1, non-positive lengths or
  /// base_mm < 0.5.
  void validate() const;
};

struct Facet {
  std::array<std::uint32_t, 3> v{};
  Point3 normal;
};

struct SolidMesh {
  std::vector<Point3> vertices;
  std::vector<Facet> facets;
};

/// Closed solid over a height field: the top surface is two triangles per
/// sampled cell split along the (r,c)-(r+1,c+1) diagonal, with a flat
/// bottom at z = 0 triangulated the same way and four side walls. Row 0 of
/// the map is the far (+y) edge of the print so the relief reads the same
/// way as the photograph.
///
/// Throws DegenerateGrid when fewer than 2x2 samples remain after striding
/// and InvalidArgument when a height lies outside [0, 1).
SolidMesh heightfield_to_solid(const ReliefMap& map, const MeshParams& params = {});

/// Unit normal implied by the facet's right-hand winding; zero for a
/// degenerate triangle.
Point3 winding_normal(const SolidMesh& mesh, const Facet& facet);

double signed_volume(const SolidMesh& mesh);

struct EdgeReport {
  std::size_t edges = 0;
  std::size_t open_edges = 0;         // used by one facet
  std::size_t overshared_edges = 0;   // used by three or more facets
  std::size_t misoriented_edges = 0;  // same direction in two facets

  bool watertight() const noexcept { return edges > 0 && open_edges == 0 && overshared_edges == 0; }
  bool consistently_oriented() const noexcept { return misoriented_edges == 0; }
};

EdgeReport check_edges(const SolidMesh& mesh);

}  // namespace relief

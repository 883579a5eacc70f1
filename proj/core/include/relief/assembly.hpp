#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "relief/depthfield.hpp"
#include "relief/grid.hpp"
#include "relief/image.hpp"

namespace relief {

inline constexpr double kDefaultTau = 0.25;
inline constexpr double kCornerTolerance = 0.5;

/// The merged depth map. `provenance` counts how many face masks covered
/// each cell; `origin` is the image-1 pixel of cell (0, 0).
struct ReliefMap {
  CellIndex origin;
  Grid<double> heights;
  Grid<std::uint8_t> provenance;

  int width() const noexcept { return heights.width(); }
  int height() const noexcept { return heights.height(); }
};

/// Faces are adjacent when they share at least two corner ids (an edge).
struct AdjacencyGraph {
  std::vector<std::string> faces;
  std::vector<std::pair<std::size_t, std::size_t>> edges;

  /// Connected components as lists of face indices, each sorted, ordered by
  /// their first member.
  std::vector<std::vector<std::size_t>> components() const;
  bool connected() const { return components().size() <= 1; }
};

AdjacencyGraph build_adjacency(std::span<const FaceAnnotation> faces);

/// Common frame for a set of depth fields: the bounding box of all of them
/// in image-1 space, and each field's offset inside it.
struct Alignment {
  CellIndex origin;
  int width = 0;
  int height = 0;
  std::vector<CellIndex> offsets;
};

/// Places each field at its own image-1 position. `fields[i]` must come from
/// `faces[i]`. Throws InconsistentCorner if a shared corner id carries
/// image-1 positions more than 0.5 px apart, DisconnectedFaces if the
/// adjacency graph has more than one component.
Alignment align_offsets(std::span<const DepthField> fields, std::span<const FaceAnnotation> faces);

/// Checks only the shared-corner consistency rule of align_offsets.
void check_corner_consistency(std::span<const FaceAnnotation> faces);

/// Zero-pads every field into the common frame and adds them element-wise.
/// Cells covered by three or more faces are summed in ascending order of
/// their contributions so the result does not depend on `order`.
ReliefMap merge(std::span<const DepthField> fields, const Alignment& alignment);
ReliefMap merge(std::span<const DepthField> fields, const Alignment& alignment,
                std::span<const std::size_t> order);

struct SpikeCorrection {
  ReliefMap map;
  /// Spike cells, in map coordinates, row-major order.
  std::vector<CellIndex> spikes;
  /// Spikes without a usable neighbor. They take the median of every other
  /// covered cell of the corrected map instead.
  std::vector<CellIndex> isolated;
};

/// A covered cell is a spike when two or more faces contributed to it, when
/// its height reached 1, or when it exceeds the median of its covered
/// 8-neighbors by more than `tau`.
bool is_spike(const ReliefMap& map, int col, int row, double tau);

/// Classifies every cell against the input map, then replaces each spike by
/// the mean of its covered, non-spike 8-neighbors. Other cells are copied
/// unchanged.
SpikeCorrection correct_spikes(const ReliefMap& map, double tau = kDefaultTau);

Image render_grayscale(const ReliefMap& map);

}  // namespace relief

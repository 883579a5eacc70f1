#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "relief/assembly.hpp"
#include "relief/geometry.hpp"
#include "relief/image.hpp"
#include "relief/project.hpp"

namespace relief {

/// A synthetic project together with its ground truth.
struct SynthFixture {
  ReliefProject project;
  std::vector<SynthFace> faces;
  Image image1;
  Image image2;
  /// True relative heights 1 - k z / (f |T|) over the union of the face
  /// rasters, with k = beta * (smallest true disparity). Provenance counts
  /// covering faces, heights are not summed.
  ReliefMap truth;
};

/// Projects the scene's faces into both cameras and records one corner per
/// corner id. Images are flat-shaded face silhouettes with corner markers.
/// Throws InconsistentCorner when faces give one corner id two different 3D
/// positions.
SynthFixture synthesize(const SynthSpec& spec, const ProjectParams& params = {});

/// Two visible faces of a unit cube turned 45 degrees, the near vertical
/// edge on the optical axis.
SynthSpec cube_scene();

/// One fronto-parallel square at depth 5.
SynthSpec slab_scene();

/// rows x cols grid of planar quads over a bumpy surface. Depth is a sum
/// of a column term and a row term, which keeps every cell planar; both
/// terms are drawn from `seed`.
SynthSpec hand_grid_scene(int rows, int cols, std::uint64_t seed);

}  // namespace relief

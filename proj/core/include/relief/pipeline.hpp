#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "relief/assembly.hpp"
#include "relief/depthfield.hpp"
#include "relief/mesh.hpp"
#include "relief/project.hpp"

namespace relief {

/// Per-face results sharing one k.
struct DepthStage {
  std::vector<FaceAnnotation> faces;
  std::vector<FaceDisparities> disparities;
  std::vector<DepthField> fields;
  double d_min = 0.0;
  double d_max = 0.0;
  double k = 0.0;
};

DepthStage compute_depth(const ReliefProject& project, EstimateOptions options = {});

struct ReliefStage {
  Alignment alignment;
  ReliefMap merged;           // raw element-wise sum
  SpikeCorrection corrected;  // after spike replacement
  ReliefMap final_map;        // corrected plus manual cell edits
};

/// Aligns, merges (folding faces in `order`, identity when empty), corrects
/// spikes and applies the project's cell edits.
ReliefStage assemble(const DepthStage& depth, const ReliefProject& project,
                     std::span<const std::size_t> order = {});

/// Overrides cells given in image-1 coordinates. Throws InvalidArgument for
/// cells the map does not cover or heights outside [0, 1).
ReliefMap apply_cell_edits(ReliefMap map, std::span<const CellEdit> edits);

/// Mean of the covered 8-neighbors of an image-1 cell, the value a spike
/// edit without an explicit height resolves to.
double neighbor_mean(const ReliefMap& map, CellIndex image_cell);

struct PipelineResult {
  DepthStage depth;
  ReliefStage relief;
  SolidMesh mesh;
};

PipelineResult run_pipeline(const ReliefProject& project, std::span<const std::size_t> order = {});

}  // namespace relief

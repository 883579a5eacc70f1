#include "relief/pipeline.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "relief/errors.hpp"

namespace relief {

DepthStage compute_depth(const ReliefProject& project, EstimateOptions options) {
  DepthStage stage;
  stage.faces = project.annotations();
  if (stage.faces.empty()) throw EmptyMask("the project defines no faces");
  for (const auto& face : stage.faces) stage.disparities.push_back(face_disparities(face, options));
  stage.k = choose_k(stage.disparities, project.params.beta);
  stage.d_min = stage.k / project.params.beta;
  stage.d_max = 0.0;
  for (const auto& d : stage.disparities) {
    if (d.masked_count()) stage.d_max = std::max(stage.d_max, d.max());
  }
  for (const auto& d : stage.disparities) stage.fields.push_back(depth_field(d, stage.k));
  return stage;
}

ReliefStage assemble(const DepthStage& depth, const ReliefProject& project,
                     std::span<const std::size_t> order) {
  ReliefStage stage;
  stage.alignment = align_offsets(depth.fields, depth.faces);
  if (order.empty()) {
    stage.merged = merge(depth.fields, stage.alignment);
  } else {
    std::vector<std::size_t> check(order.begin(), order.end());
    std::sort(check.begin(), check.end());
    std::vector<std::size_t> expected(depth.fields.size());
    std::iota(expected.begin(), expected.end(), std::size_t{0});
    if (check != expected) throw InvalidArgument("merge order must be a permutation of the faces");
    stage.merged = merge(depth.fields, stage.alignment, order);
  }
  stage.corrected = correct_spikes(stage.merged, project.params.tau);
  stage.final_map = apply_cell_edits(stage.corrected.map, project.cell_edits);
  return stage;
}

ReliefMap apply_cell_edits(ReliefMap map, std::span<const CellEdit> edits) {
  for (const auto& e : edits) {
    const int c = e.cell.col - map.origin.col, r = e.cell.row - map.origin.row;
    if (!map.provenance.contains(c, r) || map.provenance(c, r) == 0) {
      throw InvalidArgument("cell (" + std::to_string(e.cell.col) + ", " +
                            std::to_string(e.cell.row) + ") is not covered by any face");
    }
    if (!(e.height >= 0.0 && e.height < 1.0)) {
      throw InvalidArgument("edited height must lie in [0, 1)");
    }
    map.heights(c, r) = e.height;
  }
  return map;
}

double neighbor_mean(const ReliefMap& map, CellIndex image_cell) {
  const int col = image_cell.col - map.origin.col, row = image_cell.row - map.origin.row;
  double sum = 0.0;
  int n = 0;
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      if (!dr && !dc) continue;
      const int c = col + dc, r = row + dr;
      if (map.provenance.contains(c, r) && map.provenance(c, r) > 0) {
        sum += map.heights(c, r);
        ++n;
      }
    }
  }
  if (n == 0) throw InvalidArgument("cell has no covered neighbors");
  return sum / n;
}

PipelineResult run_pipeline(const ReliefProject& project, std::span<const std::size_t> order) {
  PipelineResult result;
  result.depth = compute_depth(project);
  result.relief = assemble(result.depth, project, order);
  result.mesh = heightfield_to_solid(result.relief.final_map, project.params.mesh);
  return result;
}

}  // namespace relief

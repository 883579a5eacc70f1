#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "relief/errors.hpp"
#include "relief/pipeline.hpp"
#include "relief/presets.hpp"
#include "relief/stl.hpp"
#include "testing.hpp"

using namespace relief;
using testing_support::Rng;

namespace {

// Cells with provenance 1 whose 8 neighbors are also single-face cells.
std::vector<CellIndex> interior(const ReliefMap& m) {
  std::vector<CellIndex> out;
  for (int r = 1; r + 1 < m.heights.height(); ++r)
    for (int c = 1; c + 1 < m.heights.width(); ++c) {
      bool ok = true;
      for (int dr = -1; dr <= 1 && ok; ++dr)
        for (int dc = -1; dc <= 1 && ok; ++dc) ok = m.provenance(c + dc, r + dr) == 1;
      if (ok) out.push_back({c, r});
    }
  return out;
}

// Truth value at a map cell, both maps indexed in image-1 pixels.
double truth_at(const ReliefMap& truth, const ReliefMap& m, CellIndex cell) {
  const int c = cell.col + m.origin.col - truth.origin.col;
  const int r = cell.row + m.origin.row - truth.origin.row;
  return truth.heights(c, r);
}

}  // namespace

TEST(Pipeline, SlabIsFlatAtOneMinusBeta) {
  const SynthFixture fx = synthesize(slab_scene());
  const PipelineResult r = run_pipeline(fx.project);
  const ReliefMap& m = r.relief.final_map;
  int covered = 0;
  for (int row = 0; row < m.heights.height(); ++row)
    for (int col = 0; col < m.heights.width(); ++col)
      if (m.provenance(col, row) > 0) {
        ++covered;
        EXPECT_NEAR(m.heights(col, row), 0.1, 1e-9);
      }
  EXPECT_GT(covered, 100);
  EXPECT_TRUE(r.relief.corrected.spikes.empty());
  EXPECT_TRUE(check_edges(r.mesh).watertight());
}

TEST(Pipeline, BetaSetsTheSlabHeight) {
  for (double beta : {0.25, 0.5, 0.75}) {
    ProjectParams params;
    params.beta = beta;
    const PipelineResult r = run_pipeline(synthesize(slab_scene(), params).project);
    const ReliefMap& m = r.relief.final_map;
    const int c = m.heights.width() / 2, row = m.heights.height() / 2;
    EXPECT_NEAR(m.heights(c, row), 1 - beta, 1e-9);
  }
}

TEST(Pipeline, HandGridTracksTruthAwayFromSeams) {
  const SynthFixture fx = synthesize(hand_grid_scene(6, 8, 11));
  const PipelineResult r = run_pipeline(fx.project);
  EXPECT_EQ(r.depth.fields.size(), 48u);
  const ReliefMap& m = r.relief.final_map;
  const auto cells = interior(m);
  ASSERT_GT(cells.size(), 1000u);
  double worst = 0;
  for (const CellIndex c : cells) worst = std::max(worst, std::abs(m.heights(c.col, c.row) - truth_at(fx.truth, m, c)));
  EXPECT_LE(worst, 0.02);
  EXPECT_TRUE(check_edges(r.mesh).watertight());
  EXPECT_GT(signed_volume(r.mesh), 0);
}

TEST(Pipeline, FaceOrderDoesNotChangeAnyByte) {
  Rng rng(71);
  const SynthFixture fx = synthesize(hand_grid_scene(3, 4, 12));
  const PipelineResult base = run_pipeline(fx.project);
  const auto stl = write_stl(base.mesh);
  std::vector<std::size_t> order(fx.project.faces.size());
  std::iota(order.begin(), order.end(), 0);
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(order.begin(), order.end(), rng.engine);
    const PipelineResult r = run_pipeline(fx.project, order);
    ASSERT_EQ(r.relief.merged.heights, base.relief.merged.heights);
    ASSERT_EQ(r.relief.final_map.heights, base.relief.final_map.heights);
    ASSERT_EQ(write_stl(r.mesh), stl);
  }
}

TEST(Pipeline, InvalidOrderIsRejected) {
  const SynthFixture fx = synthesize(hand_grid_scene(1, 2, 1));
  const std::vector<std::size_t> dup{0, 0};
  const std::vector<std::size_t> shortened{1};
  EXPECT_THROW(run_pipeline(fx.project, dup), InvalidArgument);
  EXPECT_THROW(run_pipeline(fx.project, shortened), InvalidArgument);
}

TEST(Pipeline, CellEditsLandInImageCoordinates) {
  SynthFixture fx = synthesize(cube_scene());
  const PipelineResult before = run_pipeline(fx.project);
  const ReliefMap& m = before.relief.final_map;
  const CellIndex local{m.heights.width() / 3, m.heights.height() / 2};
  const CellIndex image{local.col + m.origin.col, local.row + m.origin.row};
  ASSERT_GT(m.provenance(local.col, local.row), 0);
  fx.project.cell_edits.push_back({image, 0.123});
  const PipelineResult after = run_pipeline(fx.project);
  EXPECT_EQ(after.relief.final_map.heights(local.col, local.row), 0.123);
  EXPECT_EQ(after.relief.corrected.map.heights, before.relief.corrected.map.heights);
}

TEST(Pipeline, NeighborMeanOfFlatRegion) {
  const SynthFixture fx = synthesize(slab_scene());
  const PipelineResult r = run_pipeline(fx.project);
  const ReliefMap& m = r.relief.final_map;
  const CellIndex image{m.origin.col + m.heights.width() / 2, m.origin.row + m.heights.height() / 2};
  EXPECT_NEAR(neighbor_mean(m, image), 0.1, 1e-9);
  EXPECT_THROW(apply_cell_edits(m, std::vector<CellEdit>{{image, 1.0}}), InvalidArgument);
  EXPECT_THROW(apply_cell_edits(m, std::vector<CellEdit>{{{-5, -5}, 0.5}}), InvalidArgument);
}

TEST(Pipeline, DepthStageSharesOneK) {
  const SynthFixture fx = synthesize(cube_scene());
  const DepthStage d = compute_depth(fx.project);
  EXPECT_NEAR(d.k, kDefaultBeta * d.d_min, 1e-12);
  EXPECT_LE(d.d_min, d.d_max);
  EXPECT_EQ(d.fields.size(), fx.project.faces.size());
}

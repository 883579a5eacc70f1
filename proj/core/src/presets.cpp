#include "relief/presets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <string>

#include "relief/depthfield.hpp"
#include "relief/errors.hpp"

namespace relief {

namespace {

void fill_quad(Image& img, const std::array<PixelPoint, 4>& quad, std::uint8_t value) {
  const QuadRaster raster = rasterize_quad(quad);
  for (int r = 0; r < raster.mask.height(); ++r) {
    for (int c = 0; c < raster.mask.width(); ++c) {
      const int col = raster.origin.col + c, row = raster.origin.row + r;
      if (raster.mask(c, r) && col >= 0 && row >= 0 && col < img.width && row < img.height) {
        img.at(col, row) = value;
      }
    }
  }
}

void mark(Image& img, const PixelPoint& p) {
  const int col = static_cast<int>(std::lround(p.u)), row = static_cast<int>(std::lround(p.v));
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      const int c = col + dc, r = row + dr;
      if (c >= 0 && r >= 0 && c < img.width && r < img.height) img.at(c, r) = 255;
    }
  }
}

ReliefMap ground_truth(const std::vector<SynthFace>& faces, const SynthSpec& spec, double beta) {
  std::vector<QuadRaster> rasters;
  int col0 = std::numeric_limits<int>::max(), row0 = col0;
  int col1 = std::numeric_limits<int>::min(), row1 = col1;
  for (const auto& f : faces) {
    auto& r = rasters.emplace_back(rasterize_quad(f.image1));
    if (r.mask.empty()) continue;
    col0 = std::min(col0, r.origin.col);
    row0 = std::min(row0, r.origin.row);
    col1 = std::max(col1, r.origin.col + r.mask.width());
    row1 = std::max(row1, r.origin.row + r.mask.height());
  }
  ReliefMap truth;
  if (col1 < col0) return truth;
  truth.origin = {col0, row0};
  truth.heights = Grid<double>(col1 - col0, row1 - row0, 0.0);
  truth.provenance = Grid<std::uint8_t>(col1 - col0, row1 - row0, 0);
  Grid<double> depth(col1 - col0, row1 - row0, 0.0);

  for (std::size_t i = 0; i < faces.size(); ++i) {
    const auto& r = rasters[i];
    for (int y = 0; y < r.mask.height(); ++y) {
      for (int x = 0; x < r.mask.width(); ++x) {
        if (!r.mask(x, y)) continue;
        const int c = r.origin.col + x - col0, row = r.origin.row + y - row0;
        if (truth.provenance(c, row)++ == 0) {
          depth(c, row) = faces[i].depth_at({double(r.origin.col + x), double(r.origin.row + y)});
        }
      }
    }
  }
  const double baseline = spec.camera1().focal_pixels() * std::hypot(spec.tx, spec.ty);
  double d_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < depth.size(); ++i) {
    if (truth.provenance.data()[i]) d_min = std::min(d_min, baseline / depth.data()[i]);
  }
  const double k = beta * d_min;
  for (std::size_t i = 0; i < depth.size(); ++i) {
    if (truth.provenance.data()[i]) truth.heights.data()[i] = 1.0 - k * depth.data()[i] / baseline;
  }
  return truth;
}

}  // namespace

SynthFixture synthesize(const SynthSpec& spec, const ProjectParams& params) {
  std::vector<Quad3> quads;
  for (const auto& f : spec.faces) quads.push_back(f.vertices);

  SynthFixture out;
  out.faces = synth_scene(quads, spec.camera1(), spec.camera2());

  auto& project = out.project;
  project.image1_path = "image1.png";
  project.image2_path = "image2.png";
  project.params = params;
  project.synth = spec;

  std::map<std::string, Point3> placed;
  for (std::size_t i = 0; i < spec.faces.size(); ++i) {
    FaceRecord record{spec.faces[i].id, spec.faces[i].corner_ids};
    for (std::size_t k = 0; k < 4; ++k) {
      const auto& id = spec.faces[i].corner_ids[k];
      const Point3& v = spec.faces[i].vertices[k];
      auto [it, inserted] = placed.try_emplace(id, v);
      if (!inserted) {
        const Point3& w = it->second;
        if (std::hypot(v.x - w.x, v.y - w.y, v.z - w.z) > 1e-9) {
          throw InconsistentCorner("corner '" + id + "' has two different 3D positions");
        }
        continue;
      }
      project.corners.push_back({id, out.faces[i].image1[k], out.faces[i].image2[k]});
    }
    project.faces.push_back(std::move(record));
  }

  out.image1 = Image(spec.image_width, spec.image_height, 1, 40);
  out.image2 = Image(spec.image_width, spec.image_height, 1, 40);
  for (std::size_t i = 0; i < out.faces.size(); ++i) {
    const auto shade = static_cast<std::uint8_t>(110 + (i * 37) % 120);
    fill_quad(out.image1, out.faces[i].image1, shade);
    fill_quad(out.image2, out.faces[i].image2, shade);
  }
  for (const auto& c : project.corners) {
    mark(out.image1, c.p1);
    mark(out.image2, c.p2);
  }

  out.truth = ground_truth(out.faces, spec, params.beta);
  return out;
}

SynthSpec cube_scene() {
  SynthSpec s;
  s.focal_length = 800.0;
  s.principal_point = {200.0, 200.0};
  s.tx = 0.25;
  s.image_width = 400;
  s.image_height = 400;

  const double near = 4.3;
  const double a = std::sqrt(0.5);
  const Point3 near_top{0, 0.5, near}, near_bottom{0, -0.5, near};
  const Point3 left_top{-a, 0.5, near + a}, left_bottom{-a, -0.5, near + a};
  const Point3 right_top{a, 0.5, near + a}, right_bottom{a, -0.5, near + a};
  // Corners 3 and 4 of the left face sit on the near edge.
  s.faces.push_back({"left", {"lt", "lb", "nb", "nt"}, {left_top, left_bottom, near_bottom, near_top}});
  s.faces.push_back({"right", {"nt", "nb", "rb", "rt"}, {near_top, near_bottom, right_bottom, right_top}});
  return s;
}

SynthSpec slab_scene() {
  SynthSpec s;
  s.focal_length = 800.0;
  s.principal_point = {200.0, 200.0};
  s.tx = 0.25;
  s.image_width = 400;
  s.image_height = 400;
  const double z = 5.0, h = 0.75;
  s.faces.push_back({"slab", {"c1", "c2", "c3", "c4"},
                     {Point3{-h, h, z}, Point3{-h, -h, z}, Point3{h, -h, z}, Point3{h, h, z}}});
  return s;
}

SynthSpec hand_grid_scene(int rows, int cols, std::uint64_t seed) {
  if (rows < 1 || cols < 1) throw InvalidArgument("grid needs at least one row and column");
  SynthSpec s;
  s.focal_length = 800.0;
  s.principal_point = {218.0, 200.0};
  s.tx = 0.25;
  s.image_width = 400;
  s.image_height = 400;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> step(-0.08, 0.08);
  auto walk = [&](int n) {
    std::vector<double> v(n + 1);
    double x = 0.0;
    for (auto& e : v) {
      e = x;
      x = std::clamp(x + step(rng), -0.3, 0.3);
    }
    return v;
  };
  const auto along_x = walk(cols);
  const auto along_y = walk(rows);

  const double width = 2.0, height = 2.0, base = 6.0;
  auto vertex = [&](int i, int j) {
    const double x = -width / 2 + width * j / cols;
    const double y = height / 2 - height * i / rows;
    return Point3{x, y, base + along_x[j] + along_y[i]};
  };
  auto id = [](int i, int j) { return "r" + std::to_string(i) + "c" + std::to_string(j); };
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      s.faces.push_back({"f" + std::to_string(i) + "_" + std::to_string(j),
                         {id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)},
                         {vertex(i, j), vertex(i + 1, j), vertex(i + 1, j + 1), vertex(i, j + 1)}});
    }
  }
  return s;
}

}  // namespace relief

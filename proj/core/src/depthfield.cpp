#include "relief/depthfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "relief/errors.hpp"

namespace relief {

namespace {

constexpr double kBarycentricSlack = 1e-12;
constexpr double kBoundsSlack = 1e-7;

double cross(const PixelPoint& o, const PixelPoint& a, const PixelPoint& b) {
  return (a.u - o.u) * (b.v - o.v) - (a.v - o.v) * (b.u - o.u);
}

bool triangle_contains(const PixelPoint& a, const PixelPoint& b, const PixelPoint& c,
                       const PixelPoint& p) {
  const double area2 = cross(a, b, c);
  if (area2 == 0.0) return false;
  const double la = cross(b, c, p) / area2;
  const double lb = cross(c, a, p) / area2;
  const double lc = cross(a, b, p) / area2;
  return la >= -kBarycentricSlack && lb >= -kBarycentricSlack && lc >= -kBarycentricSlack;
}

/// True when the quad is reflex at corner 2 or 4, where the corner 1-3
/// diagonal would leave the polygon.
bool split_through_second_corner(const std::array<PixelPoint, 4>& q) {
  double signed_area = 0;
  for (int i = 0; i < 4; ++i) {
    const auto& a = q[i];
    const auto& b = q[(i + 1) % 4];
    signed_area += a.u * b.v - b.u * a.v;
  }
  for (int i = 1; i < 4; i += 2) {
    const double turn = cross(q[(i + 3) % 4], q[i], q[(i + 1) % 4]);
    if (turn * signed_area < 0) return true;  // reflex at corner 2 or 4
  }
  return false;
}

}  // namespace

CornerPairSet FaceAnnotation::pairs() const {
  CornerPairSet out;
  for (int i = 0; i < 4; ++i) out[i] = {corners[i].p1, corners[i].p2};
  return out;
}

std::array<PixelPoint, 4> FaceAnnotation::image1() const {
  return {corners[0].p1, corners[1].p1, corners[2].p1, corners[3].p1};
}

std::size_t QuadRaster::count() const {
  return static_cast<std::size_t>(std::count(mask.data().begin(), mask.data().end(), 1));
}

bool quad_contains(const std::array<PixelPoint, 4>& q, const PixelPoint& p) {
  if (split_through_second_corner(q)) {
    return triangle_contains(q[1], q[2], q[3], p) || triangle_contains(q[3], q[0], q[1], p);
  }
  return triangle_contains(q[0], q[1], q[2], p) || triangle_contains(q[0], q[2], q[3], p);
}

QuadRaster rasterize_quad(const std::array<PixelPoint, 4>& quad) {
  double min_u = quad[0].u, max_u = quad[0].u, min_v = quad[0].v, max_v = quad[0].v;
  for (const auto& p : quad) {
    min_u = std::min(min_u, p.u);
    max_u = std::max(max_u, p.u);
    min_v = std::min(min_v, p.v);
    max_v = std::max(max_v, p.v);
  }
  QuadRaster out;
  const int col0 = static_cast<int>(std::ceil(min_u - kBoundsSlack));
  const int col1 = static_cast<int>(std::floor(max_u + kBoundsSlack));
  const int row0 = static_cast<int>(std::ceil(min_v - kBoundsSlack));
  const int row1 = static_cast<int>(std::floor(max_v + kBoundsSlack));
  out.origin = {col0, row0};
  out.mask = Grid<std::uint8_t>(std::max(0, col1 - col0 + 1), std::max(0, row1 - row0 + 1));
  for (int r = 0; r < out.mask.height(); ++r) {
    for (int c = 0; c < out.mask.width(); ++c) {
      const PixelPoint center{static_cast<double>(col0 + c), static_cast<double>(row0 + r)};
      out.mask(c, r) = quad_contains(quad, center) ? 1 : 0;
    }
  }
  return out;
}

std::size_t FaceDisparities::masked_count() const {
  return static_cast<std::size_t>(std::count(mask.data().begin(), mask.data().end(), 1));
}

double FaceDisparities::min() const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask.data()[i]) best = std::min(best, disparity.data()[i]);
  }
  return best;
}

double FaceDisparities::max() const {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask.data()[i]) best = std::max(best, disparity.data()[i]);
  }
  return best;
}

FaceDisparities face_disparities(const FaceAnnotation& face, EstimateOptions options) {
  FaceDisparities out;
  out.face_id = face.id;
  out.homography = estimate(face.pairs(), options);

  QuadRaster raster = rasterize_quad(face.image1());
  out.offset = raster.origin;
  out.mask = std::move(raster.mask);
  out.disparity = Grid<double>(out.mask.width(), out.mask.height(), 0.0);

  for (int r = 0; r < out.mask.height(); ++r) {
    for (int c = 0; c < out.mask.width(); ++c) {
      if (!out.mask(c, r)) continue;
      const PixelPoint p{static_cast<double>(out.offset.col + c),
                         static_cast<double>(out.offset.row + r)};
      const double d = distance(p, out.homography.apply(p));
      if (!(d >= kMinDisparity)) {
        throw ZeroDisparity("face '" + face.id + "' has disparity " + std::to_string(d) +
                            " at pixel (" + std::to_string(out.offset.col + c) + ", " +
                            std::to_string(out.offset.row + r) +
                            "); the two views do not differ by a translation");
      }
      out.disparity(c, r) = d;
    }
  }
  return out;
}

double choose_k(std::span<const FaceDisparities> faces, double beta) {
  if (!(beta > 0.0 && beta <= 1.0)) {
    throw InvalidArgument("beta must lie in (0, 1], got " + std::to_string(beta));
  }
  double d_min = std::numeric_limits<double>::infinity();
  for (const auto& f : faces) d_min = std::min(d_min, f.min());
  if (!std::isfinite(d_min)) throw EmptyMask("no face covers any pixel center");
  return beta * d_min;
}

DepthField depth_field(const FaceDisparities& disparities, double k) {
  if (!(k > 0.0)) throw InvalidArgument("k must be positive");
  DepthField out;
  out.face_id = disparities.face_id;
  out.offset = disparities.offset;
  out.mask = disparities.mask;
  out.heights = Grid<double>(out.mask.width(), out.mask.height(), 0.0);
  for (std::size_t i = 0; i < out.mask.size(); ++i) {
    if (out.mask.data()[i]) out.heights.data()[i] = 1.0 - k / disparities.disparity.data()[i];
  }
  return out;
}

DepthField depth_field(const FaceAnnotation& face, double k, EstimateOptions options) {
  return depth_field(face_disparities(face, options), k);
}

Image render_grayscale(const DepthField& field) {
  Image out(field.heights.width(), field.heights.height(), 1, 0);
  for (std::size_t i = 0; i < field.heights.size(); ++i) {
    if (!field.mask.data()[i]) continue;
    const double v = std::round(255.0 * field.heights.data()[i]);
    out.pixels[i] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
  }
  return out;
}

}  // namespace relief

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>

#include "relief/geometry.hpp"
#include "relief/grid.hpp"
#include "relief/homography.hpp"
#include "relief/image.hpp"

namespace relief {

inline constexpr double kDefaultBeta = 0.9;
inline constexpr double kMinDisparity = 1e-9;

/// A corner seen in both images. Faces that list the same `id` share the
/// physical point.
struct FaceCorner {
  std::string id;
  PixelPoint p1;
  PixelPoint p2;
};

/// Four corners in a consistent winding order.
struct FaceAnnotation {
  std::string id;
  std::array<FaceCorner, 4> corners;

  CornerPairSet pairs() const;
  std::array<PixelPoint, 4> image1() const;
};

/// Pixel-center coverage of a quadrilateral, anchored at `origin` in image
/// space.
struct QuadRaster {
  CellIndex origin;
  Grid<std::uint8_t> mask;

  std::size_t count() const;
};

/// Rasterizes a simple quadrilateral by splitting it into two triangles and
/// testing each integer pixel center with barycentric coordinates, edges
/// inclusive. The split runs corner 1 to corner 3 unless that diagonal lies
/// outside a non-convex quad, in which case the other one is used.
QuadRaster rasterize_quad(const std::array<PixelPoint, 4>& quad);

/// True if the pixel center lies in the quad under the same rule as
/// rasterize_quad.
bool quad_contains(const std::array<PixelPoint, 4>& quad, const PixelPoint& p);

/// Disparity |(x, y) - M(x, y)| for every masked image-1 pixel of a face.
struct FaceDisparities {
  std::string face_id;
  Homography homography = Homography::identity();
  CellIndex offset;
  Grid<double> disparity;
  Grid<std::uint8_t> mask;

  std::size_t masked_count() const;
  /// Extremes over masked cells; +inf / -inf when the mask is empty.
  double min() const;
  double max() const;
};

/// Throws DegenerateConfiguration when the corners cannot define a
/// homography and ZeroDisparity when a masked disparity is below 1e-9.
FaceDisparities face_disparities(const FaceAnnotation& face, EstimateOptions options = {});

/// k = beta * (smallest masked disparity over every face), so that
/// k / d <= beta everywhere. Throws EmptyMask when no face covers a pixel.
double choose_k(std::span<const FaceDisparities> faces, double beta = kDefaultBeta);

/// Relative heights 1 - k/d over one face; zero off the mask.
struct DepthField {
  std::string face_id;
  CellIndex offset;
  Grid<double> heights;
  Grid<std::uint8_t> mask;
};

DepthField depth_field(const FaceDisparities& disparities, double k);
DepthField depth_field(const FaceAnnotation& face, double k, EstimateOptions options = {});

/// round(255 * h) per cell, clamped to [0, 255]; off-mask cells are black.
Image render_grayscale(const DepthField& field);

}  // namespace relief

#pragma once

#include <array>
#include <span>
#include <vector>

namespace relief {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Point3&, const Point3&) = default;
};

/// Image coordinate: origin top-left, u to the right (column), v down (row).
struct PixelPoint {
  double u = 0.0;
  double v = 0.0;

  friend bool operator==(const PixelPoint&, const PixelPoint&) = default;
};

double distance(const PixelPoint& a, const PixelPoint& b) noexcept;

/// Pinhole camera whose image plane is parallel to the reference camera's.
///
/// `translation` is the in-plane offset from the reference camera. The
/// principal point and pixel scale only place the image on a pixel grid;
/// both default to the bare image-plane coordinates (principal point at 0,
/// one pixel per image-plane unit).
struct Camera {
  double focal_length = 1.0;
  double tx = 0.0;
  double ty = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  double pixel_scale = 1.0;

  /// Focal length expressed in pixels.
  double focal_pixels() const noexcept { return focal_length * pixel_scale; }
};

/// Perspective image of `p`: (f(x-tx)/z, f(y-ty)/z) on the upright image
/// plane, then mapped to pixels with v pointing down.
/// Throws DegenerateProjection when p.z <= 1e-12.
PixelPoint project(const Point3& p, const Camera& cam);

/// Plane n . X = offset, with n of unit length.
struct Plane {
  Point3 normal;
  double offset = 0.0;
};

using Quad3 = std::array<Point3, 4>;

/// Least-squares plane through the quad's vertices plus the largest vertex
/// distance from it.
struct PlaneFit {
  Plane plane;
  double max_residual = 0.0;
  double bbox_diagonal = 0.0;
};

PlaneFit fit_plane(const Quad3& quad);

/// One planar face of a synthetic scene as seen by both cameras.
struct SynthFace {
  Quad3 vertices;
  std::array<PixelPoint, 4> image1;
  std::array<PixelPoint, 4> image2;
  Plane plane;
  Camera cam1;
  Camera cam2;

  /// Back-projects an image-1 pixel onto the face plane.
  Point3 lift(const PixelPoint& p1) const;
  /// Ground-truth axial depth of the surface seen at image-1 pixel `p1`.
  double depth_at(const PixelPoint& p1) const { return lift(p1).z; }
  /// Ground-truth image-2 position of the surface point seen at `p1`.
  PixelPoint transfer(const PixelPoint& p1) const { return project(lift(p1), cam2); }
};

/// Projects every face through both cameras. `cam1` must be the reference
/// camera (zero translation). Throws NonPlanarFace when a quad's vertices
/// stray from their best-fit plane by more than 1e-9 of the bounding-box
/// diagonal, DegenerateProjection when a vertex is not in front of a camera.
std::vector<SynthFace> synth_scene(std::span<const Quad3> faces, const Camera& cam1,
                                   const Camera& cam2);

}  // namespace relief

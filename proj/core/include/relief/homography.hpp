#pragma once

#include <Eigen/Core>

#include <array>

#include "relief/geometry.hpp"

namespace relief {

struct CornerPair {
  PixelPoint source;  // image 1
  PixelPoint target;  // image 2
};

using CornerPairSet = std::array<CornerPair, 4>;

/// Plane-to-plane map between the two images, row-vector convention:
///
///   [x y 1] * M = w * [u v 1],   w = g x + h y + j
///
/// with M laid out as
///
///   | a d g |
///   | b e h |
///   | c f j |
///
/// Stored with unit Frobenius norm and j >= 0 (sign fixed by the first
/// nonzero entry when j vanishes), so equal maps compare equal.
///
/// An extended-precision copy is kept for apply() and inverse(). Near the
/// vanishing line, rounding the nine entries to double alone can move a
/// transferred point by more than 1e-9 px.
class Homography {
 public:
  using MatrixX = Eigen::Matrix<long double, 3, 3>;

  /// Canonicalizes `m`. Throws DegenerateConfiguration if `m` is singular.
  explicit Homography(const Eigen::Matrix3d& m);
  static Homography from_extended(const MatrixX& m);

  static Homography identity();

  const Eigen::Matrix3d& matrix() const noexcept { return m_; }
  const MatrixX& matrix_extended() const noexcept { return mx_; }

  /// Coefficients in the order a, b, c, d, e, f, g, h, j.
  std::array<double, 9> coefficients() const noexcept;

  /// Image-2 position of image-1 point `p`. Throws PointAtInfinity when
  /// |w| <= 1e-12 * ||M||.
  PixelPoint apply(const PixelPoint& p) const;

  Homography inverse() const;

 private:
  struct Extended {};
  Homography(const MatrixX& m, Extended);

  MatrixX mx_;
  Eigen::Matrix3d m_;
};

struct EstimateOptions {
  /// Condition the linear system by centering and scaling the points first.
  /// Disable to solve the raw pixel-coordinate system.
  bool normalize = true;
};

/// Smallest triangle area over all 3-subsets of the points.
double min_triangle_area(const std::array<PixelPoint, 4>& pts) noexcept;

/// Builds the 8x9 homogeneous system, two rows per pair:
///
///   [x y 1 0 0 0 -xu -yu -u]
///   [0 0 0 x y 1 -xv -yv -v]
Eigen::Matrix<double, 8, 9> build_system(const CornerPairSet& pairs);

/// Estimates M from four correspondences via the nullspace of the 8x9
/// system. Throws DegenerateConfiguration when three source or three target
/// points are collinear (triangle area < 1e-6 px^2) or when the system's
/// rank drops below 8.
Homography estimate(const CornerPairSet& pairs, EstimateOptions options = {});

}  // namespace relief

#include "relief/geometry.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "relief/errors.hpp"

namespace relief {

namespace {

constexpr double kMinDepth = 1e-12;
constexpr double kPlanarityTolerance = 1e-9;

Eigen::Vector3d to_eigen(const Point3& p) { return {p.x, p.y, p.z}; }

}  // namespace

double distance(const PixelPoint& a, const PixelPoint& b) noexcept {
  return std::hypot(a.u - b.u, a.v - b.v);
}

PixelPoint project(const Point3& p, const Camera& cam) {
  if (!(p.z > kMinDepth)) {
    throw DegenerateProjection("point has depth " + std::to_string(p.z) +
                               "; it must lie in front of the camera");
  }
  const double f = cam.focal_pixels();
  return {cam.cx + f * (p.x - cam.tx) / p.z, cam.cy - f * (p.y - cam.ty) / p.z};
}

PlaneFit fit_plane(const Quad3& quad) {
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  Eigen::Vector3d lo = to_eigen(quad[0]);
  Eigen::Vector3d hi = lo;
  for (const auto& p : quad) {
    const auto e = to_eigen(p);
    centroid += e;
    lo = lo.cwiseMin(e);
    hi = hi.cwiseMax(e);
  }
  centroid /= 4.0;

  Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
  for (const auto& p : quad) {
    const Eigen::Vector3d d = to_eigen(p) - centroid;
    scatter += d * d.transpose();
  }
  // Eigenvalues come back ascending; the first eigenvector is the normal.
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(scatter);
  Eigen::Vector3d n = solver.eigenvectors().col(0).normalized();
  // Orient the normal toward the camera at the origin.
  if (n.dot(centroid) > 0) n = -n;

  PlaneFit fit;
  fit.plane.normal = {n.x(), n.y(), n.z()};
  fit.plane.offset = n.dot(centroid);
  for (const auto& p : quad) {
    fit.max_residual = std::max(fit.max_residual, std::abs(n.dot(to_eigen(p)) - fit.plane.offset));
  }
  fit.bbox_diagonal = (hi - lo).norm();
  return fit;
}

Point3 SynthFace::lift(const PixelPoint& p1) const {
  const double f = cam1.focal_pixels();
  const Eigen::Vector3d ray((p1.u - cam1.cx) / f, -(p1.v - cam1.cy) / f, 1.0);
  const Eigen::Vector3d n = to_eigen(plane.normal);
  const double along = n.dot(ray);
  if (std::abs(along) < 1e-15) {
    throw DegenerateProjection("viewing ray is parallel to the face plane");
  }
  const Eigen::Vector3d x = ray * (plane.offset / along);
  return {x.x(), x.y(), x.z()};
}

std::vector<SynthFace> synth_scene(std::span<const Quad3> faces, const Camera& cam1,
                                   const Camera& cam2) {
  if (cam1.tx != 0.0 || cam1.ty != 0.0) {
    throw InvalidArgument("the reference camera must have zero translation");
  }
  std::vector<SynthFace> out;
  out.reserve(faces.size());
  for (std::size_t i = 0; i < faces.size(); ++i) {
    const auto fit = fit_plane(faces[i]);
    if (fit.max_residual > kPlanarityTolerance * fit.bbox_diagonal) {
      throw NonPlanarFace("face " + std::to_string(i) + " deviates from its plane by " +
                          std::to_string(fit.max_residual));
    }
    SynthFace face;
    face.vertices = faces[i];
    face.plane = fit.plane;
    face.cam1 = cam1;
    face.cam2 = cam2;
    for (std::size_t c = 0; c < 4; ++c) {
      face.image1[c] = project(faces[i][c], cam1);
      face.image2[c] = project(faces[i][c], cam2);
    }
    out.push_back(face);
  }
  return out;
}

}  // namespace relief

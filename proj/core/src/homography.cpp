#include "relief/homography.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <cstdio>
#include <string>

#include "relief/errors.hpp"

namespace relief {

namespace {

constexpr double kMinTriangleArea = 1e-6;
constexpr double kRankTolerance = 1e-8;
constexpr double kInfinityTolerance = 1e-12;
constexpr double kSingularTolerance = 1e-15;

Homography::MatrixX canonical(Homography::MatrixX m) {
  const long double norm = m.norm();
  if (!(norm > 0.0L) || !std::isfinite(norm)) {
    throw DegenerateConfiguration("transformation matrix is zero or not finite");
  }
  m /= norm;
  long double pivot = m(2, 2);
  if (std::abs(pivot) < 1e-12L) {
    // j vanishes: fix the sign by the first entry (column-major a..j) that
    // does not.
    for (int k = 0; k < 9; ++k) {
      const long double v = m(k % 3, k / 3);
      if (std::abs(v) >= 1e-12L) {
        pivot = v;
        break;
      }
    }
  }
  if (pivot < 0) m = -m;
  return m;
}

// The solve runs in long double end to end. When the vanishing line passes
// close to a corner the transfer cancels hard, and a double-only pipeline
// falls about a digit short of pixel exactness there.
using Real = long double;
using Matrix3l = Homography::MatrixX;
using System = Eigen::Matrix<Real, 8, 9>;

struct PairL {
  Real x, y, u, v;
};

/// Row-vector similarity taking points to centroid 0, mean distance sqrt(2):
/// [x' y' 1] = [x y 1] * N.
Matrix3l normalizer(const std::array<PixelPoint, 4>& pts) {
  Real cx = 0, cy = 0;
  for (const auto& p : pts) {
    cx += p.u;
    cy += p.v;
  }
  cx /= 4;
  cy /= 4;
  Real mean = 0;
  for (const auto& p : pts) mean += std::hypot(p.u - cx, p.v - cy);
  mean /= 4;
  const Real s = std::sqrt(Real(2)) / mean;
  Matrix3l n;
  n << s, 0, 0,
       0, s, 0,
       -s * cx, -s * cy, 1;
  return n;
}

System system_of(const std::array<PairL, 4>& pairs) {
  System a;
  for (int i = 0; i < 4; ++i) {
    const auto [x, y, u, v] = pairs[i];
    a.row(2 * i) << x, y, 1, 0, 0, 0, -x * u, -y * u, -u;
    a.row(2 * i + 1) << 0, 0, 0, x, y, 1, -x * v, -y * v, -v;
  }
  return a;
}

/// Nullspace of the 8x9 correspondence system, returned as M filled column
/// by column from h = (a, b, c, d, e, f, g, h, j).
Matrix3l solve_nullspace(const std::array<PairL, 4>& pairs) {
  const System al = system_of(pairs);
  const Eigen::Matrix<double, 8, 9> a = al.cast<double>();
  Eigen::JacobiSVD<Eigen::Matrix<double, 8, 9>> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sigma = svd.singularValues();
  // Eight singular values; the ninth is implicitly zero. A one-dimensional
  // nullspace needs all eight clear of zero.
  if (!(sigma(7) >= kRankTolerance * sigma(0))) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "correspondence system has rank below 8 (sigma ratio %.3g)",
                  sigma(7) / sigma(0));
    throw DegenerateConfiguration(buf);
  }

  // The double SVD gives the direction; two refinement steps against the
  // long double system take it the rest of the way.
  Eigen::Matrix<Real, 9, 1> h = svd.matrixV().col(8).cast<Real>();
  for (int iter = 0; iter < 2; ++iter) {
    const Eigen::Matrix<double, 8, 1> ut_r = svd.matrixU().transpose() * (al * h).cast<double>();
    Eigen::Matrix<double, 9, 1> delta = Eigen::Matrix<double, 9, 1>::Zero();
    for (int k = 0; k < 8; ++k) delta += svd.matrixV().col(k) * (ut_r(k) / sigma(k));
    h -= delta.cast<Real>();
    h /= h.norm();
  }
  Matrix3l m;
  for (int k = 0; k < 9; ++k) m(k % 3, k / 3) = h(k);
  return m;
}

}  // namespace

Homography::Homography(const Eigen::Matrix3d& m) : Homography(MatrixX(m.cast<long double>()), Extended{}) {}

Homography Homography::from_extended(const MatrixX& m) { return Homography(m, Extended{}); }

Homography::Homography(const MatrixX& m, Extended) : mx_(canonical(m)), m_(mx_.cast<double>()) {
  const Eigen::Vector3d sigma = Eigen::JacobiSVD<Eigen::Matrix3d>(m_).singularValues();
  if (!(sigma(2) >= kSingularTolerance * sigma(0))) {
    throw DegenerateConfiguration("transformation matrix is singular");
  }
}

Homography Homography::identity() { return Homography(Eigen::Matrix3d::Identity()); }

std::array<double, 9> Homography::coefficients() const noexcept {
  std::array<double, 9> out{};
  for (int k = 0; k < 9; ++k) out[k] = m_(k % 3, k / 3);
  return out;
}

PixelPoint Homography::apply(const PixelPoint& p) const {
  const Eigen::Matrix<long double, 1, 3> r = Eigen::Matrix<long double, 1, 3>(p.u, p.v, 1) * mx_;
  // ||M|| is 1 after canonicalization.
  if (std::abs(r(2)) <= kInfinityTolerance) {
    throw PointAtInfinity("point (" + std::to_string(p.u) + ", " + std::to_string(p.v) +
                          ") maps to infinity");
  }
  return {static_cast<double>(r(0) / r(2)), static_cast<double>(r(1) / r(2))};
}

Homography Homography::inverse() const { return from_extended(mx_.inverse()); }

double min_triangle_area(const std::array<PixelPoint, 4>& pts) noexcept {
  static constexpr int kTriples[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
  double best = INFINITY;
  for (const auto& t : kTriples) {
    const auto& a = pts[t[0]];
    const auto& b = pts[t[1]];
    const auto& c = pts[t[2]];
    const double area = 0.5 * std::abs((b.u - a.u) * (c.v - a.v) - (b.v - a.v) * (c.u - a.u));
    best = std::min(best, area);
  }
  return best;
}

Eigen::Matrix<double, 8, 9> build_system(const CornerPairSet& pairs) {
  Eigen::Matrix<double, 8, 9> a;
  for (int i = 0; i < 4; ++i) {
    const double x = pairs[i].source.u, y = pairs[i].source.v;
    const double u = pairs[i].target.u, v = pairs[i].target.v;
    a.row(2 * i) << x, y, 1, 0, 0, 0, -x * u, -y * u, -u;
    a.row(2 * i + 1) << 0, 0, 0, x, y, 1, -x * v, -y * v, -v;
  }
  return a;
}

Homography estimate(const CornerPairSet& pairs, EstimateOptions options) {
  std::array<PixelPoint, 4> src, dst;
  for (int i = 0; i < 4; ++i) {
    src[i] = pairs[i].source;
    dst[i] = pairs[i].target;
  }
  for (const auto* pts : {&src, &dst}) {
    for (const auto& p : *pts) {
      if (!std::isfinite(p.u) || !std::isfinite(p.v)) {
        throw DegenerateConfiguration("corner coordinates must be finite");
      }
    }
  }
  if (min_triangle_area(src) < kMinTriangleArea) {
    throw DegenerateConfiguration("three of the image-1 corners are collinear");
  }
  if (min_triangle_area(dst) < kMinTriangleArea) {
    throw DegenerateConfiguration("three of the image-2 corners are collinear");
  }

  std::array<PairL, 4> work;
  Matrix3l n_src = Matrix3l::Identity(), n_dst = Matrix3l::Identity();
  if (options.normalize) {
    n_src = normalizer(src);
    n_dst = normalizer(dst);
  }
  for (int i = 0; i < 4; ++i) {
    const Eigen::Matrix<Real, 1, 3> s = Eigen::Matrix<Real, 1, 3>(src[i].u, src[i].v, 1) * n_src;
    const Eigen::Matrix<Real, 1, 3> t = Eigen::Matrix<Real, 1, 3>(dst[i].u, dst[i].v, 1) * n_dst;
    work[i] = {s(0) / s(2), s(1) / s(2), t(0) / t(2), t(1) / t(2)};
  }
  // [x y 1] N_src M' = w [u v 1] N_dst  =>  M = N_src M' N_dst^-1
  return Homography::from_extended(n_src * solve_nullspace(work) * n_dst.inverse());
}

}  // namespace relief

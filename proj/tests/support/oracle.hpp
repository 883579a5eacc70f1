#pragma once

// Reference computations for the tests. Nothing here calls into relief::
// so the checks stay independent of the code under test.

#include <array>
#include <cmath>
#include <utility>
#include <vector>

namespace oracle {

struct V3 {
  double x, y, z;
};

inline V3 sub(V3 a, V3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline double dot(V3 a, V3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline V3 cross(V3 a, V3 b) { return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x}; }

struct Cam {
  double fpx;  // focal length in pixels
  double cx, cy;
  double tx, ty;
};

// u to the right, v down.
inline std::pair<double, double> pixel(V3 p, const Cam& c) {
  return {c.cx + c.fpx * (p.x - c.tx) / p.z, c.cy - c.fpx * (p.y - c.ty) / p.z};
}

// Intersects the reference camera's ray through (u, v) with the plane through a, b, c.
inline V3 lift(double u, double v, V3 a, V3 b, V3 c, const Cam& cam) {
  const V3 dir{(u - cam.cx) / cam.fpx, -(v - cam.cy) / cam.fpx, 1.0};
  const V3 n = cross(sub(b, a), sub(c, a));
  const double t = dot(n, a) / dot(n, dir);
  return {dir.x * t, dir.y * t, t};
}

// Crossing-number point-in-polygon; points on an edge count as inside.
inline bool inside_polygon(const std::vector<std::pair<double, double>>& poly, double x, double y) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto [x0, y0] = poly[i];
    const auto [x1, y1] = poly[(i + 1) % n];
    const double cr = (x1 - x0) * (y - y0) - (y1 - y0) * (x - x0);
    const double len = std::hypot(x1 - x0, y1 - y0);
    if (std::abs(cr) <= 1e-9 * len && x >= std::min(x0, x1) - 1e-12 && x <= std::max(x0, x1) + 1e-12 &&
        y >= std::min(y0, y1) - 1e-12 && y <= std::max(y0, y1) + 1e-12) {
      return true;
    }
  }
  bool in = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto [xi, yi] = poly[i];
    const auto [xj, yj] = poly[j];
    if ((yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi) in = !in;
  }
  return in;
}

// Median with the even-count convention of averaging the middle pair.
inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace oracle

// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "oracle.hpp"
#include "relief/errors.hpp"
#include "relief/homography.hpp"
#include "relief/image.hpp"
#include "relief/pipeline.hpp"
#include "relief/presets.hpp"
#include "relief/rmap.hpp"
#include "relief/stl.hpp"
#include "testing.hpp"

using namespace relief;
using testing_support::Rng;
using testing_support::TempDir;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double tri_area(PixelPoint a, PixelPoint b, PixelPoint c) {
  return 0.5 * std::abs((b.u - a.u) * (c.v - a.v) - (b.v - a.v) * (c.u - a.u));
}

double min_area(const std::array<PixelPoint, 4>& p) {
  return std::min({tri_area(p[0], p[1], p[2]), tri_area(p[0], p[1], p[3]), tri_area(p[0], p[2], p[3]),
                   tri_area(p[1], p[2], p[3])});
}

// ---------------------------------------------------------------------------

Verdict homography_exactness() {
  Rng rng(1001);
  std::vector<CornerPairSet> sets;
  while (sets.size() < 10000) {
    std::array<PixelPoint, 4> s, t;
    for (int i = 0; i < 4; ++i) {
      s[i] = {rng.uniform(0, 1000), rng.uniform(0, 1000)};
      t[i] = {rng.uniform(0, 1000), rng.uniform(0, 1000)};
    }
    // Non-degenerate: no three points of either side within 1000 px^2 of a line.
    if (min_area(s) < 1000 || min_area(t) < 1000) continue;
    CornerPairSet p;
    for (int i = 0; i < 4; ++i) p[i] = {s[i], t[i]};
    sets.push_back(p);
  }
  double worst = 0, worst_rounded = 0;
  const auto t0 = Clock::now();
  for (const auto& p : sets) {
    const Homography h = estimate(p);
    for (const auto& pr : p) worst = std::max(worst, distance(h.apply(pr.source), pr.target));
  }
  const double secs = seconds_since(t0);
  // For the record: the same transfer written out from the nine entries
  // rounded to double. A few sets put a corner within ~1e-7 of the vanishing
  // line, where that rounding alone is worth about 1e-9 px.
  for (const auto& p : sets) {
    const auto k = Homography(estimate(p).matrix()).coefficients();  // a..j
    for (const auto& pr : p) {
      const double x = pr.source.u, y = pr.source.v;
      const double w = k[6] * x + k[7] * y + k[8];
      const double u = (k[0] * x + k[1] * y + k[2]) / w, v = (k[3] * x + k[4] * y + k[5]) / w;
      worst_rounded = std::max(worst_rounded, std::hypot(u - pr.target.u, v - pr.target.v));
    }
  }
  return {worst <= 1e-9 && secs < 10,
          fmt("worst %.3g px over %zu sets, %.2f s (double-rounded entries: %.3g px)", worst, sets.size(), secs,
              worst_rounded)};
}

// Random planar face seen by a reference camera and a translated copy.
struct OracleFace {
  oracle::Cam c1, c2;
  std::array<oracle::V3, 4> corners;
  std::array<PixelPoint, 4> p1, p2;
  double focal = 0, pixel_scale = 0, baseline = 0;
};

OracleFace random_face(Rng& rng) {
  for (;;) {
    OracleFace f;
    f.focal = rng.uniform(0.5, 2.0);
    f.pixel_scale = 500;
    const double fpx = f.focal * f.pixel_scale;
    const double t = rng.uniform(0.1, 1.0), phi = rng.uniform(0, 2 * M_PI);
    f.baseline = t;
    f.c1 = {fpx, 500, 500, 0, 0};
    f.c2 = {fpx, 500, 500, t * std::cos(phi), t * std::sin(phi)};

    // Plane through a center point with a bounded tilt; corners around it.
    const oracle::V3 center{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(4, 9)};
    const double gx = rng.uniform(-1.2, 1.2), gy = rng.uniform(-1.2, 1.2);  // dz/dx, dz/dy
    const double radius = rng.uniform(0.2, 0.6);
    bool ok = true;
    for (int i = 0; i < 4; ++i) {
      const double a = (i + rng.uniform(0.1, 0.9)) * M_PI / 2;  // one corner per quadrant
      const double dx = radius * std::cos(a), dy = radius * std::sin(a);
      f.corners[i] = {center.x + dx, center.y + dy, center.z + gx * dx + gy * dy};
      if (f.corners[i].z < 3 || f.corners[i].z > 10) ok = false;
    }
    if (!ok) continue;
    for (int i = 0; i < 4; ++i) {
      const auto [u1, v1] = oracle::pixel(f.corners[i], f.c1);
      const auto [u2, v2] = oracle::pixel(f.corners[i], f.c2);
      f.p1[i] = {u1, v1};
      f.p2[i] = {u2, v2};
    }
    if (min_area(f.p1) < 200 || min_area(f.p2) < 200) continue;
    return f;
  }
}

FaceAnnotation annotation(const OracleFace& f) {
  FaceAnnotation a;
  a.id = "face";
  for (int i = 0; i < 4; ++i) a.corners[i] = {"c" + std::to_string(i), f.p1[i], f.p2[i]};
  return a;
}

std::vector<OracleFace> oracle_faces() {
  Rng rng(1002);
  std::vector<OracleFace> faces;
  for (int i = 0; i < 1000; ++i) faces.push_back(random_face(rng));
  return faces;
}

Verdict oracle_transfer(const std::vector<OracleFace>& faces) {
  Rng rng(1003);
  double worst = 0;
  for (const auto& f : faces) {
    CornerPairSet pairs;
    for (int i = 0; i < 4; ++i) pairs[i] = {f.p1[i], f.p2[i]};
    const Homography h = estimate(pairs);
    for (int n = 0; n < 20; ++n) {
      // Bilinear blend of coplanar corners stays on the face and inside it.
      const double s = rng.uniform(0.02, 0.98), t = rng.uniform(0.02, 0.98);
      oracle::V3 x{0, 0, 0};
      const double w[4] = {(1 - s) * (1 - t), s * (1 - t), s * t, (1 - s) * t};
      for (int i = 0; i < 4; ++i) {
        x.x += w[i] * f.corners[i].x;
        x.y += w[i] * f.corners[i].y;
        x.z += w[i] * f.corners[i].z;
      }
      const auto [u1, v1] = oracle::pixel(x, f.c1);
      const auto [u2, v2] = oracle::pixel(x, f.c2);
      const PixelPoint got = h.apply({u1, v1});
      worst = std::max(worst, std::hypot(got.u - u2, got.v - v2));
    }
  }
  return {worst <= 1e-6, fmt("worst %.3g px over %zu faces x 20 points", worst, faces.size())};
}

Verdict depth_law(const std::vector<OracleFace>& faces) {
  double worst = 0;
  std::size_t pixels = 0;
  for (const auto& f : faces) {
    const FaceDisparities d = face_disparities(annotation(f));
    const FaceDisparities one[] = {d};
    const double k = choose_k(one);
    const double fpx = f.focal * f.pixel_scale;
    for (int r = 0; r < d.mask.height(); ++r) {
      for (int c = 0; c < d.mask.width(); ++c) {
        if (!d.mask(c, r)) continue;
        const double u = d.offset.col + c, v = d.offset.row + r;
        const double z = oracle::lift(u, v, f.corners[0], f.corners[1], f.corners[2], f.c1).z;
        const double expected = k * z / (fpx * f.baseline);
        worst = std::max(worst, std::abs(k / d.disparity(c, r) - expected) / expected);
        ++pixels;
      }
    }
  }
  return {worst <= 1e-6 && pixels > 0, fmt("worst relative error %.3g over %zu pixels", worst, pixels)};
}

// ---------------------------------------------------------------------------

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + RELIEF_CLI + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

// Independent look at a binary STL: vertices keyed by their exact float
// bits, every undirected edge on two facets, every directed edge once, and
// the divergence-theorem volume.
struct StlAudit {
  std::size_t facets = 0, edges = 0, bad_edges = 0, repeated_directed = 0;
  double volume = 0;
};

StlAudit audit_stl(const std::vector<std::uint8_t>& b) {
  StlAudit a;
  if (b.size() < 84) return a;
  std::uint32_t n = 0;
  std::memcpy(&n, b.data() + 80, 4);
  if (b.size() != 84 + 50 * std::size_t(n)) return a;
  a.facets = n;
  using Key = std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>;
  std::map<Key, std::size_t> ids;
  std::map<std::pair<std::size_t, std::size_t>, int> undirected;
  std::set<std::pair<std::size_t, std::size_t>> directed;
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint8_t* f = b.data() + 84 + 50 * std::size_t(i);
    std::size_t v[3];
    double p[3][3];
    for (int k = 0; k < 3; ++k) {
      std::uint32_t bits[3];
      float xyz[3];
      std::memcpy(bits, f + 12 + 12 * k, 12);
      std::memcpy(xyz, f + 12 + 12 * k, 12);
      v[k] = ids.emplace(Key{bits[0], bits[1], bits[2]}, ids.size()).first->second;
      for (int j = 0; j < 3; ++j) p[k][j] = xyz[j];
    }
    for (int k = 0; k < 3; ++k) {
      const std::size_t s = v[k], t = v[(k + 1) % 3];
      ++undirected[{std::min(s, t), std::max(s, t)}];
      if (!directed.insert({s, t}).second) ++a.repeated_directed;
    }
    a.volume += (p[0][0] * (p[1][1] * p[2][2] - p[1][2] * p[2][1]) - p[0][1] * (p[1][0] * p[2][2] - p[1][2] * p[2][0]) +
                 p[0][2] * (p[1][0] * p[2][1] - p[1][1] * p[2][0])) / 6.0;
  }
  a.edges = undirected.size();
  for (const auto& [e, count] : undirected) a.bad_edges += count != 2;
  return a;
}

Verdict cube_end_to_end() {
  TempDir dir("acceptance-cube");
  const auto t0 = Clock::now();
  if (run_cli("synth --preset cube --out " + q(dir / "cube")) != 0) return {false, "synth failed"};
  const fs::path project = dir / "cube" / "project.json";
  if (run_cli("run " + q(project) + " --out " + q(dir / "out")) != 0) return {false, "run failed"};
  const double secs = seconds_since(t0);

  const ReliefMap got = read_rmap(dir / "out" / "relief.rmap");
  const ReliefMap truth = read_rmap(dir / "cube" / "truth.rmap");
  // RMAP drops the image origin; take both from an in-process run.
  const SynthFixture fx = synthesize(cube_scene());
  const CellIndex origin = run_pipeline(fx.project).relief.final_map.origin;
  const int dc = origin.col - fx.truth.origin.col, dr = origin.row - fx.truth.origin.row;

  // (a) ordering against true nearness, on sampled pairs of single-face cells.
  std::vector<std::tuple<double, double>> cells;  // (reconstructed, truth)
  for (int r = 0; r < got.height(); ++r)
    for (int c = 0; c < got.width(); ++c) {
      if (got.provenance(c, r) != 1 || !truth.provenance.contains(c + dc, r + dr) ||
          !truth.provenance(c + dc, r + dr))
        continue;
      cells.emplace_back(got.heights(c, r), truth.heights(c + dc, r + dr));
    }
  Rng rng(1004);
  std::size_t compared = 0, inverted = 0;
  for (int i = 0; i < 200000 && cells.size() > 1; ++i) {
    const auto& [ha, ta] = cells[rng.integer(0, int(cells.size()) - 1)];
    const auto& [hb, tb] = cells[rng.integer(0, int(cells.size()) - 1)];
    if (std::abs(ta - tb) < 1e-3) continue;
    ++compared;
    inverted += (ha - hb) * (ta - tb) <= 0;
  }
  const bool ordering = compared > 1000 && inverted == 0;

  // (b) shared edge: provenance-2 cells against their neighbors.
  std::size_t edge_cells = 0;
  double jump = 0;
  for (int r = 0; r < got.height(); ++r)
    for (int c = 0; c < got.width(); ++c) {
      if (got.provenance(c, r) < 2) continue;
      ++edge_cells;
      for (const auto [ec, er] : {std::pair{c - 1, r}, {c + 1, r}, {c, r - 1}, {c, r + 1}}) {
        if (got.provenance.contains(ec, er) && got.provenance(ec, er))
          jump = std::max(jump, std::abs(got.heights(c, r) - got.heights(ec, er)));
      }
    }
  const bool edge = edge_cells > 50 && jump <= 0.02;

  // (c) merge order.
  bool identical = true;
  const auto base = read_file(dir / "out" / "relief.rmap");
  for (const char* order : {"left,right", "right,left"}) {
    const fs::path out = dir / (std::string("order_") + order[0] + ".rmap");
    identical &= run_cli("merge " + q(project) + " --face-order " + order + " --out " + q(out)) == 0 &&
                 read_file(out) == base;
  }

  // (d) closed, outward solid.
  const StlAudit stl = audit_stl(read_file(dir / "out" / "relief.stl"));
  const bool solid = stl.facets > 0 && stl.bad_edges == 0 && stl.repeated_directed == 0 && stl.volume > 0;

  return {ordering && edge && identical && solid && secs < 30,
          fmt("ordering %zu/%zu pairs agree, edge %zu cells max step %.2g, orders %s, "
              "stl %zu facets %zu edges %zu bad volume %.1f mm^3, %.2f s",
              compared - inverted, compared, edge_cells, jump, identical ? "identical" : "DIFFER", stl.facets,
              stl.edges, stl.bad_edges + stl.repeated_directed, stl.volume, secs)};
}

// ---------------------------------------------------------------------------

// Two smooth faces meeting along a seam whose cells were summed by the merge.
struct SpikeFixture {
  ReliefMap map;
  std::set<std::pair<int, int>> injected;
};

SpikeFixture spike_fixture(Rng& rng) {
  const int w = rng.integer(12, 60), h = rng.integer(12, 60);
  SpikeFixture fx;
  fx.map.heights = Grid<double>(w, h, 0.0);
  fx.map.provenance = Grid<std::uint8_t>(w, h, 0);
  const double a0 = rng.uniform(0.1, 0.4), ax = rng.uniform(-0.004, 0.004), ay = rng.uniform(-0.004, 0.004);
  const double b0 = rng.uniform(0.1, 0.4), bx = rng.uniform(-0.004, 0.004), by = rng.uniform(-0.004, 0.004);
  const int seam = rng.integer(w / 4, 3 * w / 4);
  const double slope = rng.uniform(-0.3, 0.3);
  const int width = rng.integer(1, 2);
  const int margin = rng.integer(0, 2);  // uncovered border
  for (int r = margin; r < h - margin; ++r) {
    // Both faces keep at least one covered column on every row.
    const int s = std::clamp(seam + int(std::lround(slope * (r - h / 2))), margin + 1, w - margin - width - 1);
    for (int c = margin; c < w - margin; ++c) {
      const double fa = a0 + ax * c + ay * r, fb = b0 + bx * c + by * r;
      if (c < s) {
        fx.map.heights(c, r) = fa;
        fx.map.provenance(c, r) = 1;
      } else if (c < s + width) {
        fx.map.heights(c, r) = fa + fb;
        fx.map.provenance(c, r) = 2;
        fx.injected.insert({c, r});
      } else {
        fx.map.heights(c, r) = fb;
        fx.map.provenance(c, r) = 1;
      }
    }
  }
  return fx;
}

Verdict spike_correction() {
  Rng rng(1005);
  std::size_t spikes = 0, missed = 0, extra = 0, wrong_value = 0, touched = 0, unstable = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const SpikeFixture fx = spike_fixture(rng);
    const ReliefMap& in = fx.map;
    const SpikeCorrection out = correct_spikes(in, kDefaultTau);

    std::set<std::pair<int, int>> found;
    for (const auto& c : out.spikes) found.insert({c.col, c.row});
    for (const auto& c : fx.injected) missed += !found.count(c);
    for (const auto& c : found) extra += !fx.injected.count(c);
    spikes += fx.injected.size();

    for (int r = 0; r < in.height(); ++r)
      for (int c = 0; c < in.width(); ++c) {
        const double now = out.map.heights(c, r);
        if (!fx.injected.count({c, r})) {
          touched += now != in.heights(c, r);
          continue;
        }
        double sum = 0;
        int n = 0;
        for (int dr = -1; dr <= 1; ++dr)
          for (int dc = -1; dc <= 1; ++dc) {
            const int nc = c + dc, nr = r + dr;
            if ((!dc && !dr) || nc < 0 || nr < 0 || nc >= in.width() || nr >= in.height()) continue;
            if (!in.provenance(nc, nr) || fx.injected.count({nc, nr})) continue;
            sum += in.heights(nc, nr);
            ++n;
          }
        wrong_value += n == 0 || std::abs(now - sum / n) > 1e-12;
      }
    unstable += correct_spikes(out.map, kDefaultTau).map.heights != out.map.heights;
  }
  const bool ok = missed == 0 && extra == 0 && wrong_value == 0 && touched == 0 && unstable == 0;
  return {ok, fmt("100 fixtures, %zu injected spikes: %zu missed, %zu extra, %zu wrong means, "
                  "%zu non-spike changes, %zu non-idempotent",
                  spikes, missed, extra, wrong_value, touched, unstable)};
}

// ---------------------------------------------------------------------------

std::set<std::vector<float>> facet_set(const SolidMesh& m) {
  std::set<std::vector<float>> out;
  for (const auto& f : m.facets) {
    std::vector<float> key;
    for (auto i : f.v) {
      key.push_back(float(m.vertices[i].x));
      key.push_back(float(m.vertices[i].y));
      key.push_back(float(m.vertices[i].z));
    }
    out.insert(key);
  }
  return out;
}

Verdict stl_byte_exactness() {
  ReliefMap flat;
  flat.heights = Grid<double>(2, 2, 0.0);
  flat.provenance = Grid<std::uint8_t>(2, 2, 1);
  const SolidMesh box = heightfield_to_solid(flat);
  const auto bin = write_stl(box);
  std::uint32_t count = 0;
  if (bin.size() >= 84) std::memcpy(&count, bin.data() + 80, 4);
  const auto again = write_stl(read_stl(bin));
  const auto ascii = write_stl(box, StlFormat::Ascii);
  const bool same_sets = facet_set(read_stl(ascii)) == facet_set(read_stl(bin));
  const bool ok = box.facets.size() == 12 && bin.size() == 684 && count == 12 && again == bin && same_sets;
  return {ok, fmt("%zu facets, %zu bytes, rewrite %s, ascii %s", box.facets.size(), bin.size(),
                  again == bin ? "identical" : "DIFFERS", same_sets ? "matches binary" : "DIFFERS")};
}

// ---------------------------------------------------------------------------

template <typename E>
bool raises(const std::function<void()>& f) {
  try {
    f();
  } catch (const E&) {
    return true;
  } catch (...) {
    return false;
  }
  return false;
}

bool reports(const ReliefProject& p, const char* code) {
  const auto d = validate(p);
  return std::any_of(d.begin(), d.end(), [&](const Diagnostic& x) { return x.code == code; });
}

Verdict degeneracy() {
  // Collinear: one corner slid onto the line through two others.
  Rng rng(1006);
  int collinear_ok = 0;
  for (int trial = 0; trial < 100; ++trial) {
    ReliefProject p = synthesize(hand_grid_scene(rng.integer(1, 3), rng.integer(1, 3), trial)).project;
    const auto& face = p.faces[rng.integer(0, int(p.faces.size()) - 1)];
    auto find = [&](const std::string& id) -> CornerRecord& {
      return *std::find_if(p.corners.begin(), p.corners.end(), [&](const CornerRecord& c) { return c.id == id; });
    };
    const PixelPoint a = find(face.corners[0]).p1, b = find(face.corners[2]).p1;
    const double t = rng.uniform(0.2, 0.8);
    find(face.corners[1]).p1 = {a.u + t * (b.u - a.u), a.v + t * (b.v - a.v)};
    collinear_ok += reports(p, "DegenerateConfiguration") &&
                    raises<DegenerateConfiguration>([&] { run_pipeline(p); });
  }

  // Zero translation: the second camera sits on the first.
  int zero_ok = 0;
  for (SynthSpec spec : {cube_scene(), slab_scene(), hand_grid_scene(2, 3, 9)}) {
    spec.tx = spec.ty = 0;
    const ReliefProject p = synthesize(spec).project;
    zero_ok += reports(p, "ZeroDisparity") && raises<ZeroDisparity>([&] { run_pipeline(p); });
  }
  return {collinear_ok == 100 && zero_ok == 3,
          fmt("collinear %d/100 reported and raised, zero translation %d/3", collinear_ok, zero_ok)};
}

}  // namespace

int main() {
  const auto faces = oracle_faces();
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"homography exactness", homography_exactness},
      {"oracle transfer", [&] { return oracle_transfer(faces); }},
      {"depth law", [&] { return depth_law(faces); }},
      {"cube end-to-end", cube_end_to_end},
      {"spike correction", spike_correction},
      {"stl byte-exactness", stl_byte_exactness},
      {"degeneracy handling", degeneracy},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}

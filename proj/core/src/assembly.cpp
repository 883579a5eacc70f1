#include "relief/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

#include "relief/errors.hpp"

namespace relief {

namespace {

double median(std::vector<double> values) {
  const std::size_t n = values.size();
  std::sort(values.begin(), values.end());
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

std::vector<std::vector<std::size_t>> AdjacencyGraph::components() const {
  std::vector<std::size_t> parent(faces.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [a, b] : edges) parent[find(a)] = find(b);

  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < faces.size(); ++i) groups[find(i)].push_back(i);
  std::vector<std::vector<std::size_t>> out;
  for (auto& [root, members] : groups) out.push_back(std::move(members));
  std::sort(out.begin(), out.end());
  return out;
}

AdjacencyGraph build_adjacency(std::span<const FaceAnnotation> faces) {
  AdjacencyGraph graph;
  std::vector<std::set<std::string>> ids(faces.size());
  for (std::size_t i = 0; i < faces.size(); ++i) {
    graph.faces.push_back(faces[i].id);
    for (const auto& c : faces[i].corners) ids[i].insert(c.id);
  }
  for (std::size_t i = 0; i < faces.size(); ++i) {
    for (std::size_t j = i + 1; j < faces.size(); ++j) {
      std::size_t shared = 0;
      for (const auto& id : ids[i]) shared += ids[j].count(id);
      if (shared >= 2) graph.edges.emplace_back(i, j);
    }
  }
  return graph;
}

void check_corner_consistency(std::span<const FaceAnnotation> faces) {
  std::unordered_map<std::string, std::pair<PixelPoint, std::string>> seen;
  for (const auto& face : faces) {
    for (const auto& corner : face.corners) {
      auto [it, inserted] = seen.try_emplace(corner.id, corner.p1, face.id);
      if (inserted) continue;
      const double gap = distance(it->second.first, corner.p1);
      if (gap > kCornerTolerance) {
        throw InconsistentCorner("corner '" + corner.id + "' is " + std::to_string(gap) +
                                 " px apart in image 1 between faces '" + it->second.second +
                                 "' and '" + face.id + "'");
      }
    }
  }
}

Alignment align_offsets(std::span<const DepthField> fields, std::span<const FaceAnnotation> faces) {
  if (fields.size() != faces.size()) {
    throw InvalidArgument("align_offsets needs one annotation per depth field");
  }
  check_corner_consistency(faces);
  const AdjacencyGraph graph = build_adjacency(faces);
  const auto groups = graph.components();
  if (groups.size() > 1) {
    std::vector<std::vector<std::string>> names;
    for (const auto& g : groups) {
      auto& out = names.emplace_back();
      for (auto i : g) out.push_back(graph.faces[i]);
    }
    throw DisconnectedFaces(std::move(names));
  }

  Alignment a;
  bool any = false;
  int col0 = 0, row0 = 0, col1 = 0, row1 = 0;
  for (const auto& f : fields) {
    if (f.heights.empty()) continue;
    const int c1 = f.offset.col + f.heights.width();
    const int r1 = f.offset.row + f.heights.height();
    if (!any) {
      col0 = f.offset.col, row0 = f.offset.row, col1 = c1, row1 = r1;
      any = true;
    } else {
      col0 = std::min(col0, f.offset.col);
      row0 = std::min(row0, f.offset.row);
      col1 = std::max(col1, c1);
      row1 = std::max(row1, r1);
    }
  }
  a.origin = {col0, row0};
  a.width = col1 - col0;
  a.height = row1 - row0;
  for (const auto& f : fields) a.offsets.push_back({f.offset.col - col0, f.offset.row - row0});
  return a;
}

ReliefMap merge(std::span<const DepthField> fields, const Alignment& alignment) {
  std::vector<std::size_t> order(fields.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  return merge(fields, alignment, order);
}

ReliefMap merge(std::span<const DepthField> fields, const Alignment& alignment,
                std::span<const std::size_t> order) {
  if (alignment.offsets.size() != fields.size() || order.size() != fields.size()) {
    throw InvalidArgument("merge needs one offset and one order slot per field");
  }
  ReliefMap out;
  out.origin = alignment.origin;
  out.heights = Grid<double>(alignment.width, alignment.height, 0.0);
  out.provenance = Grid<std::uint8_t>(alignment.width, alignment.height, 0);

  auto for_each_cell = [&](auto&& visit) {
    for (std::size_t i : order) {
      const auto& f = fields[i];
      const auto& at = alignment.offsets[i];
      for (int r = 0; r < f.heights.height(); ++r) {
        for (int c = 0; c < f.heights.width(); ++c) {
          if (f.mask(c, r)) visit(at.col + c, at.row + r, f.heights(c, r));
        }
      }
    }
  };

  for_each_cell([&](int c, int r, double) {
    auto& p = out.provenance(c, r);
    if (p < 255) ++p;
  });

  // Two addends commute exactly; three or more are summed in sorted order.
  std::unordered_map<std::size_t, std::vector<double>> crowded;
  for_each_cell([&](int c, int r, double h) {
    if (out.provenance(c, r) <= 2) {
      out.heights(c, r) += h;
    } else {
      crowded[static_cast<std::size_t>(r) * out.width() + c].push_back(h);
    }
  });
  for (auto& [index, values] : crowded) {
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    out.heights.data()[index] = sum;
  }
  return out;
}

bool is_spike(const ReliefMap& map, int col, int row, double tau) {
  const int count = map.provenance(col, row);
  if (count == 0) return false;
  const double h = map.heights(col, row);
  if (count >= 2 || h >= 1.0) return true;
  std::vector<double> around;
  around.reserve(8);
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      if (!dr && !dc) continue;
      const int c = col + dc, r = row + dr;
      if (map.provenance.contains(c, r) && map.provenance(c, r) > 0) around.push_back(map.heights(c, r));
    }
  }
  return !around.empty() && h - median(std::move(around)) > tau;
}

SpikeCorrection correct_spikes(const ReliefMap& map, double tau) {
  SpikeCorrection out;
  out.map = map;
  const int w = map.width(), h = map.height();

  Grid<std::uint8_t> spike(w, h, 0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (is_spike(map, c, r, tau)) {
        spike(c, r) = 1;
        out.spikes.push_back({c, r});
      }
    }
  }
  if (out.spikes.empty()) return out;

  Grid<std::uint8_t> isolated(w, h, 0);
  for (const auto& cell : out.spikes) {
    double sum = 0.0;
    int n = 0;
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if (!dr && !dc) continue;
        const int c = cell.col + dc, r = cell.row + dr;
        if (!map.provenance.contains(c, r) || map.provenance(c, r) == 0 || spike(c, r)) continue;
        sum += map.heights(c, r);
        ++n;
      }
    }
    if (n > 0) {
      out.map.heights(cell.col, cell.row) = sum / n;
    } else {
      isolated(cell.col, cell.row) = 1;
      out.isolated.push_back(cell);
    }
  }
  if (out.isolated.empty()) return out;

  // Median of the corrected map over every other covered cell. A second pass
  // sees the same values there, which keeps correction idempotent.
  std::vector<double> rest;
  for (std::size_t i = 0; i < out.map.heights.size(); ++i) {
    if (map.provenance.data()[i] > 0 && !isolated.data()[i]) rest.push_back(out.map.heights.data()[i]);
  }
  const double fallback = rest.empty() ? 0.0 : median(std::move(rest));
  for (const auto& cell : out.isolated) out.map.heights(cell.col, cell.row) = fallback;
  return out;
}

Image render_grayscale(const ReliefMap& map) {
  Image out(map.width(), map.height(), 1, 0);
  for (std::size_t i = 0; i < map.heights.size(); ++i) {
    if (!map.provenance.data()[i]) continue;
    const double v = std::round(255.0 * map.heights.data()[i]);
    out.pixels[i] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
  }
  return out;
}

}  // namespace relief

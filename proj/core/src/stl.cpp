#include "relief/stl.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "le.hpp"
#include "relief/errors.hpp"

namespace relief {

namespace {

constexpr std::string_view kHeaderTag = "stereorelief";
constexpr double kNormalTolerance = 1e-3;

class MeshBuilder {
 public:
  void add(const std::array<Point3, 3>& corners, const Point3& stored_normal) {
    Facet f;
    for (int k = 0; k < 3; ++k) f.v[k] = index_of(corners[k]);
    const Point3 wound = winding_normal(mesh_, f);
    const bool degenerate = wound.x == 0 && wound.y == 0 && wound.z == 0;
    const double gap = std::max({std::abs(wound.x - stored_normal.x),
                                 std::abs(wound.y - stored_normal.y),
                                 std::abs(wound.z - stored_normal.z)});
    f.normal = (!degenerate && gap > kNormalTolerance) ? wound : stored_normal;
    mesh_.facets.push_back(f);
  }

  SolidMesh take() { return std::move(mesh_); }

 private:
  std::uint32_t index_of(const Point3& p) {
    const std::array<std::uint64_t, 3> key{std::bit_cast<std::uint64_t>(p.x),
                                           std::bit_cast<std::uint64_t>(p.y),
                                           std::bit_cast<std::uint64_t>(p.z)};
    auto [it, inserted] = index_.try_emplace(key, static_cast<std::uint32_t>(mesh_.vertices.size()));
    if (inserted) mesh_.vertices.push_back(p);
    return it->second;
  }

  SolidMesh mesh_;
  std::map<std::array<std::uint64_t, 3>, std::uint32_t> index_;
};

void put_f32(std::vector<std::uint8_t>& out, double v) {
  le::put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

std::vector<std::uint8_t> write_binary(const SolidMesh& mesh) {
  std::vector<std::uint8_t> out;
  out.reserve(84 + 50 * mesh.facets.size());
  out.resize(80, 0);
  std::memcpy(out.data(), kHeaderTag.data(), kHeaderTag.size());
  le::put_u32(out, static_cast<std::uint32_t>(mesh.facets.size()));
  for (const auto& f : mesh.facets) {
    for (double c : {f.normal.x, f.normal.y, f.normal.z}) put_f32(out, c);
    for (auto idx : f.v) {
      const auto& p = mesh.vertices[idx];
      for (double c : {p.x, p.y, p.z}) put_f32(out, c);
    }
    le::put_u16(out, 0);
  }
  return out;
}

void put_triplet(std::string& out, const char* prefix, const Point3& p) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s %.5e %.5e %.5e\n", prefix, static_cast<float>(p.x),
                static_cast<float>(p.y), static_cast<float>(p.z));
  out += buf;
}

std::vector<std::uint8_t> write_ascii(const SolidMesh& mesh) {
  std::string out = "solid stereorelief\n";
  for (const auto& f : mesh.facets) {
    put_triplet(out, "  facet normal", f.normal);
    out += "    outer loop\n";
    for (auto idx : f.v) put_triplet(out, "      vertex", mesh.vertices[idx]);
    out += "    endloop\n  endfacet\n";
  }
  out += "endsolid stereorelief\n";
  return {out.begin(), out.end()};
}

float get_f32(const std::uint8_t* p) { return std::bit_cast<float>(le::get_u32(p)); }

SolidMesh read_binary(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 84) throw MalformedStl(bytes.size(), false, "binary header truncated");
  const std::uint64_t count = le::get_u32(bytes.data() + 80);
  const std::uint64_t expected = 84 + 50 * count;
  if (bytes.size() < expected) {
    throw MalformedStl(bytes.size(), false,
                       "file truncated; " + std::to_string(count) + " facets need " +
                           std::to_string(expected) + " bytes");
  }
  if (bytes.size() > expected) {
    throw MalformedStl(expected, false, "trailing bytes after the last facet");
  }
  MeshBuilder builder;
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::size_t at = 84 + 50 * i;
    std::array<float, 12> v{};
    for (int k = 0; k < 12; ++k) {
      v[k] = get_f32(bytes.data() + at + 4 * k);
      if (!std::isfinite(v[k])) throw MalformedStl(at + 4 * k, false, "non-finite coordinate");
    }
    builder.add({Point3{v[3], v[4], v[5]}, Point3{v[6], v[7], v[8]}, Point3{v[9], v[10], v[11]}},
                Point3{v[0], v[1], v[2]});
  }
  return builder.take();
}

class AsciiReader {
 public:
  explicit AsciiReader(std::span<const std::uint8_t> bytes)
      : text_(reinterpret_cast<const char*>(bytes.data()), bytes.size()) {}

  SolidMesh parse() {
    expect_line("solid", true);
    MeshBuilder builder;
    while (true) {
      auto tokens = next_line();
      if (tokens.empty()) throw MalformedStl(line_, true, "missing endsolid");
      if (tokens[0] == "endsolid") break;
      if (tokens.size() != 5 || tokens[0] != "facet" || tokens[1] != "normal") {
        throw MalformedStl(line_, true, "expected 'facet normal nx ny nz'");
      }
      const Point3 normal = triplet(tokens, 2);
      expect_exact({"outer", "loop"});
      std::array<Point3, 3> corners;
      for (auto& c : corners) {
        auto vt = next_line();
        if (vt.size() != 4 || vt[0] != "vertex") throw MalformedStl(line_, true, "expected 'vertex x y z'");
        c = triplet(vt, 1);
      }
      expect_exact({"endloop"});
      expect_exact({"endfacet"});
      builder.add(corners, normal);
    }
    return builder.take();
  }

 private:
  std::vector<std::string> next_line() {
    std::string line;
    while (pos_ < text_.size()) {
      const auto end = text_.find('\n', pos_);
      line.assign(text_.substr(pos_, end == std::string_view::npos ? std::string_view::npos : end - pos_));
      pos_ = end == std::string_view::npos ? text_.size() : end + 1;
      ++line_;
      std::istringstream in(line);
      std::vector<std::string> tokens;
      for (std::string t; in >> t;) tokens.push_back(t);
      if (!tokens.empty()) return tokens;
    }
    return {};
  }

  void expect_line(const char* keyword, bool allow_name) {
    auto tokens = next_line();
    if (tokens.empty() || tokens[0] != keyword || (!allow_name && tokens.size() != 1)) {
      throw MalformedStl(line_, true, std::string("expected '") + keyword + "'");
    }
  }

  void expect_exact(std::initializer_list<const char*> words) {
    auto tokens = next_line();
    bool ok = tokens.size() == words.size();
    std::size_t i = 0;
    std::string wanted;
    for (const char* w : words) {
      ok = ok && tokens[i++] == w;
      wanted += (wanted.empty() ? "" : " ") + std::string(w);
    }
    if (!ok) throw MalformedStl(line_, true, "expected '" + wanted + "'");
  }

  Point3 triplet(const std::vector<std::string>& tokens, std::size_t first) {
    std::array<double, 3> v{};
    for (int k = 0; k < 3; ++k) {
      const std::string& t = tokens[first + k];
      char* end = nullptr;
      const float f = std::strtof(t.c_str(), &end);
      if (end != t.c_str() + t.size() || !std::isfinite(f)) {
        throw MalformedStl(line_, true, "bad number '" + t + "'");
      }
      v[k] = f;
    }
    return {v[0], v[1], v[2]};
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
};

bool looks_ascii(std::span<const std::uint8_t> bytes) {
  const std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  return text.starts_with("solid") && text.find("facet") != std::string_view::npos;
}

}  // namespace

std::vector<std::uint8_t> write_stl(const SolidMesh& mesh, StlFormat format) {
  return format == StlFormat::Binary ? write_binary(mesh) : write_ascii(mesh);
}

SolidMesh read_stl(std::span<const std::uint8_t> bytes) {
  if (looks_ascii(bytes)) return AsciiReader(bytes).parse();
  return read_binary(bytes);
}

}  // namespace relief

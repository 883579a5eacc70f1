#include "relief/project.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "relief/errors.hpp"

namespace relief {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------------------
// Strict readers. Each takes the JSON pointer of the value it reads.

void require_object(const json& j, const std::string& path,
                    std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw SchemaError(path + "/" + key, "unknown field");
    }
  }
}

const json& member(const json& j, const std::string& path, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(path + "/" + key, "missing required field");
  return *it;
}

double read_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw SchemaError(path, "expected a finite number");
  return v;
}

int read_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
  return j.get<int>();
}

std::string read_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw SchemaError(path, "expected a string");
  return j.get<std::string>();
}

std::string read_id(const json& j, const std::string& path) {
  auto s = read_string(j, path);
  if (s.empty()) throw SchemaError(path, "identifier must not be empty");
  return s;
}

const json& read_array(const json& j, const std::string& path, std::optional<std::size_t> size = {}) {
  if (!j.is_array()) throw SchemaError(path, "expected an array");
  if (size && j.size() != *size) {
    throw SchemaError(path, "expected " + std::to_string(*size) + " elements, found " +
                                std::to_string(j.size()));
  }
  return j;
}

PixelPoint read_pixel(const json& j, const std::string& path) {
  read_array(j, path, 2);
  return {read_number(j[0], path + "/0"), read_number(j[1], path + "/1")};
}

Point3 read_point3(const json& j, const std::string& path) {
  read_array(j, path, 3);
  return {read_number(j[0], path + "/0"), read_number(j[1], path + "/1"),
          read_number(j[2], path + "/2")};
}

std::array<std::string, 4> read_id4(const json& j, const std::string& path) {
  read_array(j, path, 4);
  std::array<std::string, 4> out;
  for (std::size_t i = 0; i < 4; ++i) out[i] = read_id(j[i], path + "/" + std::to_string(i));
  std::set<std::string> unique(out.begin(), out.end());
  if (unique.size() != 4) throw SchemaError(path, "corner ids within a face must be distinct");
  return out;
}

MeshParams read_mesh_params(const json& j, const std::string& path) {
  require_object(j, path, {"stride", "scale_xy", "height_mm", "base_mm"});
  MeshParams m;
  if (j.contains("stride")) m.stride = read_int(j["stride"], path + "/stride");
  if (j.contains("scale_xy")) m.scale_xy = read_number(j["scale_xy"], path + "/scale_xy");
  if (j.contains("height_mm")) m.height_mm = read_number(j["height_mm"], path + "/height_mm");
  if (j.contains("base_mm")) m.base_mm = read_number(j["base_mm"], path + "/base_mm");
  try {
    m.validate();
  } catch (const Error& e) {
    throw SchemaError(path, e.what());
  }
  return m;
}

ProjectParams read_params(const json& j, const std::string& path) {
  require_object(j, path, {"beta", "tau", "mesh"});
  ProjectParams p;
  if (j.contains("beta")) p.beta = read_number(j["beta"], path + "/beta");
  if (j.contains("tau")) p.tau = read_number(j["tau"], path + "/tau");
  if (j.contains("mesh")) p.mesh = read_mesh_params(j["mesh"], path + "/mesh");
  if (!(p.beta > 0 && p.beta <= 1)) throw SchemaError(path + "/beta", "beta must lie in (0, 1]");
  if (!(p.tau > 0)) throw SchemaError(path + "/tau", "tau must be positive");
  return p;
}

SynthSpec read_synth(const json& j, const std::string& path) {
  require_object(j, path, {"focal_length", "pixel_scale", "principal_point", "translation",
                           "image_size", "faces"});
  SynthSpec s;
  s.focal_length = read_number(member(j, path, "focal_length"), path + "/focal_length");
  if (!(s.focal_length > 0)) throw SchemaError(path + "/focal_length", "must be positive");
  if (j.contains("pixel_scale")) {
    s.pixel_scale = read_number(j["pixel_scale"], path + "/pixel_scale");
    if (!(s.pixel_scale > 0)) throw SchemaError(path + "/pixel_scale", "must be positive");
  }
  if (j.contains("principal_point")) {
    s.principal_point = read_pixel(j["principal_point"], path + "/principal_point");
  }
  const auto t = read_pixel(member(j, path, "translation"), path + "/translation");
  s.tx = t.u;
  s.ty = t.v;
  const auto& size = read_array(member(j, path, "image_size"), path + "/image_size", 2);
  s.image_width = read_int(size[0], path + "/image_size/0");
  s.image_height = read_int(size[1], path + "/image_size/1");
  if (s.image_width <= 0 || s.image_height <= 0) {
    throw SchemaError(path + "/image_size", "image size must be positive");
  }
  const auto& faces = read_array(member(j, path, "faces"), path + "/faces");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < faces.size(); ++i) {
    const std::string fp = path + "/faces/" + std::to_string(i);
    require_object(faces[i], fp, {"id", "corner_ids", "vertices"});
    SynthFaceSpec f;
    f.id = read_id(member(faces[i], fp, "id"), fp + "/id");
    if (!ids.insert(f.id).second) throw SchemaError(fp + "/id", "duplicate face id");
    f.corner_ids = read_id4(member(faces[i], fp, "corner_ids"), fp + "/corner_ids");
    const auto& verts = read_array(member(faces[i], fp, "vertices"), fp + "/vertices", 4);
    for (std::size_t k = 0; k < 4; ++k) {
      f.vertices[k] = read_point3(verts[k], fp + "/vertices/" + std::to_string(k));
    }
    s.faces.push_back(std::move(f));
  }
  return s;
}

ReliefProject read_project(const json& j) {
  const std::string root;
  require_object(j, root, {"version", "name", "image1_path", "image2_path", "corners", "faces",
                           "params", "cell_edits", "synth"});
  ReliefProject p;
  p.version = read_int(member(j, root, "version"), "/version");
  if (p.version != kProjectVersion) {
    throw SchemaError("/version", "unsupported project version " + std::to_string(p.version));
  }
  if (j.contains("name")) p.name = read_string(j["name"], "/name");
  p.image1_path = read_string(member(j, root, "image1_path"), "/image1_path");
  p.image2_path = read_string(member(j, root, "image2_path"), "/image2_path");

  const auto& corners = read_array(member(j, root, "corners"), "/corners");
  std::set<std::string> corner_ids;
  for (std::size_t i = 0; i < corners.size(); ++i) {
    const std::string cp = "/corners/" + std::to_string(i);
    require_object(corners[i], cp, {"id", "p1", "p2"});
    CornerRecord c;
    c.id = read_id(member(corners[i], cp, "id"), cp + "/id");
    if (!corner_ids.insert(c.id).second) throw SchemaError(cp + "/id", "duplicate corner id");
    c.p1 = read_pixel(member(corners[i], cp, "p1"), cp + "/p1");
    c.p2 = read_pixel(member(corners[i], cp, "p2"), cp + "/p2");
    p.corners.push_back(std::move(c));
  }

  const auto& faces = read_array(member(j, root, "faces"), "/faces");
  std::set<std::string> face_ids;
  for (std::size_t i = 0; i < faces.size(); ++i) {
    const std::string fp = "/faces/" + std::to_string(i);
    require_object(faces[i], fp, {"id", "corners"});
    FaceRecord f;
    f.id = read_id(member(faces[i], fp, "id"), fp + "/id");
    if (!face_ids.insert(f.id).second) throw SchemaError(fp + "/id", "duplicate face id");
    f.corners = read_id4(member(faces[i], fp, "corners"), fp + "/corners");
    for (std::size_t k = 0; k < 4; ++k) {
      if (!corner_ids.count(f.corners[k])) {
        throw SchemaError(fp + "/corners/" + std::to_string(k),
                          "unknown corner id '" + f.corners[k] + "'");
      }
    }
    p.faces.push_back(std::move(f));
  }

  if (j.contains("params")) p.params = read_params(j["params"], "/params");

  if (j.contains("cell_edits")) {
    const auto& edits = read_array(j["cell_edits"], "/cell_edits");
    for (std::size_t i = 0; i < edits.size(); ++i) {
      const std::string ep = "/cell_edits/" + std::to_string(i);
      require_object(edits[i], ep, {"cell", "height"});
      const auto& cell = read_array(member(edits[i], ep, "cell"), ep + "/cell", 2);
      CellEdit e;
      e.cell = {read_int(cell[0], ep + "/cell/0"), read_int(cell[1], ep + "/cell/1")};
      e.height = read_number(member(edits[i], ep, "height"), ep + "/height");
      if (!(e.height >= 0 && e.height < 1)) throw SchemaError(ep + "/height", "height must lie in [0, 1)");
      p.cell_edits.push_back(e);
    }
  }

  if (j.contains("synth")) p.synth = read_synth(j["synth"], "/synth");
  return p;
}

json parse_text(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("invalid JSON: ") + e.what());
  }
}

ordered_json pixel_json(const PixelPoint& p) { return ordered_json::array({p.u, p.v}); }

ordered_json synth_json(const SynthSpec& s) {
  ordered_json out;
  out["focal_length"] = s.focal_length;
  out["pixel_scale"] = s.pixel_scale;
  out["principal_point"] = pixel_json(s.principal_point);
  out["translation"] = ordered_json::array({s.tx, s.ty});
  out["image_size"] = ordered_json::array({s.image_width, s.image_height});
  out["faces"] = ordered_json::array();
  for (const auto& f : s.faces) {
    ordered_json face;
    face["id"] = f.id;
    face["corner_ids"] = f.corner_ids;
    face["vertices"] = ordered_json::array();
    for (const auto& v : f.vertices) face["vertices"].push_back({v.x, v.y, v.z});
    out["faces"].push_back(std::move(face));
  }
  return out;
}

void add(std::vector<Diagnostic>& out, std::string code, std::string path, std::string message) {
  out.push_back({std::move(code), std::move(path), std::move(message)});
}

}  // namespace

Camera SynthSpec::camera1() const {
  return {focal_length, 0.0, 0.0, principal_point.u, principal_point.v, pixel_scale};
}

Camera SynthSpec::camera2() const {
  return {focal_length, tx, ty, principal_point.u, principal_point.v, pixel_scale};
}

std::vector<FaceAnnotation> ReliefProject::annotations() const {
  std::unordered_map<std::string, const CornerRecord*> table;
  for (const auto& c : corners) table.emplace(c.id, &c);
  std::vector<FaceAnnotation> out;
  out.reserve(faces.size());
  for (std::size_t i = 0; i < faces.size(); ++i) {
    FaceAnnotation a;
    a.id = faces[i].id;
    for (std::size_t k = 0; k < 4; ++k) {
      auto it = table.find(faces[i].corners[k]);
      if (it == table.end()) {
        throw SchemaError("/faces/" + std::to_string(i) + "/corners/" + std::to_string(k),
                          "unknown corner id '" + faces[i].corners[k] + "'");
      }
      a.corners[k] = {it->second->id, it->second->p1, it->second->p2};
    }
    out.push_back(std::move(a));
  }
  return out;
}

ReliefProject parse_project(std::string_view json_text) { return read_project(parse_text(json_text)); }

SynthSpec parse_synth_spec(std::string_view json_text) { return read_synth(parse_text(json_text), ""); }

std::string to_json(const ReliefProject& p) {
  ordered_json j;
  j["version"] = p.version;
  j["name"] = p.name;
  j["image1_path"] = p.image1_path;
  j["image2_path"] = p.image2_path;
  j["corners"] = ordered_json::array();
  for (const auto& c : p.corners) {
    j["corners"].push_back({{"id", c.id}, {"p1", pixel_json(c.p1)}, {"p2", pixel_json(c.p2)}});
  }
  j["faces"] = ordered_json::array();
  for (const auto& f : p.faces) j["faces"].push_back({{"id", f.id}, {"corners", f.corners}});
  j["params"] = {{"beta", p.params.beta},
                 {"tau", p.params.tau},
                 {"mesh",
                  {{"stride", p.params.mesh.stride},
                   {"scale_xy", p.params.mesh.scale_xy},
                   {"height_mm", p.params.mesh.height_mm},
                   {"base_mm", p.params.mesh.base_mm}}}};
  j["cell_edits"] = ordered_json::array();
  for (const auto& e : p.cell_edits) {
    j["cell_edits"].push_back(
        {{"cell", ordered_json::array({e.cell.col, e.cell.row})}, {"height", e.height}});
  }
  if (p.synth) j["synth"] = synth_json(*p.synth);
  return j.dump(2) + "\n";
}

ReliefProject load_project(const std::filesystem::path& path, bool check_images) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open project " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  ReliefProject p = parse_project(buffer.str());
  if (check_images) {
    const auto dir = path.parent_path();
    for (const auto* image : {&p.image1_path, &p.image2_path}) {
      if (image->empty() || !std::filesystem::exists(dir / *image)) {
        throw MissingImage("image '" + *image + "' referenced by " + path.string() + " not found");
      }
    }
  }
  return p;
}

void save_project(const ReliefProject& project, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write project " + path.string());
  out << to_json(project);
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<Diagnostic> validate(const ReliefProject& project, std::optional<ImageSize> image1,
                                 std::optional<ImageSize> image2) {
  std::vector<Diagnostic> out;

  std::vector<FaceAnnotation> faces;
  try {
    faces = project.annotations();
  } catch (const SchemaError& e) {
    add(out, "SchemaError", e.path(), e.what());
    return out;
  }
  if (faces.empty()) {
    add(out, "EmptyProject", "/faces", "the project defines no faces");
    return out;
  }

  for (std::size_t i = 0; i < project.corners.size(); ++i) {
    const auto& c = project.corners[i];
    const std::string cp = "/corners/" + std::to_string(i);
    for (const auto& [point, size, key] :
         {std::tuple{c.p1, image1, "p1"}, std::tuple{c.p2, image2, "p2"}}) {
      if (!size) continue;
      if (point.u < -0.5 || point.v < -0.5 || point.u > size->width - 0.5 ||
          point.v > size->height - 0.5) {
        add(out, "OutOfImage", cp + "/" + key,
            "corner '" + c.id + "' lies outside the " + std::to_string(size->width) + "x" +
                std::to_string(size->height) + " image");
      }
    }
  }

  std::vector<FaceDisparities> disparities;
  bool all_faces_ok = true;
  for (std::size_t i = 0; i < faces.size(); ++i) {
    const std::string fp = "/faces/" + std::to_string(i);
    try {
      disparities.push_back(face_disparities(faces[i]));
    } catch (const Error& e) {
      all_faces_ok = false;
      add(out, std::string(to_string(e.kind())), fp, "face '" + faces[i].id + "': " + e.what());
    }
  }
  if (all_faces_ok) {
    try {
      choose_k(disparities, project.params.beta);
    } catch (const Error& e) {
      add(out, std::string(to_string(e.kind())), "/faces", e.what());
    }
    int col0 = 0, row0 = 0, col1 = -1, row1 = -1;
    bool any = false;
    for (const auto& d : disparities) {
      if (d.mask.empty()) continue;
      const int c1 = d.offset.col + d.mask.width() - 1, r1 = d.offset.row + d.mask.height() - 1;
      col0 = any ? std::min(col0, d.offset.col) : d.offset.col;
      row0 = any ? std::min(row0, d.offset.row) : d.offset.row;
      col1 = any ? std::max(col1, c1) : c1;
      row1 = any ? std::max(row1, r1) : r1;
      any = true;
    }
    const int s = project.params.mesh.stride;
    if (any && ((col1 - col0) / s + 1 < 2 || (row1 - row0) / s + 1 < 2)) {
      add(out, "DegenerateGrid", "/params/mesh/stride",
          "the merged map samples to fewer than 2x2 cells at this stride");
    }
    for (std::size_t i = 0; i < project.cell_edits.size(); ++i) {
      const auto& cell = project.cell_edits[i].cell;
      const bool covered = std::any_of(disparities.begin(), disparities.end(), [&](const auto& d) {
        const int c = cell.col - d.offset.col, r = cell.row - d.offset.row;
        return d.mask.contains(c, r) && d.mask(c, r);
      });
      if (!covered) {
        add(out, "InvalidArgument", "/cell_edits/" + std::to_string(i) + "/cell",
            "edited cell is not covered by any face");
      }
    }
  }

  try {
    check_corner_consistency(faces);
  } catch (const Error& e) {
    add(out, "InconsistentCorner", "/faces", e.what());
  }

  const auto graph = build_adjacency(faces);
  const auto groups = graph.components();
  if (groups.size() > 1) {
    std::vector<std::vector<std::string>> names;
    for (const auto& g : groups) {
      auto& n = names.emplace_back();
      for (auto i : g) n.push_back(graph.faces[i]);
    }
    add(out, "DisconnectedFaces", "/faces", DisconnectedFaces(names).what());
  }

  for (std::size_t i = 0; i < project.cell_edits.size(); ++i) {
    const auto& e = project.cell_edits[i];
    if (!(e.height >= 0 && e.height < 1)) {
      add(out, "InvalidArgument", "/cell_edits/" + std::to_string(i) + "/height",
          "height must lie in [0, 1)");
    }
  }
  return out;
}

std::vector<Diagnostic> validate(const ReliefProject& project,
                                 const std::filesystem::path& project_dir) {
  auto size_of = [&](const std::string& rel) -> std::optional<ImageSize> {
    if (rel.empty()) return std::nullopt;
    const auto path = project_dir / rel;
    if (!std::filesystem::exists(path)) return std::nullopt;
    try {
      return read_png_size(path);
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  return validate(project, size_of(project.image1_path), size_of(project.image2_path));
}

}  // namespace relief

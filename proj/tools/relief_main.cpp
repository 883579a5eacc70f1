// relief: command-line front end to the reconstruction pipeline.
#include <CLI11.hpp>

#include <algorithm>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "relief/errors.hpp"
#include "relief/image.hpp"
#include "relief/pipeline.hpp"
#include "relief/presets.hpp"
#include "relief/project.hpp"
#include "relief/rmap.hpp"
#include "relief/stl.hpp"
#include "server.hpp"

namespace fs = std::filesystem;
using namespace relief;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = static_cast<int>(ErrorClass::Validation);
constexpr int kExitGeometry = static_cast<int>(ErrorClass::Geometry);
constexpr int kExitIo = static_cast<int>(ErrorClass::Io);
constexpr int kExitInternal = static_cast<int>(ErrorClass::Internal);

struct MeshFlags {
  int stride = 1;
  double scale = MeshParams{}.scale_xy;
  double height = MeshParams{}.height_mm;
  double base = MeshParams{}.base_mm;
  bool ascii = false;

  void add(CLI::App* cmd) {
    cmd->add_option("--stride", stride, "Sample every n-th cell")->check(CLI::PositiveNumber);
    cmd->add_option("--scale", scale, "Millimeters per source cell");
    cmd->add_option("--height", height, "Millimeters for relative height 1.0");
    cmd->add_option("--base", base, "Base slab thickness in millimeters");
    cmd->add_flag("--ascii", ascii, "Write ASCII STL instead of binary");
  }
  MeshParams params() const {
    MeshParams p{stride, scale, height, base};
    p.validate();
    return p;
  }
};

int diag_exit_code(const std::vector<Diagnostic>& diags) {
  static const std::vector<std::string> geometry = {
      "DegenerateProjection", "NonPlanarFace", "DegenerateConfiguration",
      "PointAtInfinity",      "ZeroDisparity", "DegenerateGrid"};
  for (const auto& d : diags) {
    if (std::find(geometry.begin(), geometry.end(), d.code) != geometry.end()) return kExitGeometry;
  }
  return kExitValidation;
}

void print_diagnostics(const std::vector<Diagnostic>& diags, std::ostream& out) {
  for (const auto& d : diags) out << d.code << " " << (d.path.empty() ? "/" : d.path) << ": " << d.message << "\n";
}

// Loads a project and refuses to go on if validate() has anything to say.
ReliefProject load_checked(const fs::path& file, int& exit_code) {
  ReliefProject project = load_project(file);
  const auto diags = validate(project, file.parent_path());
  if (!diags.empty()) {
    print_diagnostics(diags, std::cerr);
    exit_code = diag_exit_code(diags);
  }
  return project;
}

std::vector<std::size_t> parse_order(const std::string& spec, const ReliefProject& project) {
  std::vector<std::size_t> order;
  if (spec.empty()) return order;
  std::stringstream ss(spec);
  std::string id;
  while (std::getline(ss, id, ',')) {
    auto it = std::find_if(project.faces.begin(), project.faces.end(),
                           [&](const FaceRecord& f) { return f.id == id; });
    if (it == project.faces.end()) throw InvalidArgument("--face-order names unknown face '" + id + "'");
    order.push_back(static_cast<std::size_t>(it - project.faces.begin()));
  }
  return order;
}

std::string format_matrix(const Homography& h) {
  const auto& m = h.matrix();
  std::string out;
  char buf[32];
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", m(r, c));
      if (!out.empty()) out += ' ';
      out += buf;
    }
  }
  return out;
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_file(path, bytes);
}

int cmd_synth(const std::string& preset, const std::string& scene_file, const std::string& faces,
              std::uint64_t seed, const fs::path& out) {
  SynthSpec spec;
  if (!scene_file.empty()) {
    const auto bytes = read_file(scene_file);
    spec = parse_synth_spec(std::string(bytes.begin(), bytes.end()));
  } else if (preset == "cube") {
    spec = cube_scene();
  } else if (preset == "slab") {
    spec = slab_scene();
  } else {
    int rows = 0, cols = 0;
    char x = 0;
    std::istringstream in(faces);
    if (!(in >> rows >> x >> cols) || (x != 'x' && x != 'X') || rows < 1 || cols < 1) {
      throw InvalidArgument("--faces expects ROWSxCOLS, e.g. 6x8");
    }
    spec = hand_grid_scene(rows, cols, seed);
  }

  const SynthFixture fx = synthesize(spec);
  fs::create_directories(out);
  save_project(fx.project, out / "project.json");
  write_png(fx.image1, out / "image1.png");
  write_png(fx.image2, out / "image2.png");
  write_rmap(fx.truth, out / "truth.rmap");
  std::cout << "wrote " << fx.project.faces.size() << " face(s) to " << out.string() << "\n";
  return kExitOk;
}

int cmd_validate(const fs::path& file) {
  const ReliefProject project = load_project(file);
  const auto diags = validate(project, file.parent_path());
  if (diags.empty()) {
    std::cout << "ok: " << project.faces.size() << " face(s)\n";
    return kExitOk;
  }
  print_diagnostics(diags, std::cout);
  return diag_exit_code(diags);
}

int cmd_homography(const fs::path& file, const std::string& face_id, bool raw) {
  int code = kExitOk;
  const ReliefProject project = load_checked(file, code);
  if (code) return code;
  bool found = false;
  for (const auto& face : project.annotations()) {
    if (!face_id.empty() && face.id != face_id) continue;
    found = true;
    const Homography h = estimate(face.pairs(), EstimateOptions{!raw});
    if (face_id.empty()) std::cout << face.id << " ";
    std::cout << format_matrix(h) << "\n";
  }
  if (!found) throw InvalidArgument("no face '" + face_id + "'");
  return kExitOk;
}

int cmd_depth(const fs::path& file, const fs::path& out) {
  int code = kExitOk;
  const ReliefProject project = load_checked(file, code);
  if (code) return code;
  const DepthStage depth = compute_depth(project);
  fs::create_directories(out);
  for (const auto& field : depth.fields) write_png(render_grayscale(field), out / ("face_" + field.face_id + ".png"));

  char buf[160];
  std::snprintf(buf, sizeof buf, "d_min %.17g\nd_max %.17g\nk %.17g\n", depth.d_min, depth.d_max, depth.k);
  write_file(out / "summary.txt", std::string(buf));
  std::cout << buf;
  return kExitOk;
}

ReliefStage merge_stage(const ReliefProject& project, const std::string& order_spec, DepthStage* depth_out) {
  const auto order = parse_order(order_spec, project);
  DepthStage depth = compute_depth(project);
  ReliefStage stage = assemble(depth, project, order);
  for (const auto& c : stage.corrected.isolated) {
    std::cerr << "warning: isolated spike at (" << stage.final_map.origin.col + c.col << ", "
              << stage.final_map.origin.row + c.row << ") set to the global median\n";
  }
  if (depth_out) *depth_out = std::move(depth);
  return stage;
}

int cmd_merge(const fs::path& file, const fs::path& out, const std::string& order_spec,
              const std::string& preview) {
  int code = kExitOk;
  const ReliefProject project = load_checked(file, code);
  if (code) return code;
  const ReliefStage stage = merge_stage(project, order_spec, nullptr);
  write_bytes(out, encode_rmap(stage.final_map));
  if (!preview.empty()) write_png(render_grayscale(stage.final_map), preview);
  std::cout << "merged " << stage.final_map.width() << "x" << stage.final_map.height() << ", "
            << stage.corrected.spikes.size() << " spike(s) corrected\n";
  return kExitOk;
}

int cmd_mesh(const fs::path& in, const fs::path& out, const MeshFlags& flags) {
  const ReliefMap map = read_rmap(in);
  const SolidMesh mesh = heightfield_to_solid(map, flags.params());
  write_bytes(out, write_stl(mesh, flags.ascii ? StlFormat::Ascii : StlFormat::Binary));
  std::cout << "wrote " << mesh.facets.size() << " facets\n";
  return kExitOk;
}

int cmd_run(const fs::path& file, const fs::path& out, const std::string& order_spec, const MeshFlags& flags,
            bool mesh_flags_given) {
  int code = kExitOk;
  const ReliefProject project = load_checked(file, code);
  if (code) return code;
  DepthStage depth;
  const ReliefStage stage = merge_stage(project, order_spec, &depth);

  fs::create_directories(out);
  for (const auto& field : depth.fields) write_png(render_grayscale(field), out / ("face_" + field.face_id + ".png"));
  write_png(render_grayscale(stage.final_map), out / "merged.png");
  write_rmap(stage.final_map, out / "relief.rmap");

  // Mesh from the RMAP round trip so `run` and `merge` + `mesh` agree byte for byte.
  const ReliefMap stored = read_rmap(out / "relief.rmap");
  const MeshParams params = mesh_flags_given ? flags.params() : project.params.mesh;
  const SolidMesh mesh = heightfield_to_solid(stored, params);
  write_file(out / "relief.stl", write_stl(mesh, flags.ascii ? StlFormat::Ascii : StlFormat::Binary));

  std::printf("%zu face(s), k %.6g, map %dx%d, %zu spike(s), %zu facets\n", depth.fields.size(), depth.k,
              stage.final_map.width(), stage.final_map.height(), stage.corrected.spikes.size(),
              mesh.facets.size());
  return kExitOk;
}

int cmd_serve(int port, const fs::path& project_dir, const std::string& static_dir) {
  server::ServerConfig config{project_dir, std::nullopt};
  if (!static_dir.empty()) config.static_dir = fs::path(static_dir);

  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  server::ReliefServer srv(config);
  if (!srv.bind("127.0.0.1", port)) {
    std::cerr << "error: IoError: cannot bind port " << port << "\n";
    return kExitIo;
  }
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&set, &sig);
    srv.stop();
  });
  std::cout << "listening on http://127.0.0.1:" << srv.port() << std::endl;
  srv.listen();
  // Unblock the waiter if the server stopped on its own.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bas-relief reconstruction from two photographs"};
  app.require_subcommand(1);

  std::string preset = "cube", scene, faces = "6x8", order, face, preview;
  std::uint64_t seed = 1;
  fs::path project, out, input;
  MeshFlags mesh_flags;
  bool raw = false;
  int port = 8080;
  std::string static_dir;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic project with ground truth");
  synth->add_option("--preset", preset, "Scene preset")->check(CLI::IsMember({"cube", "slab", "hand-grid"}));
  synth->add_option("--scene", scene, "Scene JSON file (overrides --preset)")->check(CLI::ExistingFile);
  synth->add_option("--faces", faces, "Grid size for hand-grid, ROWSxCOLS");
  synth->add_option("--seed", seed, "Random seed for hand-grid");
  synth->add_option("--out", out, "Output directory")->required();

  auto* run = app.add_subcommand("run", "Project to depth maps, relief map and STL");
  run->add_option("project", project, "Project file")->required();
  run->add_option("--out", out, "Output directory")->required();
  run->add_option("--face-order", order, "Comma-separated face ids in merge order");
  mesh_flags.add(run);

  auto* homography = app.add_subcommand("homography", "Print each face's homography, row-major");
  homography->add_option("project", project, "Project file")->required();
  homography->add_option("--face", face, "Only this face; prints the bare 9 numbers");
  homography->add_flag("--raw", raw, "Skip coordinate normalization");

  auto* depth = app.add_subcommand("depth", "Per-face depth previews and disparity summary");
  depth->add_option("project", project, "Project file")->required();
  depth->add_option("--out", out, "Output directory")->required();

  auto* merge = app.add_subcommand("merge", "Project to spike-corrected relief map (RMAP)");
  merge->add_option("project", project, "Project file")->required();
  merge->add_option("--out", out, "Output RMAP file")->required();
  merge->add_option("--face-order", order, "Comma-separated face ids in merge order");
  merge->add_option("--preview", preview, "Also write a grayscale PNG");

  auto* mesh = app.add_subcommand("mesh", "Relief map (RMAP) to STL");
  mesh->add_option("rmap", input, "Input RMAP file")->required();
  mesh->add_option("--out", out, "Output STL file")->required();
  mesh_flags.add(mesh);

  auto* validate_cmd = app.add_subcommand("validate", "Report annotation problems");
  validate_cmd->add_option("project", project, "Project file")->required();

  auto* serve = app.add_subcommand("serve", "HTTP API for the annotation UI");
  serve->add_option("--port", port, "TCP port")->check(CLI::Range(0, 65535));
  serve->add_option("--project-dir", project, "Directory holding projects")->required();
  serve->add_option("--static-dir", static_dir, "Serve UI files from here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*synth) return cmd_synth(preset, scene, faces, seed, out);
    if (*run) {
      const bool given = run->count("--stride") || run->count("--scale") || run->count("--height") ||
                         run->count("--base");
      return cmd_run(project, out, order, mesh_flags, given);
    }
    if (*homography) return cmd_homography(project, face, raw);
    if (*depth) return cmd_depth(project, out);
    if (*merge) return cmd_merge(project, out, order, preview);
    if (*mesh) return cmd_mesh(input, out, mesh_flags);
    if (*validate_cmd) return cmd_validate(project);
    if (*serve) return cmd_serve(port, project, static_dir);
  } catch (const SchemaError& e) {
    std::cerr << "error: SchemaError " << e.path() << ": " << e.what() << "\n";
    return kExitValidation;
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return static_cast<int>(classify(e.kind()));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}

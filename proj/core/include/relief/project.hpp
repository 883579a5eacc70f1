#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "relief/assembly.hpp"
#include "relief/depthfield.hpp"
#include "relief/geometry.hpp"
#include "relief/image.hpp"
#include "relief/mesh.hpp"

namespace relief {

inline constexpr int kProjectVersion = 1;

struct CornerRecord {
  std::string id;
  PixelPoint p1;
  PixelPoint p2;
};

struct FaceRecord {
  std::string id;
  std::array<std::string, 4> corners;
};

/// A manual override of one merged-map cell, in image-1 pixel coordinates.
struct CellEdit {
  CellIndex cell;
  double height = 0.0;
};

struct ProjectParams {
  double beta = kDefaultBeta;
  double tau = kDefaultTau;
  MeshParams mesh;
};

struct SynthFaceSpec {
  std::string id;
  std::array<std::string, 4> corner_ids;
  Quad3 vertices;
};

/// Oracle scene: a reference camera and a translated copy of it.
struct SynthSpec {
  double focal_length = 1.0;
  double pixel_scale = 1.0;
  PixelPoint principal_point;
  double tx = 0.0;
  double ty = 0.0;
  int image_width = 0;
  int image_height = 0;
  std::vector<SynthFaceSpec> faces;

  Camera camera1() const;
  Camera camera2() const;
};

struct ReliefProject {
  int version = kProjectVersion;
  std::string name;
  std::string image1_path;  // relative to the project file
  std::string image2_path;
  std::vector<CornerRecord> corners;
  std::vector<FaceRecord> faces;
  ProjectParams params;
  std::vector<CellEdit> cell_edits;
  std::optional<SynthSpec> synth;

  /// Resolves each face's corner ids. Throws SchemaError for unknown ids.
  std::vector<FaceAnnotation> annotations() const;
};

/// Strict JSON schema: unknown keys, wrong types and dangling references
/// raise SchemaError carrying a JSON pointer to the offending value.
ReliefProject parse_project(std::string_view json_text);
SynthSpec parse_synth_spec(std::string_view json_text);

/// Canonical serialization (fixed key order, two-space indent).
std::string to_json(const ReliefProject& project);

/// Loads a project file. With `check_images`, referenced images that do
/// not exist raise MissingImage.
ReliefProject load_project(const std::filesystem::path& path, bool check_images = true);
void save_project(const ReliefProject& project, const std::filesystem::path& path);

struct Diagnostic {
  std::string code;  // error name, e.g. "DegenerateConfiguration"
  std::string path;  // JSON pointer into the project
  std::string message;
};

/// Everything the pipeline would trip over on annotation grounds. Image
/// bounds are checked only for images whose size is given.
std::vector<Diagnostic> validate(const ReliefProject& project,
                                 std::optional<ImageSize> image1 = std::nullopt,
                                 std::optional<ImageSize> image2 = std::nullopt);

/// Same, reading image sizes from files next to the project when present.
std::vector<Diagnostic> validate(const ReliefProject& project,
                                 const std::filesystem::path& project_dir);

}  // namespace relief

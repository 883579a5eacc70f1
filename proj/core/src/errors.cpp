#include "relief/errors.hpp"

namespace relief {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DegenerateProjection: return "DegenerateProjection";
    case ErrorKind::NonPlanarFace: return "NonPlanarFace";
    case ErrorKind::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorKind::PointAtInfinity: return "PointAtInfinity";
    case ErrorKind::ZeroDisparity: return "ZeroDisparity";
    case ErrorKind::EmptyMask: return "EmptyMask";
    case ErrorKind::DisconnectedFaces: return "DisconnectedFaces";
    case ErrorKind::InconsistentCorner: return "InconsistentCorner";
    case ErrorKind::DegenerateGrid: return "DegenerateGrid";
    case ErrorKind::MalformedStl: return "MalformedStl";
    case ErrorKind::MalformedRmap: return "MalformedRmap";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::MissingImage: return "MissingImage";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

ErrorClass classify(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::SchemaError:
    case ErrorKind::DisconnectedFaces:
    case ErrorKind::InconsistentCorner:
    case ErrorKind::EmptyMask:
    case ErrorKind::InvalidArgument:
      return ErrorClass::Validation;
    case ErrorKind::DegenerateProjection:
    case ErrorKind::NonPlanarFace:
    case ErrorKind::DegenerateConfiguration:
    case ErrorKind::PointAtInfinity:
    case ErrorKind::ZeroDisparity:
    case ErrorKind::DegenerateGrid:
      return ErrorClass::Geometry;
    case ErrorKind::MalformedStl:
    case ErrorKind::MalformedRmap:
    case ErrorKind::MissingImage:
    case ErrorKind::IoError:
      return ErrorClass::Io;
  }
  return ErrorClass::Internal;
}

namespace {

std::string describe_components(const std::vector<std::vector<std::string>>& components) {
  std::string out = "faces form " + std::to_string(components.size()) +
                    " disconnected groups:";
  for (const auto& group : components) {
    out += " {";
    for (std::size_t i = 0; i < group.size(); ++i) {
      if (i) out += ", ";
      out += group[i];
    }
    out += "}";
  }
  return out;
}

}  // namespace

DisconnectedFaces::DisconnectedFaces(std::vector<std::vector<std::string>> components)
    : Error(ErrorKind::DisconnectedFaces, describe_components(components)),
      components_(std::move(components)) {}

MalformedStl::MalformedStl(std::size_t offset, bool is_line, const std::string& what)
    : Error(ErrorKind::MalformedStl,
            (is_line ? "line " : "byte offset ") + std::to_string(offset) + ": " + what),
      offset_(offset),
      is_line_(is_line) {}

SchemaError::SchemaError(std::string path, const std::string& what)
    : Error(ErrorKind::SchemaError, (path.empty() ? std::string("/") : path) + ": " + what),
      path_(std::move(path)) {}

}  // namespace relief

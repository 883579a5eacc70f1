#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace relief {

enum class ErrorKind {
  DegenerateProjection,
  NonPlanarFace,
  DegenerateConfiguration,
  PointAtInfinity,
  ZeroDisparity,
  EmptyMask,
  DisconnectedFaces,
  InconsistentCorner,
  DegenerateGrid,
  MalformedStl,
  MalformedRmap,
  SchemaError,
  MissingImage,
  IoError,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Coarse category used for process exit codes.
enum class ErrorClass { Validation = 2, Geometry = 3, Io = 4, Internal = 5 };

ErrorClass classify(ErrorKind kind) noexcept;

/// Base of every exception raised by the toolkit. `kind()` names the failure
/// so callers (the CLI, the server) can map it without RTTI games.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

template <ErrorKind K>
class TypedError : public Error {
 public:
  explicit TypedError(const std::string& what) : Error(K, what) {}
};

using DegenerateProjection = TypedError<ErrorKind::DegenerateProjection>;
using NonPlanarFace = TypedError<ErrorKind::NonPlanarFace>;
using DegenerateConfiguration = TypedError<ErrorKind::DegenerateConfiguration>;
using PointAtInfinity = TypedError<ErrorKind::PointAtInfinity>;
using ZeroDisparity = TypedError<ErrorKind::ZeroDisparity>;
using EmptyMask = TypedError<ErrorKind::EmptyMask>;
using InconsistentCorner = TypedError<ErrorKind::InconsistentCorner>;
using DegenerateGrid = TypedError<ErrorKind::DegenerateGrid>;
using MalformedRmap = TypedError<ErrorKind::MalformedRmap>;
using MissingImage = TypedError<ErrorKind::MissingImage>;
using IoError = TypedError<ErrorKind::IoError>;
using InvalidArgument = TypedError<ErrorKind::InvalidArgument>;

class DisconnectedFaces : public Error {
 public:
  explicit DisconnectedFaces(std::vector<std::vector<std::string>> components);

  const std::vector<std::vector<std::string>>& components() const noexcept {
    return components_;
  }

 private:
  std::vector<std::vector<std::string>> components_;
};

class MalformedStl : public Error {
 public:
  /// `offset` is a byte offset for binary input and a 1-based line number
  /// for ASCII input.
  MalformedStl(std::size_t offset, bool is_line, const std::string& what);

  std::size_t offset() const noexcept { return offset_; }
  bool is_line() const noexcept { return is_line_; }

 private:
  std::size_t offset_;
  bool is_line_;
};

class SchemaError : public Error {
 public:
  /// `path` is a JSON pointer, e.g. "/faces/0/corners".
  SchemaError(std::string path, const std::string& what);

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace relief

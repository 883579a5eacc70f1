#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "relief/mesh.hpp"

namespace relief {

enum class StlFormat { Binary, Ascii };

/// Binary: 80-byte header ("stereorelief", zero padded), u32 facet count,
/// then per facet 12 little-endian float32 (normal, v1, v2, v3) and a zero
/// u16 attribute; 84 + 50 n bytes in total. ASCII: the solid / facet normal /
/// outer loop / vertex grammar with 6 significant digits.
std::vector<std::uint8_t> write_stl(const SolidMesh& mesh, StlFormat format = StlFormat::Binary);

/// Parses either flavour: input that starts with "solid" and mentions
/// "facet" is read as ASCII, anything else as binary. Vertices are merged
/// by exact equality; a stored normal that disagrees with the winding by
/// more than 1e-3 is replaced by the recomputed one. Throws MalformedStl
/// with the byte offset (binary) or line number (ASCII) of the problem.
SolidMesh read_stl(std::span<const std::uint8_t> bytes);

}  // namespace relief

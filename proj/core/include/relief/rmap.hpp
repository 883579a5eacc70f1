#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "relief/assembly.hpp"

namespace relief {

/// Portable float grid, little-endian:
///
///   "RMAP"  u32 width  u32 height
///   width*height f64 heights, row-major
///   width*height u8 provenance
///
/// The image-1 origin is not stored; a decoded map has origin (0, 0).
std::vector<std::uint8_t> encode_rmap(const ReliefMap& map);
ReliefMap decode_rmap(std::span<const std::uint8_t> bytes);

void write_rmap(const ReliefMap& map, const std::filesystem::path& path);
ReliefMap read_rmap(const std::filesystem::path& path);

}  // namespace relief

#include "relief/rmap.hpp"

#include <bit>
#include <cstring>
#include <iterator>
#include <string>

#include "relief/errors.hpp"
#include "relief/image.hpp"
#include "le.hpp"

namespace relief {

std::vector<std::uint8_t> encode_rmap(const ReliefMap& map) {
  const std::size_t cells = map.heights.size();
  static constexpr std::uint8_t kMagic[4] = {'R', 'M', 'A', 'P'};
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  out.reserve(12 + cells * 9);
  le::put_u32(out, static_cast<std::uint32_t>(map.width()));
  le::put_u32(out, static_cast<std::uint32_t>(map.height()));
  for (double h : map.heights.data()) le::put_u64(out, std::bit_cast<std::uint64_t>(h));
  out.insert(out.end(), map.provenance.data().begin(), map.provenance.data().end());
  return out;
}

ReliefMap decode_rmap(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RMAP", 4) != 0) {
    throw MalformedRmap("missing RMAP header");
  }
  const std::uint32_t w = le::get_u32(bytes.data() + 4);
  const std::uint32_t h = le::get_u32(bytes.data() + 8);
  const std::uint64_t cells = static_cast<std::uint64_t>(w) * h;
  if (w > (1u << 20) || h > (1u << 20) || bytes.size() != 12 + cells * 9) {
    throw MalformedRmap("expected " + std::to_string(12 + cells * 9) + " bytes for a " +
                        std::to_string(w) + "x" + std::to_string(h) + " map, found " +
                        std::to_string(bytes.size()));
  }
  ReliefMap map;
  map.heights = Grid<double>(static_cast<int>(w), static_cast<int>(h));
  map.provenance = Grid<std::uint8_t>(static_cast<int>(w), static_cast<int>(h));
  const std::uint8_t* p = bytes.data() + 12;
  for (auto& v : map.heights.data()) {
    v = std::bit_cast<double>(le::get_u64(p));
    p += 8;
  }
  std::memcpy(map.provenance.data().data(), p, cells);
  return map;
}

void write_rmap(const ReliefMap& map, const std::filesystem::path& path) {
  write_file(path, encode_rmap(map));
}

ReliefMap read_rmap(const std::filesystem::path& path) { return decode_rmap(read_file(path)); }

}  // namespace relief

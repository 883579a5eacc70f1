#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace relief {

/// Integer position in image-1 pixel space: column, row.
struct CellIndex {
  int col = 0;
  int row = 0;

  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// Dense row-major 2D array.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, T fill = T{})
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {
    assert(width >= 0 && height >= 0);
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  bool contains(int col, int row) const noexcept {
    return col >= 0 && row >= 0 && col < width_ && row < height_;
  }

  T& operator()(int col, int row) noexcept {
    assert(contains(col, row));
    return data_[static_cast<std::size_t>(row) * width_ + col];
  }
  const T& operator()(int col, int row) const noexcept {
    assert(contains(col, row));
    return data_[static_cast<std::size_t>(row) * width_ + col];
  }

  std::vector<T>& data() noexcept { return data_; }
  const std::vector<T>& data() const noexcept { return data_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

}  // namespace relief

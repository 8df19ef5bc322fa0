#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vortex/regions.hpp"

namespace vortex::detail {

// Dense sub-box of the cell grid covering a cell set plus `pad` cells of
// margin on every side (clipped to the grid for pad == 0, free otherwise).
// Local coordinates may fall outside the global grid when padded.
struct CellBox {
  std::array<std::ptrdiff_t, 3> lo{};  // global cell coords of local (0,0,0)
  std::array<std::size_t, 3> size{};
  std::size_t volume = 0;

  static CellBox around(const CellField& field, std::span<const CellId> cells, std::size_t pad = 0) {
    CellBox b;
    std::array<std::size_t, 3> mn{SIZE_MAX, SIZE_MAX, SIZE_MAX};
    std::array<std::size_t, 3> mx{0, 0, 0};
    for (CellId c : cells) {
      const Index3 p = field.unlinear(c);
      for (int a = 0; a < 3; ++a) {
        mn[a] = std::min(mn[a], p[a]);
        mx[a] = std::max(mx[a], p[a]);
      }
    }
    if (cells.empty()) mn = {0, 0, 0};
    for (int a = 0; a < 3; ++a) {
      b.lo[a] = static_cast<std::ptrdiff_t>(mn[a]) - static_cast<std::ptrdiff_t>(pad);
      b.size[a] = mx[a] - mn[a] + 1 + 2 * pad;
    }
    b.volume = b.size[0] * b.size[1] * b.size[2];
    return b;
  }

  [[nodiscard]] std::size_t local(std::size_t x, std::size_t y, std::size_t z) const noexcept {
    return x + size[0] * (y + size[1] * z);
  }
  [[nodiscard]] std::array<std::size_t, 3> local_coords(std::size_t l) const noexcept {
    return {l % size[0], (l / size[0]) % size[1], l / (size[0] * size[1])};
  }
  [[nodiscard]] std::size_t from_global(const CellField& field, CellId c) const noexcept {
    const Index3 p = field.unlinear(c);
    return local(static_cast<std::size_t>(static_cast<std::ptrdiff_t>(p.i) - lo[0]),
                 static_cast<std::size_t>(static_cast<std::ptrdiff_t>(p.j) - lo[1]),
                 static_cast<std::size_t>(static_cast<std::ptrdiff_t>(p.k) - lo[2]));
  }
  // Global cell id of a local index; only valid when inside the grid.
  [[nodiscard]] bool to_global(const CellField& field, std::size_t l, CellId& out) const noexcept {
    const auto p = local_coords(l);
    std::array<std::ptrdiff_t, 3> g{};
    for (int a = 0; a < 3; ++a) {
      g[a] = static_cast<std::ptrdiff_t>(p[a]) + lo[a];
      if (g[a] < 0 || g[a] >= static_cast<std::ptrdiff_t>(field.cdims[a])) return false;
    }
    out = field.linear(static_cast<std::size_t>(g[0]), static_cast<std::size_t>(g[1]),
                       static_cast<std::size_t>(g[2]));
    return true;
  }

  [[nodiscard]] CellId global(const CellField& field, std::size_t l) const noexcept {
    CellId g = 0;
    [[maybe_unused]] const bool inside = to_global(field, l, g);
    return g;
  }

  [[nodiscard]] std::vector<std::uint8_t> mask(const CellField& field, std::span<const CellId> cells) const {
    std::vector<std::uint8_t> m(volume, 0);
    for (CellId c : cells) m[from_global(field, c)] = 1;
    return m;
  }
};

constexpr std::array<std::array<int, 3>, 6> kFaceOffsets{{{-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}, {0, 0, -1}, {0, 0, 1}}};

}  // namespace vortex::detail

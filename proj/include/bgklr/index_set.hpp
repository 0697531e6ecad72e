#pragma once

#include "bgklr/types.hpp"

#include <vector>

namespace bgklr {

enum class GridSide { x, v };

/// Ordered, distinct indices into a flattened x- or v-grid.
struct IndexSet {
  std::vector<Index> indices;
  GridSide side = GridSide::x;

  Index size() const { return static_cast<Index>(indices.size()); }
  bool empty() const { return indices.empty(); }
  Index operator[](Index k) const { return indices[static_cast<std::size_t>(k)]; }

  static IndexSet all(Index n, GridSide side) {
    IndexSet set{std::vector<Index>(static_cast<std::size_t>(n)), side};
    for (Index k = 0; k < n; ++k) set.indices[static_cast<std::size_t>(k)] = k;
    return set;
  }

  bool operator==(const IndexSet&) const = default;
};

/// Throws DimensionError unless every index lies in [0, n).
inline void check_bounds(const IndexSet& set, Index n, const char* what) {
  for (Index i : set.indices) {
    if (i < 0 || i >= n) {
      throw DimensionError(std::string(what) + ": index " + std::to_string(i) +
                           " out of range [0, " + std::to_string(n) + ")");
    }
  }
}

}  // namespace bgklr

#pragma once

#include <cstddef>
#include <vector>

#include "lge/grid.hpp"

namespace lge {

enum class Connectivity { four = 4, eight = 8 };

// Component ids are 1..count in order of each component's first pixel in
// x-fastest scan order; 0 marks background.
struct Components {
  Grid2D<int> labels;
  std::vector<std::size_t> sizes;  // sizes[id - 1]

  std::size_t count() const { return sizes.size(); }
  // Id of the largest component, lowest id on ties; 0 when there is none.
  int largest() const;
};

// Two-pass labelling with union-find over provisional labels.
Components connected_components(const Mask2D& mask, Connectivity connectivity);

// Drops components smaller than `min_size` pixels.
Mask2D remove_small_components(const Mask2D& mask, std::size_t min_size,
                               Connectivity connectivity = Connectivity::eight);

}  // namespace lge

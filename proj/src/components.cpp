#include "lge/components.hpp"

#include <numeric>

namespace lge {

namespace {

class DisjointSets {
 public:
  int make() {
    parent_.push_back(static_cast<int>(parent_.size()));
    return parent_.back();
  }
  int find(int a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    // keep the smaller root so the earliest provisional label represents the set
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }
  std::size_t size() const { return parent_.size(); }

 private:
  std::vector<int> parent_;
};

}  // namespace

int Components::largest() const {
  int best = 0;
  std::size_t best_size = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] > best_size) {
      best_size = sizes[i];
      best = static_cast<int>(i) + 1;
    }
  }
  return best;
}

Components connected_components(const Mask2D& mask, Connectivity connectivity) {
  const int w = mask.width();
  const int h = mask.height();
  Grid2D<int> provisional(w, h, -1);
  DisjointSets sets;

  // Already-visited neighbours in scan order.
  static constexpr int kBack4[2][2] = {{-1, 0}, {0, -1}};
  static constexpr int kBack8[4][2] = {{-1, 0}, {-1, -1}, {0, -1}, {1, -1}};
  const bool eight = connectivity == Connectivity::eight;

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (mask(x, y) == 0) continue;
      int label = -1;
      const int count = eight ? 4 : 2;
      for (int k = 0; k < count; ++k) {
        const int nx = x + (eight ? kBack8[k][0] : kBack4[k][0]);
        const int ny = y + (eight ? kBack8[k][1] : kBack4[k][1]);
        if (!mask.contains(nx, ny)) continue;
        const int other = provisional(nx, ny);
        if (other < 0) continue;
        if (label < 0) {
          label = other;
        } else {
          sets.unite(label, other);
        }
      }
      provisional(x, y) = label < 0 ? sets.make() : label;
    }
  }

  Components out;
  out.labels = Grid2D<int>(w, h, 0);
  std::vector<int> final_id(sets.size(), 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int p = provisional(x, y);
      if (p < 0) continue;
      const int root = sets.find(p);
      if (final_id[root] == 0) {
        out.sizes.push_back(0);
        final_id[root] = static_cast<int>(out.sizes.size());
      }
      out.labels(x, y) = final_id[root];
      ++out.sizes[final_id[root] - 1];
    }
  }
  return out;
}

Mask2D remove_small_components(const Mask2D& mask, std::size_t min_size,
                               Connectivity connectivity) {
  if (min_size <= 1) return mask;
  const Components cc = connected_components(mask, connectivity);
  Mask2D out(mask.width(), mask.height());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int id = cc.labels.data()[i];
    if (id > 0 && cc.sizes[id - 1] >= min_size) out.data()[i] = 1;
  }
  return out;
}

}  // namespace lge

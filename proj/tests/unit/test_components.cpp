#include <gtest/gtest.h>

#include <map>
#include <random>

#include "lge/components.hpp"
#include "oracles.hpp"

using namespace lge;

namespace {

std::vector<oracle::Region> regions_of(const Components& cc) {
  std::vector<oracle::Region> out(cc.count());
  for (int y = 0; y < cc.labels.height(); ++y)
    for (int x = 0; x < cc.labels.width(); ++x) {
      const int id = cc.labels(x, y);
      if (id > 0) out[static_cast<std::size_t>(id - 1)].insert({x, y});
    }
  return out;
}

Mask2D random_mask(std::mt19937_64& rng, int w, int h, double density) {
  Mask2D m(w, h);
  std::bernoulli_distribution on(density);
  for (auto& v : m.data()) v = on(rng) ? 1 : 0;
  return m;
}

}  // namespace

TEST(Components, EmptyMask) {
  const Components cc = connected_components(Mask2D(5, 5), Connectivity::eight);
  EXPECT_EQ(cc.count(), 0u);
  EXPECT_EQ(cc.largest(), 0);
}

TEST(Components, DiagonalNeighbours) {
  Mask2D m(3, 3);
  m(0, 0) = 1;
  m(1, 1) = 1;
  EXPECT_EQ(connected_components(m, Connectivity::eight).count(), 1u);
  EXPECT_EQ(connected_components(m, Connectivity::four).count(), 2u);
}

TEST(Components, MatchesFloodFillOnRandomMasks) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    const Mask2D m = random_mask(rng, 32, 32, 0.2 + 0.5 * (trial % 5) / 5.0);
    for (bool eight : {false, true}) {
      const Components cc =
          connected_components(m, eight ? Connectivity::eight : Connectivity::four);
      const auto expected = oracle::flood_fill(m.data(), 32, 32, eight);
      ASSERT_EQ(regions_of(cc), expected);
      for (std::size_t i = 0; i < expected.size(); ++i) {
        ASSERT_EQ(cc.sizes[i], expected[i].size());
      }
    }
  }
}

TEST(Components, LargestPrefersLowestIdOnTies) {
  Mask2D m(7, 1);
  m(0, 0) = m(1, 0) = 1;
  m(4, 0) = m(5, 0) = 1;
  EXPECT_EQ(connected_components(m, Connectivity::eight).largest(), 1);
  m(6, 0) = 1;
  EXPECT_EQ(connected_components(m, Connectivity::eight).largest(), 2);
}

TEST(Components, RemoveSmall) {
  Mask2D m(6, 6);
  m(0, 0) = 1;
  for (int x = 2; x < 6; ++x) m(x, 4) = 1;
  const Mask2D kept = remove_small_components(m, 2);
  EXPECT_EQ(kept(0, 0), 0);
  EXPECT_EQ(kept(3, 4), 1);
  EXPECT_EQ(remove_small_components(m, 1), m);
}

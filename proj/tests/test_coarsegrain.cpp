#include <gtest/gtest.h>

#include <random>
#include <set>

#include "ergtower/coarsegrain.hpp"

using namespace ergtower;

namespace {

constexpr std::uint64_t kCap = std::uint64_t{1} << 20;

unsigned pack(unsigned controls, unsigned targets) { return controls | targets << 4; }

}  // namespace

TEST(CoarseGrain, GateTable) {
  const auto t = UsTable::standard();
  using U = UsTable;
  EXPECT_EQ(t[0], 0u);
  EXPECT_EQ(t[U::a | U::b | U::c | U::d], U::i | U::k);
  EXPECT_EQ(t[U::b | U::d], U::j | U::k);
  EXPECT_EQ(t[U::a | U::b], U::i);
  EXPECT_EQ(t[U::c | U::d], U::k);
  for (unsigned c = 0; c < 16; ++c) {
    if (std::popcount(c) & 1) EXPECT_EQ(t[c], 0u) << c;
  }
}

TEST(CoarseGrain, PairMasksFollowTheClockwiseRule) {
  // walking clockwise a -> i -> b -> j -> c -> k -> d -> l, the targets strictly
  // between the two set controls are flipped
  const auto t = UsTable::standard();
  const char order[] = {'a', 'i', 'b', 'j', 'c', 'k', 'd', 'l'};
  const auto bit = [](char ch) -> unsigned {
    switch (ch) {
      case 'a': case 'i': return 1;
      case 'b': case 'j': return 2;
      case 'c': case 'k': return 4;
      default: return 8;
    }
  };
  for (int p = 0; p < 8; p += 2) {
    for (int q = p + 2; q < 8; q += 2) {
      unsigned want = 0;
      for (int s = p + 1; s < q; s += 2) want |= bit(order[s]);
      EXPECT_EQ(t[bit(order[p]) | bit(order[q])], want) << order[p] << order[q];
    }
  }
}

TEST(CoarseGrain, GateIsAnInvolution) {
  EXPECT_TRUE(us_is_involution(UsTable::standard()));
  EXPECT_EQ(apply_us_local(UsTable::standard(), pack(UsTable::b | UsTable::d, 0)),
            pack(UsTable::b | UsTable::d, UsTable::j | UsTable::k));
  EXPECT_EQ(apply_us_local(UsTable::standard(), 0), 0u);
}

TEST(CoarseGrain, OddSizesAreRejected) {
  EXPECT_THROW(CoarseLayout(3), std::domain_error);
  EXPECT_THROW(run_coarse_graining(3), std::domain_error);
  EXPECT_THROW(CoarseLayout(1), std::domain_error);
}

TEST(CoarseGrain, CapIsCheckedFirst) {
  EXPECT_THROW(run_coarse_graining(9), resource_error);
  EXPECT_THROW(run_coarse_graining(4, 1000), resource_error);
}

TEST(CoarseGrain, LayoutCoversEveryLinkOnce) {
  for (int L : {2, 4, 6}) {
    const CoarseLayout lay(L);
    EXPECT_EQ(lay.squares().size() * 2, static_cast<std::size_t>(L * L));
    std::multiset<std::size_t> targets;
    for (const auto& s : lay.squares()) {
      for (auto t : lay.square_targets(s[0], s[1])) targets.insert(t);
    }
    EXPECT_EQ(targets.size(), lay.n_links());
    EXPECT_EQ(std::set<std::size_t>(targets.begin(), targets.end()).size(), lay.n_links());
  }
}

TEST(CoarseGrain, SublatticeLayerIsLinearAndPreservesConstraints) {
  const int L = 4;
  const auto g0 = toric_ground_support(L, kCap);
  const auto g1 = add_sublattice_qubits_and_u1(g0, L);
  EXPECT_EQ(g1.size(), g0.size());
  EXPECT_EQ(std::set<BitVector>(g1.begin(), g1.end()).size(), g1.size());
  for (const auto& c : g1) ASSERT_TRUE(refined_constraints_ok(c, L));
  EXPECT_EQ(add_sublattice_qubits_and_u1({BitVector(2 * L * L)}, L), std::vector<BitVector>{BitVector(3 * L * L)});

  std::mt19937 rng(6);
  for (int it = 0; it < 100; ++it) {
    const auto& a = g0[rng() % g0.size()];
    const auto& b = g0[rng() % g0.size()];
    const auto ua = add_sublattice_qubits_and_u1({a}, L)[0];
    const auto ub = add_sublattice_qubits_and_u1({b}, L)[0];
    EXPECT_EQ(add_sublattice_qubits_and_u1({a ^ b}, L)[0], ua ^ ub);
  }
}

TEST(CoarseGrain, SquareGateLayer) {
  for (int L : {2, 4}) {
    const auto g1 = add_sublattice_qubits_and_u1(toric_ground_support(L, kCap), L);
    const auto g2 = apply_u2(g1, L);
    EXPECT_EQ(g2.size(), g1.size());
    EXPECT_EQ(apply_u2(g2, L), g1);
    const BitVector zero(static_cast<std::size_t>(3 * L * L));
    EXPECT_EQ(apply_u2({zero}, L), std::vector<BitVector>{zero});
  }
}

TEST(CoarseGrain, OddControlPatternIsAHardError) {
  const CoarseLayout lay(4);
  BitVector cfg(lay.n_bits());
  const auto sq = lay.squares().front();
  cfg.set(lay.square_controls(sq[0], sq[1])[0]);
  EXPECT_THROW(apply_u2({cfg}, 4), construction_error);
}

TEST(CoarseGrain, FullPipeline) {
  const auto r2 = run_coarse_graining(2);
  EXPECT_TRUE(r2.ok());
  EXPECT_EQ(r2.n_configs, 8u);
  const auto r4 = run_coarse_graining(4);
  EXPECT_TRUE(r4.refined_ok);
  EXPECT_TRUE(r4.ghz_ok);
  EXPECT_TRUE(r4.coarse_equal_ok);
  EXPECT_EQ(r4.n_configs, 32768u);
  EXPECT_EQ(r4.coarse_size, 128u);
  EXPECT_EQ(r4.expected_size, 128u);
}

TEST(CoarseGrain, CoarseSupportSatisfiesCoarseVertexConstraints) {
  // every square becomes a vertex of the rotated lattice; its four corner
  // diagonals must carry an even number of flips
  const int L = 4;
  const CoarseLayout lay(L);
  const auto coarse = coarse_ground_support(L, kCap);
  EXPECT_EQ(coarse.size(), std::size_t{1} << (L * L / 2 - 1));
  for (const auto& c : coarse) {
    for (const auto& s : lay.squares()) {
      int parity = 0;
      for (auto v : lay.square_controls(s[0], s[1])) parity ^= c.get(v - lay.n_links());
      EXPECT_EQ(parity, 0);
    }
  }
}

TEST(CoarseGrain, CorruptedTableFailsAlignment) {
  auto t = UsTable::standard();
  std::swap(t.mask[UsTable::a | UsTable::b], t.mask[UsTable::b | UsTable::c]);
  EXPECT_TRUE(us_is_involution(t));
  const auto r = run_coarse_graining(4, kCap, t);
  EXPECT_FALSE(r.ghz_ok);
  EXPECT_GT(r.ghz_failures, 0u);
}

#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ergtower/errors.hpp"
#include "ergtower/gf2.hpp"
#include "ergtower/groundstate.hpp"
#include "ergtower/lattice.hpp"
#include "ergtower/models.hpp"

// Vertex-splitting coarse graining of the 2D toric code. Vertices are split along a
// checkerboard, every vertex gets an extra qubit (a diagonal link of the refined
// lattice), and a nonlinear gate per square collapses the square's four links into
// a GHZ pair so that the diagonals alone carry a toric code on a rotated lattice.
//
// Configuration layout on an L x L torus: 2L^2 link bits in lexicographic link
// order, then L^2 vertex bits at 2L^2 + x*L + y.

namespace ergtower {

/// Target flips of one square gate, indexed by the control pattern a | b<<1 | c<<2 | d<<3.
/// Mask bits: i = 1, j = 2, k = 4, l = 8. Controls a, b, c, d are the diagonals at the
/// top-left, top-right, bottom-right and bottom-left corners; targets i, j, k, l are the
/// top, right, bottom and left links, so going clockwise i sits between a and b.
struct UsTable {
  std::array<std::uint8_t, 16> mask{};

  static constexpr unsigned a = 1, b = 2, c = 4, d = 8;
  static constexpr unsigned i = 1, j = 2, k = 4, l = 8;

  /// Two set controls flip the targets between them clockwise from the earlier
  /// letter; four set controls flip i and k; no set control flips nothing.
  static UsTable standard() {
    UsTable t;
    t.mask[a | b] = i;
    t.mask[a | c] = i | j;
    t.mask[a | d] = i | j | k;
    t.mask[b | c] = j;
    t.mask[b | d] = j | k;
    t.mask[c | d] = k;
    t.mask[a | b | c | d] = i | k;
    return t;
  }

  std::uint8_t operator[](unsigned controls) const { return mask.at(controls); }
};

/// The gate on 8 qubits: low nibble controls (a,b,c,d), high nibble targets (i,j,k,l).
inline unsigned apply_us_local(const UsTable& t, unsigned state) {
  const unsigned controls = state & 0xFu;
  return state ^ (static_cast<unsigned>(t[controls]) << 4);
}

inline bool us_is_involution(const UsTable& t) {
  for (unsigned s = 0; s < 256; ++s) {
    if (apply_us_local(t, apply_us_local(t, s)) != s) return false;
  }
  return true;
}

/// Index arithmetic for the refined lattice.
class CoarseLayout {
 public:
  explicit CoarseLayout(int L) : L_(L), links_(LatticeSpec{{L, L}, Boundary::periodic}, 1) {
    if (L < 2) throw std::domain_error("L must be at least 2");
    if (L % 2 != 0) {
      throw std::domain_error("the checkerboard vertex split needs an even L on the torus, got " + std::to_string(L) +
                              " (" + std::to_string(2 * L * L) + " links do not split into 4-link squares)");
    }
  }

  int L() const noexcept { return L_; }
  std::size_t n_links() const noexcept { return links_.size(); }
  std::size_t n_bits() const noexcept { return links_.size() + static_cast<std::size_t>(L_ * L_); }
  const QubitIndexMap& links() const noexcept { return links_; }

  int mod(int v) const noexcept { return floor_mod(v, L_); }

  /// Link centers in doubled coordinates; the vertex (x,y) sits at (2x, 2y).
  std::size_t link(int dx2, int dy2) const { return links_.index(CubeCoord{dx2, dy2}); }
  std::size_t up(int x, int y) const { return link(2 * x, 2 * y + 1); }
  std::size_t down(int x, int y) const { return link(2 * x, 2 * y - 1); }
  std::size_t left(int x, int y) const { return link(2 * x - 1, 2 * y); }
  std::size_t right(int x, int y) const { return link(2 * x + 1, 2 * y); }
  std::size_t vertex(int x, int y) const {
    return links_.size() + static_cast<std::size_t>(mod(x) * L_ + mod(y));
  }

  static bool in_a(int x, int y) noexcept { return ((x + y) & 1) == 0; }

  /// Squares are the plaquettes whose top-left corner is in sublattice A; each is named
  /// by its lower-left corner.
  std::vector<std::array<int, 2>> squares() const {
    std::vector<std::array<int, 2>> out;
    for (int x = 0; x < L_; ++x) {
      for (int y = 0; y < L_; ++y) {
        if (in_a(x, y + 1)) out.push_back({x, y});
      }
    }
    return out;
  }

  /// Octagons: the remaining plaquettes, again named by lower-left corner.
  std::vector<std::array<int, 2>> octagons() const {
    std::vector<std::array<int, 2>> out;
    for (int x = 0; x < L_; ++x) {
      for (int y = 0; y < L_; ++y) {
        if (!in_a(x, y + 1)) out.push_back({x, y});
      }
    }
    return out;
  }

  // targets i, j, k, l of the square with lower-left corner (x, y)
  std::array<std::size_t, 4> square_targets(int x, int y) const {
    return {right(x, y + 1), up(x + 1, y), right(x, y), up(x, y)};
  }
  // controls a, b, c, d: the corner diagonals TL, TR, BR, BL
  std::array<std::size_t, 4> square_controls(int x, int y) const {
    return {vertex(x, y + 1), vertex(x + 1, y + 1), vertex(x + 1, y), vertex(x, y)};
  }
  std::array<std::size_t, 4> octagon_diagonals(int x, int y) const {
    return {vertex(x, y + 1), vertex(x + 1, y + 1), vertex(x + 1, y), vertex(x, y)};
  }

 private:
  int L_;
  QubitIndexMap links_;
};

/// Support of the toric-code ground state on the L x L torus, sorted.
inline std::vector<BitVector> toric_ground_support(int L, std::uint64_t max_configs) {
  const auto model = build_model(ModelSpec{0, 1, 2, 2}, LatticeSpec{{L, L}, Boundary::periodic});
  return enumerate_configs(config_group(model), max_configs);
}

/// Appends one bit per vertex: up XOR left on sublattice A, up XOR right on B.
inline std::vector<BitVector> add_sublattice_qubits_and_u1(const std::vector<BitVector>& g, int L) {
  const CoarseLayout lay(L);
  std::vector<BitVector> out;
  out.reserve(g.size());
  for (const auto& cfg : g) {
    if (cfg.size() != lay.n_links()) throw std::domain_error("configuration is not on the L x L link set");
    BitVector ext(lay.n_bits());
    for (auto q : cfg.ones()) ext.set(q);
    for (int x = 0; x < L; ++x) {
      for (int y = 0; y < L; ++y) {
        const bool side = CoarseLayout::in_a(x, y) ? cfg.get(lay.left(x, y)) : cfg.get(lay.right(x, y));
        ext.set(lay.vertex(x, y), cfg.get(lay.up(x, y)) != side);
      }
    }
    out.push_back(std::move(ext));
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Even parity at both halves of every split vertex.
inline bool refined_constraints_ok(const BitVector& cfg, int L) {
  const CoarseLayout lay(L);
  for (int x = 0; x < L; ++x) {
    for (int y = 0; y < L; ++y) {
      const bool v = cfg.get(lay.vertex(x, y));
      const bool u = cfg.get(lay.up(x, y));
      const bool dn = cfg.get(lay.down(x, y));
      const bool lf = cfg.get(lay.left(x, y));
      const bool rt = cfg.get(lay.right(x, y));
      const bool first = CoarseLayout::in_a(x, y) ? (u ^ lf ^ v) : (u ^ rt ^ v);
      const bool second = CoarseLayout::in_a(x, y) ? (dn ^ rt ^ v) : (dn ^ lf ^ v);
      if (first || second) return false;
    }
  }
  return true;
}

/// Applies the square gate on every square. Squares own disjoint target links and
/// the controls are never targets, so the order does not matter.
inline std::vector<BitVector> apply_u2(const std::vector<BitVector>& g, int L,
                                       const UsTable& table = UsTable::standard()) {
  const CoarseLayout lay(L);
  const auto squares = lay.squares();
  std::vector<int> owner(lay.n_bits(), -1);
  for (std::size_t s = 0; s < squares.size(); ++s) {
    for (auto t : lay.square_targets(squares[s][0], squares[s][1])) {
      if (owner[t] != -1) throw construction_error("two squares share a target link");
      owner[t] = static_cast<int>(s);
    }
  }
  std::vector<BitVector> out;
  out.reserve(g.size());
  for (auto cfg : g) {
    if (cfg.size() != lay.n_bits()) throw std::domain_error("configuration is not on the refined lattice");
    for (const auto& sq : squares) {
      const auto ctl = lay.square_controls(sq[0], sq[1]);
      unsigned pattern = 0;
      for (unsigned bit = 0; bit < 4; ++bit) pattern |= static_cast<unsigned>(cfg.get(ctl[bit])) << bit;
      if (std::popcount(pattern) & 1) {
        throw construction_error("odd control pattern reached at square (" + std::to_string(sq[0]) + "," +
                                 std::to_string(sq[1]) + ")");
      }
      const auto tgt = lay.square_targets(sq[0], sq[1]);
      const unsigned m = table[pattern];
      for (unsigned bit = 0; bit < 4; ++bit) {
        if (m >> bit & 1u) cfg.flip(tgt[bit]);
      }
    }
    out.push_back(std::move(cfg));
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct CoarseReport {
  int L = 0;
  std::size_t n_configs = 0;
  // Closed strings on the refined lattice after the CNOT layer; only the full pipeline sets this.
  bool refined_ok = true;
  bool ghz_ok = false;
  std::size_t ghz_failures = 0;
  bool coarse_equal_ok = false;
  std::size_t coarse_size = 0;
  std::size_t expected_size = 0;

  bool ok() const noexcept { return refined_ok && ghz_ok && coarse_equal_ok; }
};

/// The coarse toric code's configuration group on the diagonal links: the span of the
/// octagon flip patterns, as bitstrings over the L^2 vertex bits.
inline std::vector<BitVector> coarse_ground_support(int L, std::uint64_t max_configs) {
  const CoarseLayout lay(L);
  ConfigGroup g;
  g.n_qubits = static_cast<std::size_t>(L * L);
  g.offset = BitVector(g.n_qubits);
  BitMatrix flips(g.n_qubits);
  for (const auto& o : lay.octagons()) {
    BitVector v(g.n_qubits);
    for (auto q : lay.octagon_diagonals(o[0], o[1])) v.flip(q - lay.n_links());
    flips.push_row(std::move(v));
  }
  const auto reduced = rref(flips);
  g.basis.assign(reduced.row_span().begin(), reduced.row_span().end());
  return enumerate_configs(g, max_configs);
}

/// (i) every square's four links read 0000 or 1111; (ii) the diagonal bits, as a set,
/// equal the coarse toric code's configuration group.
inline CoarseReport verify_coarse_structure(const std::vector<BitVector>& g, int L,
                                            std::uint64_t max_configs = std::uint64_t{1} << 20) {
  const CoarseLayout lay(L);
  CoarseReport r;
  r.L = L;
  r.n_configs = g.size();
  const auto squares = lay.squares();
  std::set<BitVector> projected;
  for (const auto& cfg : g) {
    bool aligned = true;
    for (const auto& sq : squares) {
      const auto t = lay.square_targets(sq[0], sq[1]);
      const bool first = cfg.get(t[0]);
      for (auto q : t) aligned = aligned && cfg.get(q) == first;
    }
    if (!aligned) ++r.ghz_failures;
    BitVector diag(static_cast<std::size_t>(L * L));
    for (std::size_t v = 0; v < diag.size(); ++v) diag.set(v, cfg.get(lay.n_links() + v));
    projected.insert(std::move(diag));
  }
  r.ghz_ok = r.ghz_failures == 0 && !g.empty();
  const auto expected = coarse_ground_support(L, max_configs);
  r.coarse_size = projected.size();
  r.expected_size = expected.size();
  r.coarse_equal_ok = std::equal(projected.begin(), projected.end(), expected.begin(), expected.end());
  return r;
}

/// Full pipeline from the toric-code support. Checks the enumeration cap before the
/// parity of L so that oversized requests fail as resource errors.
inline CoarseReport run_coarse_graining(int L, std::uint64_t max_configs = std::uint64_t{1} << 20,
                                        const UsTable& table = UsTable::standard()) {
  if (L < 2) throw std::domain_error("L must be at least 2");
  const long long k = static_cast<long long>(L) * L - 1;
  if (k >= 63 || (std::uint64_t{1} << k) > max_configs) {
    throw resource_error("coarse graining at L=" + std::to_string(L) + " needs 2^" + std::to_string(k) +
                         " configurations, cap is " + std::to_string(max_configs));
  }
  const CoarseLayout lay(L);
  const auto g0 = toric_ground_support(L, max_configs);
  const auto g1 = add_sublattice_qubits_and_u1(g0, L);
  const auto g2 = apply_u2(g1, L, table);
  auto r = verify_coarse_structure(g2, L, max_configs);
  r.refined_ok = std::all_of(g1.begin(), g1.end(), [&](const BitVector& c) { return refined_constraints_ok(c, L); });
  return r;
}

}  // namespace ergtower

#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ergtower/errors.hpp"
#include "ergtower/gf2.hpp"
#include "ergtower/models.hpp"

namespace ergtower {

/// Support of the trivial-sector ground state: offset XOR span(basis).
struct ConfigGroup {
  std::size_t n_qubits = 0;
  BitVector offset;
  std::vector<BitVector> basis;

  std::size_t dimension() const noexcept { return basis.size(); }
};

/// Reference configuration |0...0> plus every pattern reachable by A-term flips.
inline ConfigGroup config_group(const StabilizerModel& model) {
  const std::size_t n = model.n_qubits();
  BitMatrix flips(n);
  for (const auto& g : model.generators) {
    if (g.pauli.z().none() && g.pauli.x().any()) flips.push_row(g.pauli.x());
  }
  const BitMatrix reduced = rref(flips);
  ConfigGroup g;
  g.n_qubits = n;
  g.offset = BitVector(n);
  g.basis.assign(reduced.row_span().begin(), reduced.row_span().end());
  return g;
}

/// True when every Z-type generator sees an even number of flipped qubits.
inline bool check_b_constraints(const BitVector& config, const StabilizerModel& model) {
  if (config.size() != model.n_qubits()) throw std::domain_error("configuration length does not match qubit count");
  for (const auto& g : model.generators) {
    if (g.pauli.x().none() && g.pauli.z().any() && g.pauli.z().dot(config)) return false;
  }
  return true;
}

/// Materializes the coset in Gray-code order, then sorts it.
inline std::vector<BitVector> enumerate_configs(const ConfigGroup& g, std::uint64_t cap) {
  const std::size_t k = g.basis.size();
  if (k >= 63 || (std::uint64_t{1} << k) > cap) {
    throw resource_error("configuration group has 2^" + std::to_string(k) + " elements, cap is " +
                         std::to_string(cap));
  }
  const std::uint64_t count = std::uint64_t{1} << k;
  std::vector<BitVector> out;
  out.reserve(count);
  BitVector cur = g.offset;
  out.push_back(cur);
  for (std::uint64_t i = 1; i < count; ++i) {
    cur ^= g.basis[static_cast<std::size_t>(std::countr_zero(i))];
    out.push_back(cur);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace ergtower

#pragma once

#include <algorithm>
#include <cstddef>
#include <iterator>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ergtower/gf2.hpp"
#include "ergtower/lattice.hpp"

namespace ergtower {

/// sign * prod_i X_i^{x_i} Z_i^{z_i}. Only the symplectic part and a sign are
/// tracked; every string produced here is Hermitian with sign +1.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(std::size_t n) : x_(n), z_(n) {}
  PauliString(BitVector x, BitVector z, int sign = 1) : x_(std::move(x)), z_(std::move(z)), sign_(sign) {
    if (x_.size() != z_.size()) throw std::domain_error("x and z parts differ in length");
    if (sign != 1 && sign != -1) throw std::domain_error("sign must be +1 or -1");
  }

  static PauliString x_on(std::size_t n, const std::vector<std::size_t>& qubits) {
    PauliString p(n);
    for (auto q : qubits) p.x_.flip(q);
    return p;
  }
  static PauliString z_on(std::size_t n, const std::vector<std::size_t>& qubits) {
    PauliString p(n);
    for (auto q : qubits) p.z_.flip(q);
    return p;
  }

  std::size_t size() const noexcept { return x_.size(); }
  const BitVector& x() const noexcept { return x_; }
  const BitVector& z() const noexcept { return z_; }
  BitVector& x() noexcept { return x_; }
  BitVector& z() noexcept { return z_; }
  int sign() const noexcept { return sign_; }

  bool is_identity() const noexcept { return x_.none() && z_.none(); }
  bool is_x_type() const noexcept { return z_.none() && x_.any(); }
  bool is_z_type() const noexcept { return x_.none() && z_.any(); }

  /// Number of qubits acted on nontrivially.
  std::size_t weight() const {
    BitVector support = x_;
    for (std::size_t w = 0; w < support.word_count(); ++w) support.words()[w] |= z_.words()[w];
    return support.popcount();
  }

  std::vector<std::size_t> support() const {
    std::vector<std::size_t> out = x_.ones();
    for (auto q : z_.ones()) out.push_back(q);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  /// (x | z) over 2N columns.
  BitVector symplectic() const {
    BitVector v(2 * size());
    for (auto q : x_.ones()) v.set(q);
    for (auto q : z_.ones()) v.set(size() + q);
    return v;
  }

  friend bool operator==(const PauliString&, const PauliString&) = default;

 private:
  BitVector x_;
  BitVector z_;
  int sign_ = 1;
};

inline void require_same_size(const PauliString& p, const PauliString& q) {
  if (p.size() != q.size()) throw std::domain_error("Pauli strings act on different qubit counts");
}

inline bool commutes(const PauliString& p, const PauliString& q) {
  require_same_size(p, q);
  return p.x().dot(q.z()) == p.z().dot(q.x());
}

/// Product p*q. Commuting Hermitian strings give a Hermitian string; the sign
/// picks up (-1)^{|z_p & x_q|} from reordering X^{x_q} past Z^{z_p}.
inline PauliString multiply(const PauliString& p, const PauliString& q) {
  if (!commutes(p, q)) throw std::domain_error("product of anticommuting Pauli strings is not Hermitian");
  const int phase = p.z().dot(q.x()) ? -1 : 1;
  return PauliString(p.x() ^ q.x(), p.z() ^ q.z(), p.sign() * q.sign() * phase);
}

struct Cnot {
  std::size_t control = 0;
  std::size_t target = 0;

  friend bool operator==(const Cnot&, const Cnot&) = default;
  friend auto operator<=>(const Cnot&, const Cnot&) = default;
};

class CnotCircuit {
 public:
  CnotCircuit() = default;
  explicit CnotCircuit(std::vector<Cnot> gates) {
    for (const auto& g : gates) push(g);
  }

  void push(Cnot g) {
    if (g.control == g.target) throw std::domain_error("CNOT control equals target");
    gates_.push_back(g);
  }
  void push(std::size_t control, std::size_t target) { push(Cnot{control, target}); }

  const std::vector<Cnot>& gates() const noexcept { return gates_; }
  std::size_t size() const noexcept { return gates_.size(); }
  bool empty() const noexcept { return gates_.empty(); }

  std::size_t max_qubit() const noexcept {
    std::size_t m = 0;
    for (const auto& g : gates_) m = std::max({m, g.control, g.target});
    return m;
  }

  /// True when no qubit is both a control and a target, so all gates commute
  /// and the layer is order independent.
  bool is_commuting_layer() const {
    std::vector<std::size_t> controls;
    std::vector<std::size_t> targets;
    for (const auto& g : gates_) {
      controls.push_back(g.control);
      targets.push_back(g.target);
    }
    std::sort(controls.begin(), controls.end());
    std::sort(targets.begin(), targets.end());
    std::vector<std::size_t> both;
    std::set_intersection(controls.begin(), controls.end(), targets.begin(), targets.end(),
                          std::back_inserter(both));
    return both.empty();
  }

  /// Sorts gates and removes duplicates (set semantics).
  void canonicalize() {
    std::sort(gates_.begin(), gates_.end());
    gates_.erase(std::unique(gates_.begin(), gates_.end()), gates_.end());
  }

  friend bool operator==(const CnotCircuit&, const CnotCircuit&) = default;

 private:
  std::vector<Cnot> gates_;
};

/// CNOT p CNOT: X on the control spreads to the target, Z on the target spreads to the control.
inline PauliString cnot_conjugate(PauliString p, std::size_t control, std::size_t target) {
  if (control == target) throw std::domain_error("CNOT control equals target");
  if (control >= p.size() || target >= p.size()) throw std::out_of_range("CNOT qubit index out of range");
  if (p.x().get(control)) p.x().flip(target);
  if (p.z().get(target)) p.z().flip(control);
  return p;
}

inline PauliString circuit_conjugate(const CnotCircuit& c, PauliString p) {
  for (const auto& g : c.gates()) p = cnot_conjugate(std::move(p), g.control, g.target);
  if (p.sign() != 1) throw std::logic_error("CNOT conjugation produced a negative sign");
  return p;
}

inline std::vector<PauliString> conjugate_group(const CnotCircuit& c, const std::vector<PauliString>& group) {
  std::vector<PauliString> out;
  out.reserve(group.size());
  for (const auto& p : group) out.push_back(circuit_conjugate(c, p));
  return out;
}

/// Sorted list of X@(coords) and Z@(coords) atoms, X atoms first.
inline std::string to_text(const PauliString& p, const QubitIndexMap& qubits) {
  std::vector<std::pair<char, CubeCoord>> atoms;
  for (auto q : p.x().ones()) atoms.emplace_back('X', qubits.coord(q));
  for (auto q : p.z().ones()) atoms.emplace_back('Z', qubits.coord(q));
  std::sort(atoms.begin(), atoms.end());
  std::string s = p.sign() < 0 ? "-" : "";
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i) s += ' ';
    s += atoms[i].first;
    s += '@';
    s += format_coord(atoms[i].second);
  }
  return s.empty() ? "I" : s;
}

/// Stacks the (x|z) rows of a generator list.
inline BitMatrix symplectic_matrix(const std::vector<PauliString>& gens, std::size_t n_qubits) {
  BitMatrix m(2 * n_qubits);
  for (const auto& g : gens) {
    if (g.size() != n_qubits) throw std::domain_error("generator length does not match qubit count");
    m.push_row(g.symplectic());
  }
  return m;
}

}  // namespace ergtower

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ergtower/errors.hpp"
#include "ergtower/gf2.hpp"
#include "ergtower/lattice.hpp"
#include "ergtower/pauli.hpp"

namespace ergtower {

struct ModelSpec {
  int dn = 0;
  int ds = 1;
  int dl = 2;
  int D = 2;

  void validate() const {
    if (D < 2) throw std::domain_error("model dimension must be at least 2");
    if (!(0 <= dn && dn < ds && ds < dl && dl <= D)) {
      throw std::domain_error("model spec must satisfy 0 <= dn < ds < dl <= D");
    }
  }

  /// True for the [d,d+1,d+2,D] family that the ERG tools handle.
  bool is_chain() const noexcept { return ds == dn + 1 && dl == dn + 2; }
  bool is_toric() const noexcept { return is_chain() && dl == D; }

  std::string to_string() const {
    return "[" + std::to_string(dn) + "," + std::to_string(ds) + "," + std::to_string(dl) + "," +
           std::to_string(D) + "]";
  }

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

enum class Tag { a, b, zz, inserted_a, inserted_b, a_prime, single_x, single_z };

inline const char* tag_name(Tag t) {
  switch (t) {
    case Tag::a: return "A";
    case Tag::b: return "B";
    case Tag::zz: return "ZZ";
    case Tag::inserted_a: return "inserted_A";
    case Tag::inserted_b: return "inserted_B";
    case Tag::a_prime: return "A_prime";
    case Tag::single_x: return "X";
    case Tag::single_z: return "Z";
  }
  return "?";
}

struct Generator {
  PauliString pauli;
  Tag tag = Tag::a;
  CubeCoord center;
  // Bitmask of subsystem axes for B terms, 0 otherwise.
  unsigned subsystem = 0;
};

struct StabilizerModel {
  ModelSpec spec;
  LatticeSpec lat;
  QubitIndexMap qubits;
  std::vector<Generator> generators;
  bool dual = false;

  std::size_t n_qubits() const noexcept { return qubits.size(); }

  std::vector<PauliString> paulis() const {
    std::vector<PauliString> out;
    out.reserve(generators.size());
    for (const auto& g : generators) out.push_back(g.pauli);
    return out;
  }

  BitMatrix symplectic() const { return symplectic_matrix(paulis(), n_qubits()); }
};

/// Number of d_s-cubes, i.e. the qubit count, without building anything.
inline long long count_qubits(const ModelSpec& spec, const LatticeSpec& lat) {
  long long binom = 1;
  for (int i = 0; i < spec.ds; ++i) binom = binom * (spec.D - i) / (i + 1);
  if (lat.periodic()) return binom * lat.vertex_count();
  return static_cast<long long>(enumerate_cubes(lat, spec.ds).size());
}

inline void check_qubit_cap(const ModelSpec& spec, const LatticeSpec& lat, long long max_qubits) {
  const long long n = count_qubits(spec, lat);
  if (n > max_qubits) {
    throw resource_error("model needs " + std::to_string(n) + " qubits, cap is " + std::to_string(max_qubits));
  }
}

namespace detail {

// All axis subsets of size k (as bitmasks), in lexicographic order of their sorted index lists.
inline std::vector<unsigned> axis_subsets(int D, int k) {
  std::vector<unsigned> out;
  std::vector<int> idx(static_cast<std::size_t>(k));
  auto recurse = [&](auto&& self, int pos, int start) -> void {
    if (pos == k) {
      unsigned m = 0;
      for (int i : idx) m |= 1u << i;
      out.push_back(m);
      return;
    }
    for (int a = start; a < D; ++a) {
      idx[static_cast<std::size_t>(pos)] = a;
      self(self, pos + 1, a + 1);
    }
  };
  recurse(recurse, 0, 0);
  return out;
}

// Nearest m-cubes to c, or nullopt under open bc when any of them would fall off the lattice.
inline std::optional<std::vector<CubeCoord>> full_support(const CubeCoord& c, int m, const LatticeSpec& lat) {
  if (!lat.periodic()) {
    for (const auto& cand : nearest_candidates(c, m)) {
      if (!in_lattice(cand, lat)) return std::nullopt;
    }
  }
  return nearest_cubes(c, m, lat);
}

inline std::vector<std::size_t> indices_of(const std::vector<CubeCoord>& cubes, const QubitIndexMap& q) {
  std::vector<std::size_t> out;
  out.reserve(cubes.size());
  for (const auto& c : cubes) out.push_back(q.index(c));
  return out;
}

}  // namespace detail

/// The Hamiltonian terms: one X-type A term per D-cube acting on its nearest d_s-cubes,
/// and one Z-type B term per (d_n-cube, d_l-dimensional axis subsystem through it)
/// acting on the nearest d_s-cubes that lie inside that subsystem.
inline StabilizerModel build_model(const ModelSpec& spec, const LatticeSpec& lat) {
  spec.validate();
  lat.validate();
  if (lat.dimension() != spec.D) throw std::domain_error("lattice dimension does not match model dimension");

  StabilizerModel m;
  m.spec = spec;
  m.lat = lat;
  m.qubits = QubitIndexMap(lat, spec.ds);
  const std::size_t n = m.qubits.size();

  for (const auto& cube : enumerate_cubes(lat, spec.D)) {
    auto support = detail::full_support(cube, spec.ds, lat);
    if (!support) continue;
    m.generators.push_back({PauliString::x_on(n, detail::indices_of(*support, m.qubits)), Tag::a, cube, 0});
  }

  const auto subsystems = detail::axis_subsets(spec.D, spec.dl);
  for (const auto& site : enumerate_cubes(lat, spec.dn)) {
    auto near = detail::full_support(site, spec.ds, lat);
    if (!near) continue;
    const unsigned half = site.half_axes();
    for (unsigned sub : subsystems) {
      if ((sub & half) != half) continue;
      std::vector<CubeCoord> inside;
      for (const auto& c : *near) {
        bool ok = true;
        for (int ax = 0; ax < spec.D && ok; ++ax) {
          if (!(sub >> ax & 1u) && c[static_cast<std::size_t>(ax)] != site[static_cast<std::size_t>(ax)]) ok = false;
        }
        if (ok) inside.push_back(c);
      }
      if (inside.empty()) continue;
      m.generators.push_back(
          {PauliString::z_on(n, detail::indices_of(inside, m.qubits)), Tag::b, site, spec.dl == spec.D ? 0u : sub});
    }
  }
  return m;
}

/// Half-shift duality of the [D-2,D-1,D,D] family: every cube moves by (1/2,...,1/2),
/// so qubits land on links, A terms on vertices and B terms on plaquettes. Applying it
/// to a dual model shifts once more and returns to the original picture, translated by one unit.
inline StabilizerModel dualize(const StabilizerModel& model) {
  if (!model.spec.is_toric()) throw std::domain_error("duality needs a [D-2,D-1,D,D] model");
  if (!model.lat.periodic()) throw std::domain_error("duality is defined on the torus");
  const auto shift = [&](CubeCoord c) {
    for (auto& v : c.x) ++v;
    return wrap(std::move(c), model.lat);
  };

  StabilizerModel out;
  out.spec = model.spec;
  out.lat = model.lat;
  out.dual = !model.dual;
  out.qubits = QubitIndexMap(model.lat, model.lat.dimension() - model.qubits.cube_dimension());
  const std::size_t n = out.qubits.size();

  std::vector<std::size_t> relabel(model.n_qubits());
  for (std::size_t q = 0; q < model.n_qubits(); ++q) relabel[q] = out.qubits.index(shift(model.qubits.coord(q)));

  for (const auto& g : model.generators) {
    PauliString p(n);
    for (auto q : g.pauli.x().ones()) p.x().flip(relabel[q]);
    for (auto q : g.pauli.z().ones()) p.z().flip(relabel[q]);
    out.generators.push_back({std::move(p), g.tag, shift(g.center), g.subsystem});
  }
  return out;
}

/// N - rank of the stacked (x|z) generator matrix. CSS models split into the
/// X and Z blocks, which gives the same rank with half the columns.
inline long long log2_gsd(const StabilizerModel& model) {
  const std::size_t n = model.n_qubits();
  bool css = true;
  BitMatrix xs(n);
  BitMatrix zs(n);
  for (const auto& g : model.generators) {
    if (g.pauli.x().any() && g.pauli.z().any()) {
      css = false;
      break;
    }
    if (g.pauli.x().any()) xs.push_row(g.pauli.x());
    if (g.pauli.z().any()) zs.push_row(g.pauli.z());
  }
  const std::size_t r = css ? rank(xs) + rank(zs) : rank(model.symplectic());
  return static_cast<long long>(n) - static_cast<long long>(r);
}

inline long long log2_gsd(const ModelSpec& spec, const LatticeSpec& lat) { return log2_gsd(build_model(spec, lat)); }

// ---------------------------------------------------------------------------
// text forms

inline ModelSpec parse_model_spec(std::string_view text, std::size_t base_offset = 0) {
  std::size_t pos = 0;
  if (text.empty() || text[0] != '[') throw parse_error("model spec must start with '['", base_offset);
  ++pos;
  int v[4];
  for (int i = 0; i < 4; ++i) {
    while (pos < text.size() && text[pos] == ' ') ++pos;
    v[i] = detail::parse_int(text, pos, base_offset);
    while (pos < text.size() && text[pos] == ' ') ++pos;
    const char want = i == 3 ? ']' : ',';
    if (pos >= text.size() || text[pos] != want) {
      throw parse_error(std::string("expected '") + want + "'", base_offset + pos);
    }
    ++pos;
  }
  if (pos != text.size()) throw parse_error("trailing characters after model spec", base_offset + pos);
  ModelSpec spec{v[0], v[1], v[2], v[3]};
  try {
    spec.validate();
  } catch (const std::domain_error& e) {
    throw parse_error(e.what(), base_offset);
  }
  return spec;
}

struct ModelInstance {
  ModelSpec spec;
  LatticeSpec lat;
};

/// Parses "[dn,ds,dl,D]@<L1>x...x<LD>:<pbc|obc>".
inline ModelInstance parse_model_instance(std::string_view text) {
  const auto at = text.find('@');
  if (at == std::string_view::npos) throw parse_error("expected '@' between model spec and lattice", text.size());
  ModelInstance inst{parse_model_spec(text.substr(0, at)), parse_lattice_spec(text.substr(at + 1), at + 1)};
  if (inst.lat.dimension() != inst.spec.D) {
    throw parse_error("lattice has " + std::to_string(inst.lat.dimension()) + " axes but the model needs " +
                          std::to_string(inst.spec.D),
                      at + 1);
  }
  return inst;
}

// ---------------------------------------------------------------------------
// scan and polynomial fit

struct GsdPoint {
  std::vector<int> dims;
  std::size_t n_qubits = 0;
  std::size_t rank = 0;
  long long log2_gsd = 0;
};

struct GsdFit {
  ModelSpec spec;
  std::vector<GsdPoint> points;
  // Multilinear monomials: {} is the constant, {i} is L_i, {i,j} is L_i L_j.
  std::vector<std::vector<int>> monomials;
  std::vector<long long> coefficients;
  std::vector<long long> residuals;
  bool exact = false;
  // Set when all L_i share one coefficient and all L_i L_j share another.
  bool symmetric = false;
  long long c2 = 0;
  long long c1 = 0;
  long long c0 = 0;
};

inline std::string monomial_name(const std::vector<int>& mono) {
  if (mono.empty()) return "1";
  std::string s;
  for (std::size_t i = 0; i < mono.size(); ++i) {
    if (i) s += '*';
    s += "L" + std::to_string(mono[i] + 1);
  }
  return s;
}

inline GsdPoint gsd_point(const ModelSpec& spec, const std::vector<int>& dims) {
  const auto model = build_model(spec, LatticeSpec{dims, Boundary::periodic});
  GsdPoint p;
  p.dims = dims;
  p.n_qubits = model.n_qubits();
  p.log2_gsd = log2_gsd(model);
  p.rank = p.n_qubits - static_cast<std::size_t>(p.log2_gsd);
  return p;
}

/// Every tuple in values^D, lexicographic.
inline std::vector<std::vector<int>> size_grid(int D, const std::vector<int>& values) {
  std::vector<std::vector<int>> out{{}};
  for (int axis = 0; axis < D; ++axis) {
    std::vector<std::vector<int>> next;
    for (const auto& prefix : out) {
      for (int v : values) {
        auto t = prefix;
        t.push_back(v);
        next.push_back(std::move(t));
      }
    }
    out = std::move(next);
  }
  return out;
}

/// Fits log2 GSD to a multilinear polynomial of degree <= max_degree (at most 2) in the L_i.
/// Coefficients come from a least-squares solve, are rounded to integers, and the
/// residuals are then recomputed exactly in integer arithmetic.
inline GsdFit gsd_scan_and_fit(const ModelSpec& spec, std::vector<std::vector<int>> sizes, int max_degree = 2,
                               long long max_qubits = -1) {
  spec.validate();
  if (max_degree < 0 || max_degree > 2) throw std::domain_error("fit degree must be 0, 1 or 2");
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());

  GsdFit fit;
  fit.spec = spec;
  fit.monomials.push_back({});
  if (max_degree >= 1) {
    for (int i = 0; i < spec.D; ++i) fit.monomials.push_back({i});
  }
  if (max_degree >= 2) {
    for (int i = 0; i < spec.D; ++i) {
      for (int j = i + 1; j < spec.D; ++j) fit.monomials.push_back({i, j});
    }
  }
  const auto n_mono = static_cast<Eigen::Index>(fit.monomials.size());
  if (static_cast<Eigen::Index>(sizes.size()) < n_mono) {
    throw std::domain_error("fit is underdetermined: " + std::to_string(sizes.size()) + " sizes for " +
                            std::to_string(n_mono) + " coefficients");
  }

  for (const auto& dims : sizes) {
    if (static_cast<int>(dims.size()) != spec.D) throw std::domain_error("size tuple has the wrong dimension");
    if (max_qubits >= 0) check_qubit_cap(spec, LatticeSpec{dims, Boundary::periodic}, max_qubits);
    fit.points.push_back(gsd_point(spec, dims));
  }

  const auto monomial_value = [](const std::vector<int>& mono, const std::vector<int>& dims) {
    long long v = 1;
    for (int i : mono) v *= dims[static_cast<std::size_t>(i)];
    return v;
  };

  const auto n_pts = static_cast<Eigen::Index>(fit.points.size());
  Eigen::MatrixXd a(n_pts, n_mono);
  Eigen::VectorXd y(n_pts);
  for (Eigen::Index r = 0; r < n_pts; ++r) {
    const auto& pt = fit.points[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < n_mono; ++c) {
      a(r, c) = static_cast<double>(monomial_value(fit.monomials[static_cast<std::size_t>(c)], pt.dims));
    }
    y(r) = static_cast<double>(pt.log2_gsd);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < n_mono) {
    throw std::domain_error("fit is underdetermined: the sizes do not separate all monomials");
  }
  const Eigen::VectorXd sol = qr.solve(y);

  for (Eigen::Index c = 0; c < n_mono; ++c) fit.coefficients.push_back(std::llround(sol(c)));
  fit.exact = true;
  for (const auto& pt : fit.points) {
    long long pred = 0;
    for (std::size_t c = 0; c < fit.monomials.size(); ++c) pred += fit.coefficients[c] * monomial_value(fit.monomials[c], pt.dims);
    fit.residuals.push_back(pt.log2_gsd - pred);
    if (fit.residuals.back() != 0) fit.exact = false;
  }

  std::optional<long long> c1;
  std::optional<long long> c2;
  fit.symmetric = true;
  for (std::size_t c = 0; c < fit.monomials.size(); ++c) {
    const auto deg = fit.monomials[c].size();
    auto& slot = deg == 1 ? c1 : c2;
    if (deg == 0) {
      fit.c0 = fit.coefficients[c];
    } else if (!slot) {
      slot = fit.coefficients[c];
    } else if (*slot != fit.coefficients[c]) {
      fit.symmetric = false;
    }
  }
  fit.c1 = c1.value_or(0);
  fit.c2 = c2.value_or(0);
  return fit;
}

}  // namespace ergtower

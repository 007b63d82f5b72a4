#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ergtower/errors.hpp"
#include "ergtower/gf2.hpp"
#include "ergtower/lattice.hpp"
#include "ergtower/models.hpp"
#include "ergtower/pauli.hpp"

namespace ergtower {

enum class CircuitSource { paper, general };

inline const char* circuit_source_name(CircuitSource s) { return s == CircuitSource::paper ? "paper" : "general"; }

/// One growth step of a [d,d+1,d+2,D] model along `axis` (0-based, default the last).
/// The cut torus sits at doubled axis coordinate 2 of the enlarged lattice; source
/// qubits with doubled axis coordinate x > 1 move to x + 2.
struct ErgPlan {
  ModelSpec spec;
  std::vector<int> dims;
  int axis = -1;
  CircuitSource circuit_source = CircuitSource::paper;

  int d() const noexcept { return spec.dn; }
  int grow_axis() const noexcept { return axis < 0 ? spec.D - 1 : axis; }
  bool product_insertion() const noexcept { return spec.D == spec.dn + 2; }

  void validate() const {
    spec.validate();
    if (!spec.is_chain()) throw std::domain_error("ERG plans need a [d,d+1,d+2,D] spec, got " + spec.to_string());
    if (static_cast<int>(dims.size()) != spec.D) throw std::domain_error("plan dims do not match the model dimension");
    for (int l : dims) {
      if (l < 2) throw std::domain_error("every linear size must be at least 2");
    }
    if (grow_axis() < 0 || grow_axis() >= spec.D) throw std::domain_error("grow axis out of range");
  }

  LatticeSpec source_lattice() const { return LatticeSpec{dims, Boundary::periodic}; }

  LatticeSpec target_lattice() const {
    auto big = dims;
    ++big[static_cast<std::size_t>(grow_axis())];
    return LatticeSpec{big, Boundary::periodic};
  }

  std::vector<int> transverse_axes() const {
    std::vector<int> out;
    for (int a = 0; a < spec.D; ++a) {
      if (a != grow_axis()) out.push_back(a);
    }
    return out;
  }

  LatticeSpec transverse_lattice() const {
    LatticeSpec t;
    for (int a : transverse_axes()) t.dims.push_back(dims[static_cast<std::size_t>(a)]);
    return t;
  }

  /// The model inserted on the cut torus; nullopt for the product-state variant.
  std::optional<ModelSpec> inserted_spec() const {
    if (product_insertion()) return std::nullopt;
    return ModelSpec{spec.dn, spec.ds, spec.dl, spec.D - 1};
  }
};

inline int erg_level(const ModelSpec& spec) {
  spec.validate();
  if (!spec.is_chain()) throw std::domain_error("ERG level is defined for [d,d+1,d+2,D] specs");
  return spec.D - spec.dn - 2;
}

/// Where a source-lattice cube lands on the enlarged lattice.
inline CubeCoord map_source_coord(const ErgPlan& plan, CubeCoord c) {
  auto& v = c[static_cast<std::size_t>(plan.grow_axis())];
  if (v > 1) v += 2;
  return c;
}

/// Embeds a cube of the transverse lattice into the cut torus.
inline CubeCoord embed_transverse(const ErgPlan& plan, const CubeCoord& c, int axis_value = 2) {
  std::vector<int> x;
  std::size_t k = 0;
  for (int a = 0; a < plan.spec.D; ++a) x.push_back(a == plan.grow_axis() ? axis_value : c[k++]);
  return CubeCoord(std::move(x));
}

inline int axis_coord(const ErgPlan& plan, const CubeCoord& c) { return c[static_cast<std::size_t>(plan.grow_axis())]; }

inline CubeCoord shift_axis(const ErgPlan& plan, CubeCoord c, int delta, const LatticeSpec& lat) {
  c[static_cast<std::size_t>(plan.grow_axis())] += delta;
  return wrap(std::move(c), lat);
}

namespace detail {

// Generators of the inserted lower-dimensional model, re-indexed on the enlarged lattice.
inline std::vector<Generator> inserted_generators(const ErgPlan& plan, const QubitIndexMap& big) {
  std::vector<Generator> out;
  const std::size_t n = big.size();
  const int ax = plan.grow_axis();
  if (plan.product_insertion()) {
    for (std::size_t q = 0; q < n; ++q) {
      const auto& c = big.coord(q);
      if (c[static_cast<std::size_t>(ax)] == 2) out.push_back({PauliString::x_on(n, {q}), Tag::single_x, c, 0});
    }
    return out;
  }
  const auto sub = build_model(*plan.inserted_spec(), plan.transverse_lattice());
  const auto trans = plan.transverse_axes();
  std::vector<std::size_t> relabel(sub.n_qubits());
  for (std::size_t q = 0; q < sub.n_qubits(); ++q) relabel[q] = big.index(embed_transverse(plan, sub.qubits.coord(q)));
  for (const auto& g : sub.generators) {
    PauliString p(n);
    for (auto q : g.pauli.x().ones()) p.x().flip(relabel[q]);
    for (auto q : g.pauli.z().ones()) p.z().flip(relabel[q]);
    unsigned mask = 0;
    for (std::size_t i = 0; i < trans.size(); ++i) {
      if (g.subsystem >> i & 1u) mask |= 1u << trans[i];
    }
    out.push_back({std::move(p), g.tag == Tag::a ? Tag::inserted_a : Tag::inserted_b,
                   embed_transverse(plan, g.center), mask});
  }
  return out;
}

}  // namespace detail

/// H1: the duplicated source model together with the inserted model on the cut
/// torus and the ZZ terms tying each cut qubit to its copy.
///  - A terms of the enlarged lattice, except that the two cells at doubled axis
///    coordinates 1 and 3 appear only through their product A' (centered at 1);
///  - B terms of the enlarged lattice except those centered at 2 and 3;
///  - the inserted model at axis coordinate 2 (single-qubit X terms at level 0);
///  - Z(q) Z(q + 2) for every qubit q at axis coordinate 1.
inline StabilizerModel build_h1(const ErgPlan& plan) {
  plan.validate();
  const auto big_lat = plan.target_lattice();
  const auto full = build_model(plan.spec, big_lat);
  StabilizerModel h1;
  h1.spec = plan.spec;
  h1.lat = big_lat;
  h1.qubits = full.qubits;
  const std::size_t n = h1.qubits.size();

  std::map<CubeCoord, std::size_t> a_at;
  for (std::size_t i = 0; i < full.generators.size(); ++i) {
    if (full.generators[i].tag == Tag::a) a_at.emplace(full.generators[i].center, i);
  }

  for (const auto& g : full.generators) {
    const int x = axis_coord(plan, g.center);
    if (g.tag == Tag::a) {
      if (x == 3) continue;
      if (x == 1) {
        const auto& upper = full.generators[a_at.at(shift_axis(plan, g.center, 2, big_lat))];
        h1.generators.push_back({multiply(g.pauli, upper.pauli), Tag::a_prime, g.center, 0});
        continue;
      }
      h1.generators.push_back(g);
    } else {
      if (x == 2 || x == 3) continue;
      h1.generators.push_back(g);
    }
  }

  for (auto& g : detail::inserted_generators(plan, h1.qubits)) h1.generators.push_back(std::move(g));

  for (std::size_t q = 0; q < n; ++q) {
    const auto& c = h1.qubits.coord(q);
    if (axis_coord(plan, c) != 1) continue;
    const auto partner = h1.qubits.index(shift_axis(plan, c, 2, big_lat));
    h1.generators.push_back({PauliString::z_on(n, {q, partner}), Tag::zz, c, 0});
  }
  return h1;
}

// ---------------------------------------------------------------------------
// circuits

namespace detail {

struct CellGates {
  std::string control;
  std::vector<std::string> targets;
};

struct PaperCircuitTable {
  // Local vertex coordinates in {0,1}^D; the last local axis is the grow axis.
  std::map<char, std::vector<int>> vertices;
  std::vector<CellGates> gates;
};

inline std::map<char, std::vector<int>> cube_vertices_3d(int top) {
  return {{'a', {0, 0, top}}, {'b', {1, 0, top}}, {'c', {1, 1, top}}, {'d', {0, 1, top}},
          {'e', {0, 0, 1 - top}}, {'f', {1, 0, 1 - top}}, {'g', {1, 1, 1 - top}}, {'h', {0, 1, 1 - top}}};
}

inline PaperCircuitTable paper_table(const ModelSpec& spec) {
  PaperCircuitTable t;
  if (spec == ModelSpec{0, 1, 2, 2}) {
    t.vertices = {{'a', {0, 1}}, {'b', {1, 1}}, {'c', {1, 0}}, {'d', {0, 0}}};
    t.gates = {{"ab", {"bc", "cd", "da"}}};
    return t;
  }
  if (spec == ModelSpec{0, 1, 2, 3}) {
    t.vertices = cube_vertices_3d(1);
    t.gates = {{"bc", {"bf", "cg", "fg"}}, {"ad", {"ae", "dh", "eh"}}, {"ab", {"ef"}}, {"dc", {"hg"}}};
    return t;
  }
  if (spec.D == 4 && (spec == ModelSpec{0, 1, 2, 4} || spec == ModelSpec{1, 2, 3, 4})) {
    // a..h: the 3-cube at x4 = 1 labelled as in the 3D case; i..p: the same points at x4 = 0.
    const auto upper = cube_vertices_3d(1);
    const std::string lower = "ijklmnop";
    for (const auto& [label, x] : upper) {
      auto hi = x;
      hi.push_back(1);
      auto lo = x;
      lo.push_back(0);
      t.vertices[label] = hi;
      t.vertices[lower[static_cast<std::size_t>(label - 'a')]] = lo;
    }
    if (spec.dn == 0) {
      t.gates = {{"fg", {"fn", "no", "og"}}, {"bc", {"bj", "jk", "kc"}}, {"ad", {"ai", "il", "ld"}},
                 {"eh", {"em", "mp", "ph"}}, {"ef", {"mn"}}, {"ab", {"ij"}}, {"dc", {"lk"}}, {"hg", {"po"}},
                 {"cg", {"ko"}}, {"bf", {"jn"}}, {"ae", {"im"}}, {"dh", {"lp"}}};
    } else {
      t.gates = {{"abcd", {"ijkl", "abji", "bckj", "cdlk", "dail"}},
                 {"efgh", {"mnop", "efnm", "fgon", "ghpo", "hemp"}},
                 {"abfe", {"ijnm", "aemi", "bfnj"}},
                 {"cdhg", {"klpo", "dhpl", "cgok"}},
                 {"bcgf", {"jkon"}},
                 {"daeh", {"limp"}}};
    }
    return t;
  }
  throw std::domain_error("no paper circuit for " + spec.to_string());
}

// Doubled local center of the cell face spanned by the labelled vertices.
inline std::vector<int> local_center(const PaperCircuitTable& t, const std::string& label, int D, int face_dim) {
  std::vector<int> sum(static_cast<std::size_t>(D), 0);
  for (char v : label) {
    const auto& x = t.vertices.at(v);
    for (int i = 0; i < D; ++i) sum[static_cast<std::size_t>(i)] += x[static_cast<std::size_t>(i)];
  }
  const int k = static_cast<int>(label.size());
  std::vector<int> c;
  int halves = 0;
  for (int s : sum) {
    if ((2 * s) % k != 0) throw construction_error("gate label " + label + " is not a cell face");
    c.push_back(2 * s / k);
    halves += c.back() & 1;
  }
  if (halves != face_dim) throw construction_error("gate label " + label + " has the wrong dimension");
  return c;
}

// Transverse offsets of every cell of the cut slab, lexicographic.
inline std::vector<std::vector<int>> transverse_offsets(const ErgPlan& plan) {
  std::vector<int> sizes;
  for (int a : plan.transverse_axes()) sizes.push_back(plan.dims[static_cast<std::size_t>(a)]);
  std::vector<std::vector<int>> out{{}};
  for (int l : sizes) {
    std::vector<std::vector<int>> next;
    for (const auto& p : out) {
      for (int v = 0; v < l; ++v) {
        auto q = p;
        q.push_back(v);
        next.push_back(std::move(q));
      }
    }
    out = std::move(next);
  }
  return out;
}

inline CubeCoord place_local(const ErgPlan& plan, const std::vector<int>& local, const std::vector<int>& offset,
                             const LatticeSpec& big) {
  const auto trans = plan.transverse_axes();
  std::vector<int> x(static_cast<std::size_t>(plan.spec.D));
  x[static_cast<std::size_t>(plan.grow_axis())] = local.back();
  for (std::size_t i = 0; i < trans.size(); ++i) x[static_cast<std::size_t>(trans[i])] = local[i] + 2 * offset[i];
  return wrap(CubeCoord(std::move(x)), big);
}

inline CubeCoord cell_center(const ErgPlan& plan, const std::vector<int>& offset, const LatticeSpec& big) {
  return place_local(plan, std::vector<int>(static_cast<std::size_t>(plan.spec.D), 1), offset, big);
}

inline CnotCircuit finish_circuit(std::set<Cnot> gates) {
  CnotCircuit c(std::vector<Cnot>(gates.begin(), gates.end()));
  if (!c.is_commuting_layer()) throw construction_error("circuit has a qubit that is both control and target");
  return c;
}

}  // namespace detail

/// The per-cell gate lists of the worked examples, replicated over every cell of
/// the cut slab. Gates shared by neighbouring cells are applied once.
inline CnotCircuit build_circuit_paper(const ErgPlan& plan) {
  plan.validate();
  const auto table = detail::paper_table(plan.spec);
  const auto big = plan.target_lattice();
  const QubitIndexMap q(big, plan.spec.ds);
  std::set<Cnot> gates;
  for (const auto& off : detail::transverse_offsets(plan)) {
    for (const auto& cell : table.gates) {
      const auto ctrl = q.index(detail::place_local(
          plan, detail::local_center(table, cell.control, plan.spec.D, plan.spec.ds), off, big));
      for (const auto& tgt : cell.targets) {
        const auto t = q.index(
            detail::place_local(plan, detail::local_center(table, tgt, plan.spec.D, plan.spec.ds), off, big));
        gates.insert({ctrl, t});
      }
    }
  }
  return detail::finish_circuit(std::move(gates));
}

/// A conforming circuit for any [d,d+1,d+2,D] with D > d+2. In each cell at axis
/// coordinate 1: a bottom face is controlled by its copy on the cut; a side face
/// with half-axes S + {axis} is controlled by the cut face with half-axes S + {k},
/// k the smallest transverse axis outside S.
inline CnotCircuit build_circuit_general(const ErgPlan& plan) {
  plan.validate();
  if (plan.product_insertion()) throw std::domain_error("the general circuit needs D > d+2");
  const auto big = plan.target_lattice();
  const QubitIndexMap q(big, plan.spec.ds);
  const auto trans = plan.transverse_axes();
  const auto ax = static_cast<std::size_t>(plan.grow_axis());
  std::set<Cnot> gates;
  for (const auto& off : detail::transverse_offsets(plan)) {
    const auto cell = detail::cell_center(plan, off, big);
    for (const auto& face : nearest_cubes(cell, plan.spec.ds, big)) {
      const int x = face[ax];
      if (x == 0) {
        auto ctrl = face;
        ctrl[ax] = 2;
        gates.insert({q.index(ctrl), q.index(face)});
      } else if (x == 1) {
        const unsigned half = face.half_axes();
        std::optional<int> k;
        for (int a : trans) {
          if (!(half >> a & 1u)) {
            k = a;
            break;
          }
        }
        if (!k) throw construction_error("no free transverse axis for a side face");
        auto ctrl = face;
        ctrl[ax] = 2;
        ctrl[static_cast<std::size_t>(*k)] = cell[static_cast<std::size_t>(*k)];
        gates.insert({q.index(ctrl), q.index(face)});
      }
    }
  }
  return detail::finish_circuit(std::move(gates));
}

inline CnotCircuit build_circuit(const ErgPlan& plan) {
  return plan.circuit_source == CircuitSource::paper ? build_circuit_paper(plan) : build_circuit_general(plan);
}

// ---------------------------------------------------------------------------
// circuit conditions

struct ConditionReport {
  bool well_formed = true;
  bool condition1 = true;  // controls on the cut, targets below it, gates inside one cell, translation invariant
  bool condition2 = true;  // bottom faces controlled only by their copy on the cut
  bool condition3 = true;  // one nearest in-cell control per side face; parallel pairs agree
  bool two_controls = true;  // every side face has exactly two controls overall
  std::vector<std::string> violations;

  bool ok() const noexcept { return well_formed && condition1 && condition2 && condition3 && two_controls; }
};

inline ConditionReport validate_circuit_conditions(const CnotCircuit& c, const ErgPlan& plan) {
  plan.validate();
  ConditionReport r;
  const auto big = plan.target_lattice();
  const QubitIndexMap q(big, plan.spec.ds);
  const std::size_t n = q.size();
  const auto ax = static_cast<std::size_t>(plan.grow_axis());
  constexpr std::size_t max_messages = 40;
  auto fail = [&](bool& flag, const std::string& msg) {
    flag = false;
    if (r.violations.size() < max_messages) r.violations.push_back(msg);
  };
  auto gate_text = [&](const Cnot& g) {
    return format_coord(q.coord(g.control)) + "->" + format_coord(q.coord(g.target));
  };

  std::set<Cnot> gate_set;
  for (const auto& g : c.gates()) {
    if (g.control >= n || g.target >= n || g.control == g.target) {
      fail(r.well_formed, "gate indices out of range");
      return r;
    }
    if (!gate_set.insert(g).second) fail(r.well_formed, "duplicate gate " + gate_text(g));
  }
  if (!c.is_commuting_layer()) fail(r.well_formed, "a qubit is both control and target");

  std::vector<std::vector<std::size_t>> controls_of(n);
  for (const auto& g : gate_set) controls_of[g.target].push_back(g.control);

  // cells at axis coordinate 1 and their faces
  std::vector<CubeCoord> cells;
  std::vector<std::vector<std::size_t>> faces;
  std::vector<std::vector<std::size_t>> cells_of(n);
  for (const auto& off : detail::transverse_offsets(plan)) {
    cells.push_back(detail::cell_center(plan, off, big));
    std::vector<std::size_t> f;
    for (const auto& cube : nearest_cubes(cells.back(), plan.spec.ds, big)) {
      f.push_back(q.index(cube));
      cells_of[f.back()].push_back(cells.size() - 1);
    }
    faces.push_back(std::move(f));
  }

  // condition 1
  for (const auto& g : gate_set) {
    const int xc = q.coord(g.control)[ax];
    const int xt = q.coord(g.target)[ax];
    if (xc != 2) fail(r.condition1, "control off the cut in " + gate_text(g));
    if (xt != 0 && xt != 1) fail(r.condition1, "target outside the cut slab in " + gate_text(g));
    const auto& a = cells_of[g.control];
    const auto& b = cells_of[g.target];
    const bool shared = std::any_of(a.begin(), a.end(), [&](std::size_t x) {
      return std::find(b.begin(), b.end(), x) != b.end();
    });
    if (!shared) fail(r.condition1, "gate spans two cells: " + gate_text(g));
  }
  for (int t : plan.transverse_axes()) {
    for (const auto& g : gate_set) {
      auto cc = q.coord(g.control);
      auto tt = q.coord(g.target);
      cc[static_cast<std::size_t>(t)] += 2;
      tt[static_cast<std::size_t>(t)] += 2;
      if (!gate_set.count({q.index(cc), q.index(tt)})) {
        fail(r.condition1, "not translation invariant along axis " + std::to_string(t + 1) + ": " + gate_text(g));
        break;
      }
    }
  }

  // condition 2 and the global count
  for (std::size_t t = 0; t < n; ++t) {
    const auto& coord = q.coord(t);
    if (coord[ax] == 0) {
      const auto partner = q.index(shift_axis(plan, coord, 2, big));
      if (controls_of[t].size() != 1 || controls_of[t][0] != partner) {
        fail(r.condition2, "bottom face " + format_coord(coord) + " is not controlled by exactly its copy");
      }
    } else if (coord[ax] == 1) {
      if (controls_of[t].size() != 2) {
        fail(r.two_controls, "side face " + format_coord(coord) + " has " + std::to_string(controls_of[t].size()) +
                                 " controls");
      }
    }
  }

  // condition 3
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    const auto& f = faces[ci];
    auto in_cell = [&](std::size_t qubit) { return std::find(f.begin(), f.end(), qubit) != f.end(); };
    std::vector<std::size_t> sides;
    for (auto t : f) {
      if (q.coord(t)[ax] == 1) sides.push_back(t);
    }
    for (auto t : sides) {
      std::vector<std::size_t> local;
      for (auto ctl : controls_of[t]) {
        if (in_cell(ctl)) local.push_back(ctl);
      }
      if (local.size() != 1 || !is_nearest(q.coord(local[0]), q.coord(t), big)) {
        fail(r.condition3, "side face " + format_coord(q.coord(t)) + " has " + std::to_string(local.size()) +
                               " in-cell controls in cell " + format_coord(cells[ci]));
      }
    }
    for (std::size_t i = 0; i < sides.size(); ++i) {
      for (std::size_t j = i + 1; j < sides.size(); ++j) {
        const auto& ci_coord = q.coord(sides[i]);
        const auto& cj_coord = q.coord(sides[j]);
        if (ci_coord.half_axes() != cj_coord.half_axes() || !is_nearest(ci_coord, cj_coord, big)) continue;
        for (auto link : f) {
          const auto& lc = q.coord(link);
          if (lc[ax] != 2 || !is_nearest(lc, ci_coord, big) || !is_nearest(lc, cj_coord, big)) continue;
          const auto& a = controls_of[sides[i]];
          const auto& b = controls_of[sides[j]];
          const bool ca = std::find(a.begin(), a.end(), link) != a.end();
          const bool cb = std::find(b.begin(), b.end(), link) != b.end();
          if (ca != cb) {
            fail(r.condition3, "parallel pair " + format_coord(ci_coord) + ", " + format_coord(cj_coord) +
                                   " disagrees on " + format_coord(lc));
          }
        }
      }
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// fixed point

struct FixedPointReport {
  ModelSpec spec;
  std::vector<int> dims_from;
  std::vector<int> dims_to;
  int axis = 0;
  CircuitSource circuit_source = CircuitSource::paper;
  std::size_t n_qubits = 0;
  std::size_t n_gates = 0;
  std::size_t h1_rank = 0;
  std::size_t h2_rank = 0;
  std::size_t h3_rank = 0;
  bool equal = false;
  long long gsd_from = 0;
  long long gsd_to = 0;
  long long inserted_gsd = 0;
  bool recursion_ok = false;
};

inline long long inserted_log2_gsd(const ErgPlan& plan) {
  if (plan.product_insertion()) return 0;
  return log2_gsd(*plan.inserted_spec(), plan.transverse_lattice());
}

/// Conjugates H1 by the plan's circuit and compares the result with the model
/// built directly on the enlarged lattice, X and Z sectors stacked into one matrix.
inline FixedPointReport verify_fixed_point(const ErgPlan& plan, long long max_qubits = 8192) {
  plan.validate();
  check_qubit_cap(plan.spec, plan.target_lattice(), max_qubits);
  FixedPointReport r;
  r.spec = plan.spec;
  r.dims_from = plan.dims;
  r.dims_to = plan.target_lattice().dims;
  r.axis = plan.grow_axis();
  r.circuit_source = plan.circuit_source;

  const auto h1 = build_h1(plan);
  const auto circuit = build_circuit(plan);
  const auto h3 = build_model(plan.spec, plan.target_lattice());
  r.n_qubits = h1.n_qubits();
  r.n_gates = circuit.size();

  const auto m1 = h1.symplectic();
  const auto m2 = symplectic_matrix(conjugate_group(circuit, h1.paulis()), h1.n_qubits());
  const auto m3 = h3.symplectic();
  r.h1_rank = rank(m1);
  r.h2_rank = rank(m2);
  r.h3_rank = rank(m3);
  r.equal = row_space_equal(m2, m3);

  r.gsd_from = log2_gsd(plan.spec, plan.source_lattice());
  r.gsd_to = static_cast<long long>(h3.n_qubits()) - static_cast<long long>(r.h3_rank);
  r.inserted_gsd = inserted_log2_gsd(plan);
  r.recursion_ok = r.gsd_to - r.gsd_from == r.inserted_gsd;
  return r;
}

struct RecursionReport {
  long long gsd_from = 0;
  long long gsd_to = 0;
  long long inserted_gsd = 0;
  bool ok = false;
};

/// log2 GSD grows by the inserted model's log2 GSD when one layer is added.
inline RecursionReport gsd_recursion_check(const ModelSpec& spec, const std::vector<int>& dims, int axis = -1) {
  ErgPlan plan{spec, dims, axis, CircuitSource::general};
  plan.validate();
  RecursionReport r;
  r.gsd_from = log2_gsd(spec, plan.source_lattice());
  r.gsd_to = log2_gsd(spec, plan.target_lattice());
  r.inserted_gsd = inserted_log2_gsd(plan);
  r.ok = r.gsd_to - r.gsd_from == r.inserted_gsd;
  return r;
}

// ---------------------------------------------------------------------------
// term classes near the cut

enum class TermClass { BI, BII, BIII, BIV, BV, BVI, AI, AII, AIII, C };

inline const char* term_class_name(TermClass t) {
  switch (t) {
    case TermClass::BI: return "BI";
    case TermClass::BII: return "BII";
    case TermClass::BIII: return "BIII";
    case TermClass::BIV: return "BIV";
    case TermClass::BV: return "BV";
    case TermClass::BVI: return "BVI";
    case TermClass::AI: return "AI";
    case TermClass::AII: return "AII";
    case TermClass::AIII: return "AIII";
    case TermClass::C: return "C";
  }
  return "?";
}

/// True when the generator's center lies in 0 <= x_axis <= 2 (doubled 0..4).
inline bool near_cut(const ErgPlan& plan, const Generator& g) {
  const int x = axis_coord(plan, g.center);
  return x >= 0 && x <= 4;
}

/// Class of an H1 or H3 generator near the cut, from its center and the axis
/// coordinates of its support on the enlarged lattice.
inline TermClass classify_term(const Generator& g, const ErgPlan& plan, const QubitIndexMap& q) {
  if (q.lattice().dims[static_cast<std::size_t>(plan.grow_axis())] < 3) {
    throw std::domain_error("classification needs at least three layers along the grow axis");
  }
  const auto& p = g.pauli;
  if (p.size() != q.size()) throw std::domain_error("generator does not act on the enlarged lattice");
  const int c = axis_coord(plan, g.center);
  std::set<int> xs;
  for (auto i : p.support()) xs.insert(axis_coord(plan, q.coord(i)));
  const auto unclassified = [&] {
    return std::domain_error(std::string("term ") + to_text(p, q) + " centered at " + format_coord(g.center) +
                             " has no class");
  };

  if (p.is_z_type()) {
    if (p.weight() == 2 && xs == std::set<int>{1, 3}) return TermClass::C;
    switch (c) {
      case 0: return xs == std::set<int>{0} ? TermClass::BI : TermClass::BII;
      case 1: return TermClass::BIII;
      case 2: return xs == std::set<int>{2} ? TermClass::BIV : TermClass::BVI;
      case 3:
      case 4: return TermClass::BV;
      default: throw unclassified();
    }
  }
  if (p.is_x_type()) {
    if (c == 2 && xs == std::set<int>{2}) return TermClass::AII;
    if (c == 1) return xs.count(2) ? TermClass::AIII : TermClass::AI;
    if (c == 3) return TermClass::AIII;
  }
  throw unclassified();
}

inline TermClass classify_term(const Generator& g, const ErgPlan& plan) {
  return classify_term(g, plan, QubitIndexMap(plan.target_lattice(), plan.spec.ds));
}

struct MappingReport {
  std::map<std::string, std::size_t> class_counts;
  std::size_t checked = 0;
  std::size_t bulk_checked = 0;
  std::vector<std::string> violations;

  bool ok() const noexcept { return violations.empty(); }
};

namespace detail {

// Size of the smallest subset of `cands` (at most max_k elements) whose XOR is `target`.
inline std::optional<std::size_t> min_decomposition(const BitVector& target, const std::vector<BitVector>& cands,
                                                    std::size_t max_k) {
  if (target.none()) return 0;
  std::vector<std::size_t> pick;
  std::optional<std::size_t> best;
  auto recurse = [&](auto&& self, std::size_t start, const BitVector& acc, std::size_t k) -> bool {
    if (pick.size() == k) return acc == target;
    for (std::size_t i = start; i < cands.size(); ++i) {
      pick.push_back(i);
      const bool hit = self(self, i + 1, acc ^ cands[i], k);
      pick.pop_back();
      if (hit) return true;
    }
    return false;
  };
  for (std::size_t k = 1; k <= max_k && !best; ++k) {
    if (recurse(recurse, 0, BitVector(target.size()), k)) best = k;
  }
  return best;
}

}  // namespace detail

/// Conjugates every H1 generator and checks it against the mapping rule of its class.
/// Generators away from the cut must be left unchanged.
inline MappingReport check_mapping_claims(const ErgPlan& plan) {
  plan.validate();
  MappingReport r;
  const auto h1 = build_h1(plan);
  const auto circuit = build_circuit(plan);
  const auto h3 = build_model(plan.spec, plan.target_lattice());
  const auto& big = h1.lat;
  const auto& q = h1.qubits;
  const std::size_t n = q.size();
  const auto ax = static_cast<std::size_t>(plan.grow_axis());
  constexpr std::size_t max_messages = 40;
  auto violate = [&](const std::string& msg) {
    if (r.violations.size() < max_messages) r.violations.push_back(msg);
  };

  std::vector<std::set<std::size_t>> controls_of(n);
  for (const auto& g : circuit.gates()) controls_of[g.target].insert(g.control);

  std::map<CubeCoord, std::vector<const Generator*>> h3_at;
  for (const auto& g : h3.generators) h3_at[g.center].push_back(&g);
  std::map<CubeCoord, std::vector<const Generator*>> biv_at;
  for (const auto& g : h1.generators) {
    if (g.tag == Tag::inserted_b) biv_at[g.center].push_back(&g);
  }

  auto shifted_z = [&](const PauliString& p, int delta) {
    PauliString s(n);
    for (auto i : p.z().ones()) s.z().flip(q.index(shift_axis(plan, q.coord(i), delta, big)));
    return s;
  };
  auto matches_any = [&](const PauliString& p, const std::vector<const Generator*>* list,
                         std::optional<TermClass> want) {
    if (!list) return false;
    for (const auto* g : *list) {
      if (g->pauli == p && (!want || classify_term(*g, plan, q) == *want)) return true;
    }
    return false;
  };
  auto find_list = [](auto& m, const CubeCoord& c) -> decltype(&m.begin()->second) {
    auto it = m.find(c);
    return it == m.end() ? nullptr : &it->second;
  };

  for (const auto& g : h1.generators) {
    const auto image = circuit_conjugate(circuit, g.pauli);
    const std::string where = std::string(tag_name(g.tag)) + " at " + format_coord(g.center);
    if (!near_cut(plan, g)) {
      ++r.bulk_checked;
      if (image != g.pauli) violate(where + ": bulk term changed under the circuit");
      continue;
    }
    TermClass cls;
    try {
      cls = classify_term(g, plan, q);
    } catch (const std::domain_error& e) {
      violate(where + ": " + e.what());
      continue;
    }
    ++r.checked;
    ++r.class_counts[term_class_name(cls)];
    const std::string label = where + " (" + term_class_name(cls) + ")";
    const auto residual = multiply(image, g.pauli);

    switch (cls) {
      case TermClass::AI:
      case TermClass::BIV:
      case TermClass::BV:
        if (image != g.pauli) violate(label + ": expected to stay invariant");
        break;
      case TermClass::C: {
        const auto target = shift_axis(plan, g.center, 1, big);
        if (!matches_any(image, find_list(h3_at, target), TermClass::BVI)) {
          violate(label + ": image is not a BVI term at " + format_coord(target));
        }
        break;
      }
      case TermClass::AII: {
        const auto target = shift_axis(plan, g.center, -1, big);
        if (!matches_any(image, find_list(h3_at, target), TermClass::AIII)) {
          violate(label + ": image is not the AIII term at " + format_coord(target));
        }
        break;
      }
      case TermClass::BI: {
        const auto up = shifted_z(g.pauli, 2);
        const auto target = shift_axis(plan, g.center, 2, big);
        if (!matches_any(up, find_list(biv_at, target), std::nullopt)) {
          violate(label + ": shifted copy is not a BIV term");
        } else if (image != multiply(g.pauli, up)) {
          violate(label + ": image is not B * B(+I_D)");
        }
        break;
      }
      case TermClass::BII: {
        std::set<std::size_t> bottom;
        std::set<std::size_t> side;
        for (auto i : g.pauli.z().ones()) {
          const int x = q.coord(i)[ax];
          if (x == 0) bottom.insert(controls_of[i].begin(), controls_of[i].end());
          if (x == 1) side.insert(controls_of[i].begin(), controls_of[i].end());
        }
        if (bottom == side) {
          if (image != g.pauli) violate(label + ": same control pair but the term changed");
        } else {
          const auto target = shift_axis(plan, g.center, 2, big);
          if (!matches_any(residual, find_list(biv_at, target), std::nullopt)) {
            violate(label + ": residual is not the BIV term at " + format_coord(target));
          }
        }
        break;
      }
      case TermClass::BIII: {
        const auto ones = g.pauli.z().ones();
        bool shared = false;
        for (std::size_t i = 0; i < ones.size() && !shared; ++i) {
          for (std::size_t j = i + 1; j < ones.size() && !shared; ++j) {
            const auto& a = q.coord(ones[i]);
            const auto& b = q.coord(ones[j]);
            if (a.half_axes() == b.half_axes() || !is_nearest(a, b, big)) continue;
            for (auto c : controls_of[ones[i]]) {
              if (controls_of[ones[j]].count(c)) shared = true;
            }
          }
        }
        std::vector<BitVector> cands;
        for (const auto& [center, list] : biv_at) {
          for (const auto* h : list) {
            if (h->pauli.z().intersects(residual.z())) cands.push_back(h->pauli.z());
          }
        }
        const auto k = residual.x().any() ? std::nullopt : detail::min_decomposition(residual.z(), cands, 4);
        const bool good = shared ? (k && *k == 0) : (k && (*k == 2 || *k == 4));
        if (!good) {
          violate(label + ": residual decomposes into " + (k ? std::to_string(*k) : std::string("no")) +
                  " BIV terms" + (shared ? " although a perpendicular pair shares a control" : ""));
        }
        break;
      }
      default:
        violate(label + ": class does not occur in H1");
    }
  }
  return r;
}

}  // namespace ergtower

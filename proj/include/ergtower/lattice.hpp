#pragma once

#include <algorithm>
#include <charconv>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ergtower/errors.hpp"

namespace ergtower {

enum class Boundary { periodic, open };

/// A D-dimensional hypercubic lattice with unit lattice constant.
struct LatticeSpec {
  std::vector<int> dims;
  Boundary bc = Boundary::periodic;

  int dimension() const noexcept { return static_cast<int>(dims.size()); }
  bool periodic() const noexcept { return bc == Boundary::periodic; }

  /// Doubled-coordinate period along `axis` (periodic bc only).
  int period(int axis) const noexcept { return 2 * dims[static_cast<std::size_t>(axis)]; }

  long long vertex_count() const noexcept {
    long long n = 1;
    for (int l : dims) n *= l;
    return n;
  }

  void validate() const {
    if (dims.size() < 2) throw std::domain_error("lattice dimension must be at least 2");
    for (int l : dims) {
      if (l < 2) throw std::domain_error("every linear size must be at least 2");
    }
  }

  std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < dims.size(); ++i) {
      if (i) s += 'x';
      s += std::to_string(dims[i]);
    }
    s += periodic() ? ":pbc" : ":obc";
    return s;
  }

  friend bool operator==(const LatticeSpec&, const LatticeSpec&) = default;
};

/// An n-cube identified by the doubled coordinates of its center. Odd entries
/// are the half-integer axes; their count is the cube dimension.
struct CubeCoord {
  std::vector<int> x;

  CubeCoord() = default;
  explicit CubeCoord(std::vector<int> coords) : x(std::move(coords)) {}
  CubeCoord(std::initializer_list<int> coords) : x(coords) {}

  int dimension() const noexcept {
    return static_cast<int>(std::count_if(x.begin(), x.end(), [](int v) { return v & 1; }));
  }
  std::size_t size() const noexcept { return x.size(); }
  int operator[](std::size_t i) const noexcept { return x[i]; }
  int& operator[](std::size_t i) noexcept { return x[i]; }

  /// Bitmask of half-integer axes.
  unsigned half_axes() const noexcept {
    unsigned m = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] & 1) m |= 1u << i;
    }
    return m;
  }

  friend bool operator==(const CubeCoord&, const CubeCoord&) = default;
  friend auto operator<=>(const CubeCoord&, const CubeCoord&) = default;
};

/// Human-readable coordinates in lattice units, e.g. (0,1/2,-3/2).
inline std::string format_coord(const CubeCoord& c) {
  std::string s = "(";
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) s += ',';
    const int v = c[i];
    if (v % 2 == 0) {
      s += std::to_string(v / 2);
    } else {
      s += std::to_string(v) + "/2";
    }
  }
  return s + ")";
}

inline int floor_mod(int a, int m) noexcept {
  const int r = a % m;
  return r < 0 ? r + m : r;
}

inline bool in_lattice(const CubeCoord& c, const LatticeSpec& lat) {
  if (static_cast<int>(c.size()) != lat.dimension()) return false;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const int hi = lat.periodic() ? 2 * lat.dims[i] - 1 : 2 * (lat.dims[i] - 1);
    if (c[i] < 0 || c[i] > hi) return false;
  }
  return true;
}

/// Canonical representative: periodic coordinates are reduced into [0, 2L).
/// Open-boundary coordinates are returned unchanged.
inline CubeCoord wrap(CubeCoord c, const LatticeSpec& lat) {
  if (lat.periodic()) {
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = floor_mod(c[i], 2 * lat.dims[i]);
  }
  return c;
}

/// Minimal-image separation along one axis in doubled units.
inline int axis_distance(int a, int b, int axis, const LatticeSpec& lat) {
  int d = std::abs(a - b);
  if (lat.periodic()) {
    const int p = lat.period(axis);
    d %= p;
    d = std::min(d, p - d);
  }
  return d;
}

/// Sum of minimal-image separations in doubled units.
inline int doubled_distance(const CubeCoord& a, const CubeCoord& b, const LatticeSpec& lat) {
  int sum = 0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += axis_distance(a[i], b[i], static_cast<int>(i), lat);
  return sum;
}

/// The nearest relation: in lattice units the coordinate distances sum to |m-n|/2 for
/// cubes of different dimension and to 1 for cubes of equal dimension.
inline bool is_nearest(const CubeCoord& a, const CubeCoord& b, const LatticeSpec& lat) {
  const int m = a.dimension();
  const int n = b.dimension();
  const int want = m == n ? 2 : std::abs(m - n);
  return doubled_distance(a, b, lat) == want;
}

namespace detail {

inline void require_dimension(int n, const LatticeSpec& lat) {
  if (n < 0 || n > lat.dimension()) throw std::domain_error("cube dimension out of range");
}

// Unwrapped candidates nearest to c with dimension m. Per-axis offsets lie in
// [-2, 2] because a nearest pair changes parity on exactly |m-n| axes by one
// unit each (or, for m == n, moves two units in total).
inline std::vector<CubeCoord> nearest_candidates(const CubeCoord& c, int m) {
  const int n = c.dimension();
  const int want = m == n ? 2 : std::abs(m - n);
  std::vector<CubeCoord> out;
  CubeCoord cur = c;
  const std::size_t dim = c.size();
  auto recurse = [&](auto&& self, std::size_t axis, int used) -> void {
    if (used > want) return;
    if (axis == dim) {
      if (used == want && cur.dimension() == m) out.push_back(cur);
      return;
    }
    for (int delta = -2; delta <= 2; ++delta) {
      cur[axis] = c[axis] + delta;
      self(self, axis + 1, used + std::abs(delta));
    }
    cur[axis] = c[axis];
  };
  recurse(recurse, 0, 0);
  return out;
}

}  // namespace detail

/// Every n-cube of the lattice exactly once, lexicographically sorted.
inline std::vector<CubeCoord> enumerate_cubes(const LatticeSpec& lat, int n) {
  detail::require_dimension(n, lat);
  const auto dim = static_cast<std::size_t>(lat.dimension());
  std::vector<CubeCoord> out;
  CubeCoord cur(std::vector<int>(dim, 0));
  auto recurse = [&](auto&& self, std::size_t axis, int halves) -> void {
    if (axis == dim) {
      if (halves == n) out.push_back(cur);
      return;
    }
    const int hi = lat.periodic() ? 2 * lat.dims[axis] - 1 : 2 * (lat.dims[axis] - 1);
    for (int v = 0; v <= hi; ++v) {
      const int h = halves + (v & 1);
      if (h > n) continue;
      cur[axis] = v;
      self(self, axis + 1, h);
    }
  };
  recurse(recurse, 0, 0);
  std::sort(out.begin(), out.end());
  return out;
}

/// All m-cubes nearest to c, sorted. Under open bc, cubes outside the lattice are dropped.
inline std::vector<CubeCoord> nearest_cubes(const CubeCoord& c, int m, const LatticeSpec& lat) {
  detail::require_dimension(m, lat);
  std::vector<CubeCoord> out;
  for (auto& cand : detail::nearest_candidates(c, m)) {
    CubeCoord w = wrap(std::move(cand), lat);
    if (!in_lattice(w, lat)) continue;
    if (!is_nearest(c, w, lat)) continue;
    out.push_back(std::move(w));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Bijection between the cubes of one dimension and indices [0, N), in
/// lexicographic order of doubled coordinates.
class QubitIndexMap {
 public:
  QubitIndexMap() = default;
  QubitIndexMap(const LatticeSpec& lat, int cube_dim)
      : lattice_(lat), cube_dim_(cube_dim), cubes_(enumerate_cubes(lat, cube_dim)) {
    for (std::size_t i = 0; i < cubes_.size(); ++i) index_.emplace(cubes_[i], i);
  }

  std::size_t size() const noexcept { return cubes_.size(); }
  int cube_dimension() const noexcept { return cube_dim_; }
  const LatticeSpec& lattice() const noexcept { return lattice_; }
  const std::vector<CubeCoord>& cubes() const noexcept { return cubes_; }
  const CubeCoord& coord(std::size_t i) const { return cubes_.at(i); }

  std::optional<std::size_t> find(const CubeCoord& c) const {
    auto it = index_.find(wrap(c, lattice_));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t index(const CubeCoord& c) const {
    auto i = find(c);
    if (!i) throw std::out_of_range("no qubit at " + format_coord(c));
    return *i;
  }

 private:
  LatticeSpec lattice_;
  int cube_dim_ = 0;
  std::vector<CubeCoord> cubes_;
  std::map<CubeCoord, std::size_t> index_;
};

namespace detail {

inline int parse_int(std::string_view s, std::size_t& pos, std::size_t base_offset) {
  int value = 0;
  const char* begin = s.data() + pos;
  const char* end = s.data() + s.size();
  if (begin != end && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr == begin) throw parse_error("expected an integer", base_offset + pos);
  pos = static_cast<std::size_t>(ptr - s.data());
  return value;
}

}  // namespace detail

/// Parses `<L1>x<L2>x...x<LD>:<pbc|obc>`. `base_offset` shifts reported error positions
/// when the text is embedded in a longer string.
inline LatticeSpec parse_lattice_spec(std::string_view text, std::size_t base_offset = 0) {
  LatticeSpec lat;
  std::size_t pos = 0;
  while (true) {
    lat.dims.push_back(detail::parse_int(text, pos, base_offset));
    if (pos < text.size() && text[pos] == 'x') {
      ++pos;
      continue;
    }
    break;
  }
  if (pos >= text.size() || text[pos] != ':') throw parse_error("expected ':' before boundary condition", base_offset + pos);
  ++pos;
  const auto bc = text.substr(pos);
  if (bc == "pbc") {
    lat.bc = Boundary::periodic;
  } else if (bc == "obc") {
    lat.bc = Boundary::open;
  } else {
    throw parse_error("boundary condition must be 'pbc' or 'obc'", base_offset + pos);
  }
  try {
    lat.validate();
  } catch (const std::domain_error& e) {
    throw parse_error(e.what(), base_offset);
  }
  return lat;
}

}  // namespace ergtower

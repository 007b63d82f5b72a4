#pragma once

#include <algorithm>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ergtower {

/// Fixed-length bitstring packed into 64-bit words. Pad bits past size() are
/// always zero, so word-wise comparison and hashing are exact.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t n) : size_(n), words_((n + 63) / 64, 0) {}

  /// Parses a string of '0'/'1' characters; bit i is character i.
  static BitVector from_string(std::string_view bits) {
    BitVector v(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (bits[i] == '1') {
        v.set(i);
      } else if (bits[i] != '0') {
        throw std::invalid_argument("bitstring may only contain '0' and '1'");
      }
    }
    return v;
  }

  static BitVector from_indices(std::size_t n, std::span<const std::size_t> indices) {
    BitVector v(n);
    for (auto i : indices) v.flip(i);
    return v;
  }

  std::size_t size() const noexcept { return size_; }
  std::size_t word_count() const noexcept { return words_.size(); }
  std::span<const std::uint64_t> words() const noexcept { return words_; }
  std::span<std::uint64_t> words() noexcept { return words_; }

  bool get(std::size_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1u; }
  bool operator[](std::size_t i) const noexcept { return get(i); }

  void set(std::size_t i, bool value = true) noexcept {
    const std::uint64_t mask = std::uint64_t{1} << (i & 63);
    if (value) {
      words_[i >> 6] |= mask;
    } else {
      words_[i >> 6] &= ~mask;
    }
  }

  void flip(std::size_t i) noexcept { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

  BitVector& operator^=(const BitVector& other) {
    check_size(other);
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
    return *this;
  }

  BitVector& operator&=(const BitVector& other) {
    check_size(other);
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= other.words_[w];
    return *this;
  }

  friend BitVector operator^(BitVector a, const BitVector& b) { return a ^= b; }
  friend BitVector operator&(BitVector a, const BitVector& b) { return a &= b; }

  bool any() const noexcept {
    return std::any_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w != 0; });
  }
  bool none() const noexcept { return !any(); }

  std::size_t popcount() const noexcept {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  /// Parity of |a AND b|, i.e. the GF(2) inner product.
  bool dot(const BitVector& other) const {
    check_size(other);
    std::uint64_t acc = 0;
    for (std::size_t w = 0; w < words_.size(); ++w) acc ^= words_[w] & other.words_[w];
    return std::popcount(acc) & 1;
  }

  bool intersects(const BitVector& other) const {
    check_size(other);
    for (std::size_t w = 0; w < words_.size(); ++w) {
      if (words_[w] & other.words_[w]) return true;
    }
    return false;
  }

  /// Index of the first set bit at or after `from`, or size() if none.
  std::size_t find_next(std::size_t from) const noexcept {
    if (from >= size_) return size_;
    std::size_t w = from >> 6;
    std::uint64_t word = words_[w] & (~std::uint64_t{0} << (from & 63));
    while (true) {
      if (word != 0) {
        return std::min(size_, (w << 6) + static_cast<std::size_t>(std::countr_zero(word)));
      }
      if (++w >= words_.size()) return size_;
      word = words_[w];
    }
  }
  std::size_t find_first() const noexcept { return find_next(0); }

  std::vector<std::size_t> ones() const {
    std::vector<std::size_t> out;
    for (std::size_t i = find_first(); i < size_; i = find_next(i + 1)) out.push_back(i);
    return out;
  }

  std::string to_string() const {
    std::string s(size_, '0');
    for (std::size_t i = 0; i < size_; ++i) {
      if (get(i)) s[i] = '1';
    }
    return s;
  }

  friend bool operator==(const BitVector&, const BitVector&) = default;
  friend std::strong_ordering operator<=>(const BitVector& a, const BitVector& b) {
    if (auto c = a.size_ <=> b.size_; c != 0) return c;
    return a.words_ <=> b.words_;
  }

  std::size_t hash() const noexcept {
    std::size_t h = std::hash<std::size_t>{}(size_);
    for (auto w : words_) h = h * 0x9E3779B97F4A7C15ull + std::hash<std::uint64_t>{}(w) + (h >> 29);
    return h;
  }

 private:
  void check_size(const BitVector& other) const {
    if (other.size_ != size_) throw std::domain_error("bitstring length mismatch");
  }

  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

struct BitVectorHash {
  std::size_t operator()(const BitVector& v) const noexcept { return v.hash(); }
};

/// Dense GF(2) matrix stored as packed rows.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::size_t rows, std::size_t cols) : cols_(cols), rows_(rows, BitVector(cols)) {}
  explicit BitMatrix(std::size_t cols) : cols_(cols) {}

  static BitMatrix from_rows(std::size_t cols, std::vector<BitVector> rows) {
    BitMatrix m(cols);
    for (auto& r : rows) m.push_row(std::move(r));
    return m;
  }

  static BitMatrix from_strings(std::initializer_list<std::string_view> rows) {
    std::vector<BitVector> out;
    std::size_t cols = rows.size() == 0 ? 0 : rows.begin()->size();
    for (auto r : rows) out.push_back(BitVector::from_string(r));
    return from_rows(cols, std::move(out));
  }

  static BitMatrix identity(std::size_t n) {
    BitMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.rows_[i].set(i);
    return m;
  }

  std::size_t rows() const noexcept { return rows_.size(); }
  std::size_t cols() const noexcept { return cols_; }

  void push_row(BitVector row) {
    if (row.size() != cols_) throw std::domain_error("row length does not match matrix columns");
    rows_.push_back(std::move(row));
  }

  const BitVector& row(std::size_t i) const { return rows_[i]; }
  BitVector& row(std::size_t i) { return rows_[i]; }
  std::span<const BitVector> row_span() const noexcept { return rows_; }

  bool get(std::size_t r, std::size_t c) const { return rows_[r].get(c); }
  void set(std::size_t r, std::size_t c, bool v = true) { rows_[r].set(c, v); }

  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

 private:
  std::size_t cols_ = 0;
  std::vector<BitVector> rows_;
};

namespace detail {

// Forward elimination in place. Pivot on the first nonzero column, taking the
// first available row. With `reduce_above` the result is fully reduced.
// Returns the pivot columns in order; rows [0, pivots.size()) hold the echelon.
inline std::vector<std::size_t> eliminate(std::vector<BitVector>& rows, std::size_t cols,
                                          bool reduce_above) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t col = 0; col < cols && r < rows.size(); ++col) {
    const std::size_t w = col >> 6;
    const std::uint64_t mask = std::uint64_t{1} << (col & 63);
    std::size_t found = rows.size();
    for (std::size_t i = r; i < rows.size(); ++i) {
      if (rows[i].words()[w] & mask) {
        found = i;
        break;
      }
    }
    if (found == rows.size()) continue;
    std::swap(rows[r], rows[found]);
    const auto pivot_words = rows[r].words();
    for (std::size_t i = reduce_above ? 0 : r + 1; i < rows.size(); ++i) {
      if (i == r) continue;
      auto target = rows[i].words();
      if (!(target[w] & mask)) continue;
      // Words before w are already zero in the pivot row.
      for (std::size_t k = w; k < target.size(); ++k) target[k] ^= pivot_words[k];
    }
    pivots.push_back(col);
    ++r;
  }
  return pivots;
}

}  // namespace detail

/// Reduced row-echelon form with zero rows removed.
inline BitMatrix rref(const BitMatrix& m) {
  std::vector<BitVector> rows(m.row_span().begin(), m.row_span().end());
  auto pivots = detail::eliminate(rows, m.cols(), true);
  rows.resize(pivots.size());
  return BitMatrix::from_rows(m.cols(), std::move(rows));
}

inline std::size_t rank(const BitMatrix& m) {
  std::vector<BitVector> rows(m.row_span().begin(), m.row_span().end());
  return detail::eliminate(rows, m.cols(), false).size();
}

inline bool row_space_equal(const BitMatrix& a, const BitMatrix& b) {
  if (a.cols() != b.cols()) throw std::domain_error("row_space_equal: column count mismatch");
  return rref(a) == rref(b);
}

inline bool in_row_space(const BitVector& v, const BitMatrix& m) {
  if (v.size() != m.cols()) throw std::domain_error("in_row_space: vector length mismatch");
  const BitMatrix reduced = rref(m);
  BitVector rest = v;
  for (std::size_t i = 0; i < reduced.rows(); ++i) {
    const std::size_t pivot = reduced.row(i).find_first();
    if (rest.get(pivot)) rest ^= reduced.row(i);
  }
  return rest.none();
}

}  // namespace ergtower

#pragma once

// Exact finite-depth arithmetic over Z_p and F_ell[[t]] (and their fraction
// fields Q_p and F_ell((t))).
//
// Elements are stored as digit expansions x = sum_j x_j t^j over the
// representative set {0, ..., ell-1}, where t is the uniformizer (the prime
// itself in p-adic mode, the indeterminate in power-series mode). Every
// element carries a working depth W: digits of degree < W are exact, degrees
// >= W are unknown. Arithmetic propagates W pessimistically.

#include <cstdint>
#include <iterator>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "kakeya/numeric.hpp"

namespace kakeya {

enum class RingMode { kPadic, kPowerSeries };

using Digit = std::uint32_t;

inline constexpr int kInfiniteValuation = std::numeric_limits<int>::max();

// Largest residue field size accepted; keeps digit convolutions in 64 bits.
inline constexpr std::uint32_t kMaxEll = 1U << 20U;

bool is_prime(std::uint64_t n);

class RingSpec {
 public:
  // Throws InvalidRing unless 2 <= ell <= kMaxEll and ell is prime.
  static RingSpec make(std::uint32_t ell, RingMode mode);
  static RingSpec padic(std::uint32_t ell) { return make(ell, RingMode::kPadic); }
  static RingSpec power_series(std::uint32_t ell) { return make(ell, RingMode::kPowerSeries); }

  std::uint32_t ell() const noexcept { return ell_; }
  RingMode mode() const noexcept { return mode_; }
  bool carries() const noexcept { return mode_ == RingMode::kPadic; }

  // "zp" or "fq", the tag used by the digit-string format and the CLI.
  std::string_view tag() const noexcept { return mode_ == RingMode::kPadic ? "zp" : "fq"; }

  friend bool operator==(const RingSpec&, const RingSpec&) = default;

 private:
  RingSpec(std::uint32_t ell, RingMode mode) : ell_(ell), mode_(mode) {}

  std::uint32_t ell_;
  RingMode mode_;
};

RingMode parse_ring_mode(std::string_view tag);

class Element {
 public:
  using DigitStore = boost::container::small_vector<Digit, 24>;

  // Canonical element from the digit of degree lowest_degree + i at position
  // i. Digits at degree >= depth are dropped. Throws DigitOutOfRange or
  // BadDepth (depth < 1, or depth <= lowest_degree with digits present).
  static Element from_digits(const std::vector<std::int64_t>& digits, int lowest_degree,
                             const RingSpec& ring, int depth);

  static Element zero(const RingSpec& ring, int depth);

  // Image of an integer under Z -> R, known to `depth` digits.
  static Element from_integer(std::int64_t value, const RingSpec& ring, int depth);

  // Inverse of cell_index: the element whose degree-i digit is the i-th
  // base-ell digit of `code`, i < depth. Requires code < ell^depth.
  static Element from_cell_index(std::uint64_t code, const RingSpec& ring, int depth);

  const RingSpec& ring() const noexcept { return ring_; }
  int depth() const noexcept { return depth_; }
  bool is_zero() const noexcept { return digits_.empty(); }
  int valuation() const noexcept { return is_zero() ? kInfiniteValuation : lowest_; }
  // Degree of digits()[0]; 0 for the zero element.
  int lowest_degree() const noexcept { return lowest_; }
  std::span<const Digit> digits() const noexcept { return {digits_.data(), digits_.size()}; }

  // Coefficient of t^degree. Throws BadDepth for degree >= depth().
  Digit digit(int degree) const;

  // ell^{-v}, exactly; 0 for zero.
  Rational norm() const;

  // Representative of the coset mod t^D: digits of degree >= D are zeroed and
  // the depth becomes D. Throws BadDepth if D > depth().
  Element truncate(int D) const;

  // Same digits, new working depth. Lowering truncates; raising asserts that
  // every digit in [depth(), new_depth) is zero (the caller knows the value
  // is a finite expansion).
  Element with_depth(int new_depth) const;

  // Drops negative-degree digits; the result lies in R.
  Element reduce_to_R() const;

  // Positional code sum_{i<D} digit_i ell^i of the depth-D residue cell.
  // Throws NegativeValuation outside R and BadDepth when D > depth().
  std::uint64_t cell_index(int D) const;

  // v(a - b) >= D, compared digit by digit. Both depths must be >= D.
  bool agrees_with(const Element& other, int D) const;

  Element operator-() const;
  friend Element operator+(const Element& a, const Element& b);
  friend Element operator-(const Element& a, const Element& b);
  friend Element operator*(const Element& a, const Element& b);

  // Value and depth equality (the representation is canonical).
  friend bool operator==(const Element& a, const Element& b) {
    return a.ring_ == b.ring_ && a.depth_ == b.depth_ && a.lowest_ == b.lowest_ &&
           a.digits_ == b.digits_;
  }

 private:
  Element(const RingSpec& ring, int lowest, DigitStore digits, int depth);
  void canonicalize();

  RingSpec ring_;
  int lowest_ = 0;
  DigitStore digits_;
  int depth_ = 1;
};

// 1/a for nonzero a known to depth W with valuation v: exact for degrees
// < W - 2v. Throws KakeyaError for zero.
Element reciprocal(const Element& a);

// Digit-string interchange format `<ring>:<ell>:<lowest_degree>:<d0,d1,...>`.
// Emission starts at degree min(v, 0) and lists every exact digit up to
// depth - 1, so parse(emit(a)) == a and outputs at increasing depth are
// textual prefixes of one another.
std::string to_digit_string(const Element& a);
Element parse_digit_string(std::string_view text);

// Lazily generated residue representatives of R / t^D, ordered by cell index.
class ResidueRange {
 public:
  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = Element;
    using difference_type = std::ptrdiff_t;
    using pointer = const Element*;
    using reference = Element;

    iterator() = default;
    Element operator*() const { return Element::from_cell_index(code_, *ring_, depth_); }
    iterator& operator++() {
      ++code_;
      return *this;
    }
    iterator operator++(int) {
      iterator old = *this;
      ++code_;
      return old;
    }
    friend bool operator==(const iterator& a, const iterator& b) { return a.code_ == b.code_; }

   private:
    friend class ResidueRange;
    iterator(const RingSpec* ring, int depth, std::uint64_t code)
        : ring_(ring), depth_(depth), code_(code) {}
    const RingSpec* ring_ = nullptr;
    int depth_ = 0;
    std::uint64_t code_ = 0;
  };

  ResidueRange(const RingSpec& ring, int depth);

  iterator begin() const { return {&ring_, depth_, 0}; }
  iterator end() const { return {&ring_, depth_, count_}; }
  std::uint64_t size() const noexcept { return count_; }

 private:
  RingSpec ring_;
  int depth_;
  std::uint64_t count_;
};

// Exactly ell^D representatives; throws BadDepth for D < 1.
ResidueRange enumerate_residues(const RingSpec& ring, int D);

// ---------------------------------------------------------------------------
// Vectors and matrices. Norms are the maximum entry norm, i.e. the minimum
// entry valuation.

using ElementVector = std::vector<Element>;

int valuation(const ElementVector& v);
Rational norm(const ElementVector& v);
int min_depth(const ElementVector& v);
ElementVector truncate(const ElementVector& v, int D);
ElementVector reduce_to_R(const ElementVector& v);
ElementVector operator+(const ElementVector& a, const ElementVector& b);
ElementVector operator-(const ElementVector& a, const ElementVector& b);

class ElementMatrix {
 public:
  ElementMatrix(std::size_t rows, std::size_t cols, std::vector<Element> row_major);
  static ElementMatrix filled(std::size_t rows, std::size_t cols, const Element& value);
  static ElementMatrix identity(std::size_t n, const RingSpec& ring, int depth);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  const Element& at(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }
  Element& at(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  const std::vector<Element>& entries() const noexcept { return entries_; }

  int valuation() const;
  Rational norm() const;

  friend ElementVector operator*(const ElementMatrix& m, const ElementVector& v);
  friend ElementMatrix operator*(const ElementMatrix& a, const ElementMatrix& b);
  friend ElementMatrix operator+(const ElementMatrix& a, const ElementMatrix& b);

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Element> entries_;
};

}  // namespace kakeya

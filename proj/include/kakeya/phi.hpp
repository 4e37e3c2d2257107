#pragma once

// The universal function phi(x) = sum_k r_k(x) p_k(x) and the digit-shift
// map phi_dh.
//
// p_k(x) keeps the digits of x in degrees [alpha(k), alpha(k+1)) where
// alpha(k) = k(k+1)/2. The matrices r_k run through every q x p matrix of
// locally constant S_k-valued functions, block Omega_1 first, then Omega_2,
// and so on. S_k is the set of K-elements supported on degrees
// [-lambda(k), k] with lambda(k) = floor(log_ell k).

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <vector>

#include "kakeya/numeric.hpp"
#include "kakeya/ring.hpp"

namespace kakeya {

struct PhiConfig {
  RingSpec ring;
  int p_dim = 1;
  int q_dim = 1;
};

std::int64_t alpha(std::int64_t j);

// floor(log_ell k) by comparison against powers of ell. Throws BadIndex for k < 1.
int lambda_floor(std::int64_t k, std::uint32_t ell);

// Valuation floor of the k-th summand's matrix, lambda(max(k, 1)).
inline int summand_lambda(std::int64_t k, std::uint32_t ell) {
  return lambda_floor(k < 1 ? 1 : k, ell);
}

// Digit slice [alpha(j), alpha(j+1)) of each component. Components must lie in
// R and be known to depth >= alpha(j+1) (InsufficientDepth otherwise). The
// result keeps the input's working depth; its digits above the slice are zero.
ElementVector projection(const ElementVector& x, int j);

BigInt sk_size(int k, std::uint32_t ell);

// The S_k element with positional code `index`: digit i of index (base ell)
// is the coefficient of t^{i - lambda(k)}. Index 0 is zero.
Element sk_element(int k, std::uint64_t index, const RingSpec& ring, int depth);

// Every element of S_k in index order. Throws BadDepth when the set does not
// fit in memory-sized counts.
std::vector<Element> sk_elements(int k, const RingSpec& ring, int depth);

// Position of `value` in sk_elements order; NotInSk when its digit support
// leaves [-lambda(k), k].
std::uint64_t sk_index(int k, const Element& value);

BigInt omega_block_size(int k, std::uint32_t ell, int p_dim, int q_dim);

// Enumeration index of the first matrix function of block k.
BigInt omega_block_offset(int k, const PhiConfig& cfg);

// One matrix function r_j. The table assigns an S_k value to each
// (entry, input cell) slot; slot s = entry * cells + cell, entries in
// row-major order, and slot 0 is the most significant base-|S_k| digit of
// the inner index.
class MatrixFn {
 public:
  MatrixFn(const PhiConfig& cfg, int k_block, BigInt inner_index);

  int k_block() const noexcept { return k_block_; }
  const BigInt& inner_index() const noexcept { return inner_index_; }
  int rows() const noexcept { return cfg_.q_dim; }
  int cols() const noexcept { return cfg_.p_dim; }
  std::uint64_t cell_count() const noexcept { return cells_; }

  // Index into S_k of the value at (row, col) on input cell `cell`.
  std::uint64_t value_index(int row, int col, std::uint64_t cell) const;

  // Depth-k cell of x in R^p: sum_c cell_index(x_c, k) * ell^{k c}.
  std::uint64_t input_cell(const ElementVector& x) const;

  friend bool operator==(const MatrixFn& a, const MatrixFn& b) {
    return a.k_block_ == b.k_block_ && a.inner_index_ == b.inner_index_ &&
           a.cfg_.p_dim == b.cfg_.p_dim && a.cfg_.q_dim == b.cfg_.q_dim &&
           a.cfg_.ring == b.cfg_.ring;
  }

 private:
  PhiConfig cfg_;
  int k_block_;
  BigInt inner_index_;
  std::uint64_t cells_;
  std::uint64_t sk_count_;
  std::uint64_t slots_;
  // Materialized slot values when the table is small; otherwise slots are
  // extracted from inner_index_ on demand.
  std::vector<std::uint64_t> table_;
};

MatrixFn decode_matrix_fn(const BigInt& j, const PhiConfig& cfg);

// Table lookup at the depth-k_block cell of x. Entries carry working depth
// `value_depth` (they are exact finite expansions).
ElementMatrix matrix_fn_eval(const MatrixFn& r, const ElementVector& x, int value_depth);
ElementMatrix matrix_fn_eval(const MatrixFn& r, const ElementVector& x);

std::vector<std::uint64_t> matrix_fn_table(const MatrixFn& r);

BigInt index_of_constant_matrix(const ElementMatrix& m, int k, const PhiConfig& cfg);

// Largest k whose summand can still touch a digit below D_out, i.e. the
// largest k with alpha(k) - lambda(max(k, 1)) < D_out.
int last_contributing_summand(int D_out, std::uint32_t ell);

int required_phi_input_depth(int D_out, std::uint32_t ell);

// alpha(N(A)) with N(A) minimal such that alpha(n) - lambda(max(n, 1)) >= A
// for every n >= N(A).
int continuity_modulus(int A, std::uint32_t ell);

// Evaluates phi with a memoized prefix r_0, r_1, ... of the enumeration.
// Safe for concurrent use.
class SawyerPhi {
 public:
  explicit SawyerPhi(const PhiConfig& cfg);

  const PhiConfig& config() const noexcept { return cfg_; }

  // r_k, decoded once.
  const MatrixFn& r(int k) const;

  // phi(x) truncated to D_out digits, each component in R. x may lie in K^p;
  // negative-degree digits are dropped first.
  ElementVector eval(const ElementVector& x, int D_out) const;

  // r_k(x) p_k(x) at working depth `depth` (x already reduced to R).
  ElementVector summand(const ElementVector& x, int k, int depth) const;

  // phi^{(m)}(x) = sum_{k<m} r_k(x) p_k(x) at working depth `depth`.
  ElementVector partial_sum(const ElementVector& x, int m, int depth) const;

  int required_input_depth(int D_out) const {
    return required_phi_input_depth(D_out, cfg_.ring.ell());
  }

 private:
  PhiConfig cfg_;
  mutable std::shared_mutex mutex_;
  mutable std::deque<MatrixFn> cache_;
};

ElementVector phi_eval(const ElementVector& x, const PhiConfig& cfg, int D_out);

// Digit j of the output is 0 when j + 2 is a power of two and digit j + 1 of
// `a` otherwise. Applied digit-wise in both ring modes. Requires a in R known
// to depth D_out + 1.
Element phi_dh_eval(const Element& a, int D_out);

}  // namespace kakeya

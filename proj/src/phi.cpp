#include "kakeya/phi.hpp"

#include <mutex>

#include "kakeya/errors.hpp"

namespace kakeya {

namespace {

constexpr std::uint64_t kEagerTableSlots = 1U << 16U;

std::uint64_t to_u64(const BigInt& value, const char* what) {
  if (value > BigInt(std::numeric_limits<std::uint64_t>::max() >> 1U)) {
    throw BadDepth(std::string(what) + " does not fit in a 63-bit count");
  }
  return static_cast<std::uint64_t>(value);
}

void require_in_R(const Element& e, const char* what) {
  if (e.valuation() < 0) throw NegativeValuation(std::string(what) + " requires an element of R");
}

}  // namespace

std::int64_t alpha(std::int64_t j) {
  if (j < 0) throw BadIndex("alpha is defined for j >= 0");
  return j * (j + 1) / 2;
}

int lambda_floor(std::int64_t k, std::uint32_t ell) {
  if (k < 1) throw BadIndex("lambda is defined for k >= 1, got " + std::to_string(k));
  int count = 0;
  unsigned __int128 power = ell;
  while (power <= static_cast<unsigned __int128>(k)) {
    ++count;
    power *= ell;
  }
  return count;
}

ElementVector projection(const ElementVector& x, int j) {
  const int lo = static_cast<int>(alpha(j));
  const int hi = static_cast<int>(alpha(j + 1));
  ElementVector out;
  out.reserve(x.size());
  for (const auto& c : x) {
    require_in_R(c, "projection");
    if (c.depth() < hi) {
      throw InsufficientDepth("projection p_" + std::to_string(j), hi, c.depth());
    }
    std::vector<std::int64_t> slice;
    slice.reserve(static_cast<std::size_t>(hi - lo));
    for (int deg = lo; deg < hi; ++deg) slice.push_back(c.digit(deg));
    out.push_back(Element::from_digits(slice, lo, c.ring(), c.depth()));
  }
  return out;
}

BigInt sk_size(int k, std::uint32_t ell) {
  return big_pow(ell, static_cast<std::uint64_t>(k + lambda_floor(k, ell) + 1));
}

Element sk_element(int k, std::uint64_t index, const RingSpec& ring, int depth) {
  const int lam = lambda_floor(k, ring.ell());
  const int width = k + lam + 1;
  std::vector<std::int64_t> digits;
  digits.reserve(static_cast<std::size_t>(width));
  for (int i = 0; i < width; ++i) {
    digits.push_back(static_cast<std::int64_t>(index % ring.ell()));
    index /= ring.ell();
  }
  if (index != 0) throw BadIndex("index outside S_" + std::to_string(k));
  return Element::from_digits(digits, -lam, ring, depth);
}

std::vector<Element> sk_elements(int k, const RingSpec& ring, int depth) {
  const std::uint64_t count = to_u64(sk_size(k, ring.ell()), "|S_k|");
  std::vector<Element> out;
  out.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) out.push_back(sk_element(k, i, ring, depth));
  return out;
}

std::uint64_t sk_index(int k, const Element& value) {
  if (value.is_zero()) return 0;
  const std::uint32_t ell = value.ring().ell();
  const int lam = lambda_floor(k, ell);
  const int top = value.lowest_degree() + static_cast<int>(value.digits().size()) - 1;
  if (value.valuation() < -lam || top > k) {
    throw NotInSk("element with digit support [" + std::to_string(value.valuation()) + ", " +
                  std::to_string(top) + "] is not in S_" + std::to_string(k));
  }
  std::uint64_t index = 0;
  for (int deg = top; deg >= -lam; --deg) {
    const long off = static_cast<long>(deg) - value.lowest_degree();
    const Digit d = off >= 0 && off < static_cast<long>(value.digits().size())
                        ? value.digits()[static_cast<std::size_t>(off)]
                        : 0;
    index = index * ell + d;
  }
  return index;
}

BigInt omega_block_size(int k, std::uint32_t ell, int p_dim, int q_dim) {
  if (k < 1) throw BadIndex("Omega blocks start at k = 1");
  const std::uint64_t cells = checked_pow(ell, static_cast<std::uint64_t>(k) * static_cast<std::uint64_t>(p_dim));
  const std::uint64_t slots = cells * static_cast<std::uint64_t>(p_dim) * static_cast<std::uint64_t>(q_dim);
  return boost::multiprecision::pow(sk_size(k, ell), static_cast<unsigned>(slots));
}

BigInt omega_block_offset(int k, const PhiConfig& cfg) {
  BigInt offset = 0;
  for (int i = 1; i < k; ++i) offset += omega_block_size(i, cfg.ring.ell(), cfg.p_dim, cfg.q_dim);
  return offset;
}

MatrixFn::MatrixFn(const PhiConfig& cfg, int k_block, BigInt inner_index)
    : cfg_(cfg), k_block_(k_block), inner_index_(std::move(inner_index)) {
  const std::uint32_t ell = cfg.ring.ell();
  cells_ = checked_pow(ell, static_cast<std::uint64_t>(k_block) * static_cast<std::uint64_t>(cfg.p_dim));
  sk_count_ = to_u64(sk_size(k_block, ell), "|S_k|");
  slots_ = cells_ * static_cast<std::uint64_t>(cfg.p_dim) * static_cast<std::uint64_t>(cfg.q_dim);
  if (inner_index_ < 0) throw BadIndex("negative enumeration index");
  if (slots_ <= kEagerTableSlots) {
    table_.assign(slots_, 0);
    BigInt rest = inner_index_;
    for (std::uint64_t s = slots_; s-- > 0;) {
      table_[s] = static_cast<std::uint64_t>(rest % sk_count_);
      rest /= sk_count_;
    }
    if (rest != 0) throw BadIndex("inner index exceeds the size of block " + std::to_string(k_block));
  }
}

std::uint64_t MatrixFn::value_index(int row, int col, std::uint64_t cell) const {
  const std::uint64_t entry = static_cast<std::uint64_t>(row) * static_cast<std::uint64_t>(cfg_.p_dim) +
                              static_cast<std::uint64_t>(col);
  const std::uint64_t slot = entry * cells_ + cell;
  if (!table_.empty()) return table_[slot];
  const BigInt scale = big_pow(sk_count_, slots_ - 1 - slot);
  return static_cast<std::uint64_t>((inner_index_ / scale) % sk_count_);
}

std::uint64_t MatrixFn::input_cell(const ElementVector& x) const {
  if (static_cast<int>(x.size()) != cfg_.p_dim) throw KakeyaError("input dimension mismatch");
  std::uint64_t cell = 0;
  const std::uint64_t stride = checked_pow(cfg_.ring.ell(), static_cast<std::uint64_t>(k_block_));
  for (std::size_t c = x.size(); c-- > 0;) {
    require_in_R(x[c], "matrix function evaluation");
    if (x[c].depth() < k_block_) {
      throw InsufficientDepth("matrix function of block " + std::to_string(k_block_), k_block_,
                              x[c].depth());
    }
    cell = cell * stride + x[c].cell_index(k_block_);
  }
  return cell;
}

MatrixFn decode_matrix_fn(const BigInt& j, const PhiConfig& cfg) {
  if (j < 0) throw BadIndex("negative enumeration index");
  BigInt offset = 0;
  for (int k = 1;; ++k) {
    const BigInt size = omega_block_size(k, cfg.ring.ell(), cfg.p_dim, cfg.q_dim);
    if (j < offset + size) return MatrixFn(cfg, k, j - offset);
    offset += size;
  }
}

ElementMatrix matrix_fn_eval(const MatrixFn& r, const ElementVector& x, int value_depth) {
  const std::uint64_t cell = r.input_cell(x);
  const RingSpec& ring = x.front().ring();
  std::vector<Element> entries;
  entries.reserve(static_cast<std::size_t>(r.rows() * r.cols()));
  for (int row = 0; row < r.rows(); ++row) {
    for (int col = 0; col < r.cols(); ++col) {
      entries.push_back(sk_element(r.k_block(), r.value_index(row, col, cell), ring, value_depth));
    }
  }
  return ElementMatrix(static_cast<std::size_t>(r.rows()), static_cast<std::size_t>(r.cols()),
                       std::move(entries));
}

ElementMatrix matrix_fn_eval(const MatrixFn& r, const ElementVector& x) {
  return matrix_fn_eval(r, x, min_depth(x));
}

std::vector<std::uint64_t> matrix_fn_table(const MatrixFn& r) {
  std::vector<std::uint64_t> out;
  out.reserve(static_cast<std::size_t>(r.cell_count()) * static_cast<std::size_t>(r.rows() * r.cols()));
  for (int row = 0; row < r.rows(); ++row) {
    for (int col = 0; col < r.cols(); ++col) {
      for (std::uint64_t cell = 0; cell < r.cell_count(); ++cell) out.push_back(r.value_index(row, col, cell));
    }
  }
  return out;
}

BigInt index_of_constant_matrix(const ElementMatrix& m, int k, const PhiConfig& cfg) {
  if (static_cast<int>(m.rows()) != cfg.q_dim || static_cast<int>(m.cols()) != cfg.p_dim) {
    throw KakeyaError("constant matrix must be q x p");
  }
  const std::uint32_t ell = cfg.ring.ell();
  const BigInt base = sk_size(k, ell);
  const std::uint64_t cells = checked_pow(ell, static_cast<std::uint64_t>(k) * static_cast<std::uint64_t>(cfg.p_dim));
  BigInt inner = 0;
  for (const auto& entry : m.entries()) {
    const std::uint64_t idx = sk_index(k, entry);
    for (std::uint64_t cell = 0; cell < cells; ++cell) inner = inner * base + idx;
  }
  return omega_block_offset(k, cfg) + inner;
}

int last_contributing_summand(int D_out, std::uint32_t ell) {
  if (D_out < 1) throw BadDepth("output depth must be at least 1");
  int k = 0;
  while (alpha(k + 1) - summand_lambda(k + 1, ell) < D_out) ++k;
  return k;
}

int required_phi_input_depth(int D_out, std::uint32_t ell) {
  return static_cast<int>(alpha(last_contributing_summand(D_out, ell) + 1));
}

int continuity_modulus(int A, std::uint32_t ell) {
  if (A < 1) throw BadIndex("continuity modulus needs A >= 1");
  // alpha(n) - lambda(n) is nondecreasing: alpha grows by n + 1 per step,
  // lambda by at most 1. So the first n that reaches A works for all larger n.
  int n = 0;
  while (alpha(n) - summand_lambda(n, ell) < A) ++n;
  return static_cast<int>(alpha(n));
}

SawyerPhi::SawyerPhi(const PhiConfig& cfg) : cfg_(cfg) {
  if (cfg.p_dim < 1 || cfg.q_dim < 1) throw KakeyaError("phi dimensions must be positive");
}

const MatrixFn& SawyerPhi::r(int k) const {
  {
    std::shared_lock lock(mutex_);
    if (static_cast<std::size_t>(k) < cache_.size()) return cache_[static_cast<std::size_t>(k)];
  }
  std::unique_lock lock(mutex_);
  while (cache_.size() <= static_cast<std::size_t>(k)) {
    cache_.push_back(decode_matrix_fn(BigInt(cache_.size()), cfg_));
  }
  return cache_[static_cast<std::size_t>(k)];
}

ElementVector SawyerPhi::summand(const ElementVector& x, int k, int depth) const {
  const MatrixFn& rk = r(k);
  // Both factors are finite expansions, so they can be carried at any depth;
  // the extra lambda digits absorb the negative valuation of the table values.
  const int work = depth + lambda_floor(rk.k_block(), cfg_.ring.ell()) + 1;
  const ElementMatrix values = matrix_fn_eval(rk, x, work);
  ElementVector slice = projection(x, k);
  for (auto& e : slice) e = e.with_depth(work);
  ElementVector term = values * slice;
  return truncate(term, depth);
}

ElementVector SawyerPhi::partial_sum(const ElementVector& x, int m, int depth) const {
  ElementVector acc(static_cast<std::size_t>(cfg_.q_dim), Element::zero(cfg_.ring, depth));
  for (int k = 0; k < m; ++k) acc = acc + summand(x, k, depth);
  return acc;
}

ElementVector SawyerPhi::eval(const ElementVector& x, int D_out) const {
  if (static_cast<int>(x.size()) != cfg_.p_dim) throw KakeyaError("phi input dimension mismatch");
  const ElementVector xr = reduce_to_R(x);
  const int need = required_input_depth(D_out);
  const int have = min_depth(xr);
  if (have < need) throw InsufficientDepth("phi evaluation", need, have);
  const int last = last_contributing_summand(D_out, cfg_.ring.ell());
  return partial_sum(xr, last + 1, D_out);
}

ElementVector phi_eval(const ElementVector& x, const PhiConfig& cfg, int D_out) {
  return SawyerPhi(cfg).eval(x, D_out);
}

Element phi_dh_eval(const Element& a, int D_out) {
  if (D_out < 1) throw BadDepth("output depth must be at least 1");
  require_in_R(a, "phi_dh_eval");
  if (a.depth() < D_out + 1) throw InsufficientDepth("phi_dh_eval", D_out + 1, a.depth());
  std::vector<std::int64_t> out(static_cast<std::size_t>(D_out), 0);
  for (int j = 0; j < D_out; ++j) {
    const auto shifted = static_cast<std::uint64_t>(j) + 2;
    const bool power_of_two = (shifted & (shifted - 1)) == 0;
    if (!power_of_two) out[static_cast<std::size_t>(j)] = a.digit(j + 1);
  }
  return Element::from_digits(out, 0, a.ring(), D_out);
}

}  // namespace kakeya

#include "kakeya/ring.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <sstream>

#include "kakeya/errors.hpp"

namespace kakeya {

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

RingSpec RingSpec::make(std::uint32_t ell, RingMode mode) {
  if (ell < 2 || ell > kMaxEll || !is_prime(ell)) {
    throw InvalidRing("residue field size must be a prime in [2, " + std::to_string(kMaxEll) +
                      "], got " + std::to_string(ell));
  }
  return RingSpec(ell, mode);
}

RingMode parse_ring_mode(std::string_view tag) {
  if (tag == "zp") return RingMode::kPadic;
  if (tag == "fq") return RingMode::kPowerSeries;
  throw ParseError("unknown ring '" + std::string(tag) + "' (expected zp or fq)");
}

Element::Element(const RingSpec& ring, int lowest, DigitStore digits, int depth)
    : ring_(ring), lowest_(lowest), digits_(std::move(digits)), depth_(depth) {
  canonicalize();
}

void Element::canonicalize() {
  // drop digits at or beyond the working depth
  const long keep = static_cast<long>(depth_) - lowest_;
  if (keep <= 0) {
    digits_.clear();
  } else if (static_cast<long>(digits_.size()) > keep) {
    digits_.resize(static_cast<std::size_t>(keep));
  }
  while (!digits_.empty() && digits_.back() == 0) digits_.pop_back();
  std::size_t lead = 0;
  while (lead < digits_.size() && digits_[lead] == 0) ++lead;
  if (lead > 0) {
    digits_.erase(digits_.begin(), digits_.begin() + static_cast<long>(lead));
    lowest_ += static_cast<int>(lead);
  }
  if (digits_.empty()) lowest_ = 0;
}

Element Element::from_digits(const std::vector<std::int64_t>& digits, int lowest_degree,
                             const RingSpec& ring, int depth) {
  if (depth < 1) throw BadDepth("working depth must be positive, got " + std::to_string(depth));
  DigitStore store;
  store.reserve(digits.size());
  for (std::int64_t d : digits) {
    if (d < 0 || d >= static_cast<std::int64_t>(ring.ell())) {
      throw DigitOutOfRange("digit " + std::to_string(d) + " outside [0, " +
                            std::to_string(ring.ell()) + ")");
    }
    store.push_back(static_cast<Digit>(d));
  }
  if (!digits.empty() && depth <= lowest_degree) {
    throw BadDepth("working depth " + std::to_string(depth) + " must exceed lowest degree " +
                   std::to_string(lowest_degree));
  }
  if (digits.empty()) lowest_degree = 0;
  return Element(ring, lowest_degree, std::move(store), depth);
}

Element Element::zero(const RingSpec& ring, int depth) { return Element(ring, 0, {}, depth); }

Element Element::from_integer(std::int64_t value, const RingSpec& ring, int depth) {
  const std::uint64_t ell = ring.ell();
  if (!ring.carries()) {
    std::int64_t r = value % static_cast<std::int64_t>(ell);
    if (r < 0) r += static_cast<std::int64_t>(ell);
    return Element(ring, 0, {static_cast<Digit>(r)}, depth);
  }
  const bool negative = value < 0;
  std::uint64_t magnitude =
      negative ? static_cast<std::uint64_t>(-(value + 1)) + 1 : static_cast<std::uint64_t>(value);
  DigitStore store;
  for (int i = 0; i < depth && magnitude != 0; ++i) {
    store.push_back(static_cast<Digit>(magnitude % ell));
    magnitude /= ell;
  }
  Element e(ring, 0, std::move(store), depth);
  return negative ? -e : e;
}

Element Element::from_cell_index(std::uint64_t code, const RingSpec& ring, int depth) {
  if (depth < 1) throw BadDepth("cell depth must be positive");
  const std::uint64_t ell = ring.ell();
  DigitStore store;
  for (int i = 0; i < depth && code != 0; ++i) {
    store.push_back(static_cast<Digit>(code % ell));
    code /= ell;
  }
  if (code != 0) throw BadDepth("cell index out of range for depth " + std::to_string(depth));
  return Element(ring, 0, std::move(store), depth);
}

Digit Element::digit(int degree) const {
  if (degree >= depth_) {
    throw BadDepth("digit of degree " + std::to_string(degree) + " is beyond working depth " +
                   std::to_string(depth_));
  }
  const long offset = static_cast<long>(degree) - lowest_;
  if (offset < 0 || offset >= static_cast<long>(digits_.size())) return 0;
  return digits_[static_cast<std::size_t>(offset)];
}

Rational Element::norm() const {
  if (is_zero()) return Rational(0);
  return rational_pow(ring_.ell(), -static_cast<std::int64_t>(lowest_));
}

Element Element::truncate(int D) const {
  if (D > depth_) {
    throw BadDepth("cannot truncate to depth " + std::to_string(D) + " beyond working depth " +
                   std::to_string(depth_));
  }
  return Element(ring_, lowest_, digits_, D);
}

Element Element::with_depth(int new_depth) const { return Element(ring_, lowest_, digits_, new_depth); }

Element Element::reduce_to_R() const {
  if (is_zero() || lowest_ >= 0) return *this;
  const long drop = -static_cast<long>(lowest_);
  if (drop >= static_cast<long>(digits_.size())) return Element(ring_, 0, {}, depth_);
  DigitStore rest(digits_.begin() + drop, digits_.end());
  return Element(ring_, 0, std::move(rest), depth_);
}

std::uint64_t Element::cell_index(int D) const {
  if (valuation() < 0) throw NegativeValuation("cell_index requires an element of R");
  if (D > depth_) {
    throw BadDepth("cell depth " + std::to_string(D) + " exceeds working depth " +
                   std::to_string(depth_));
  }
  const std::uint64_t ell = ring_.ell();
  if (static_cast<std::uint64_t>(std::max(D, 0)) * std::bit_width(ell) > 63) {
    checked_pow(ell, static_cast<std::uint64_t>(D));
  }
  std::uint64_t code = 0;
  // digits_[i] has degree lowest_ + i >= 0
  const long top = std::min<long>(static_cast<long>(digits_.size()), static_cast<long>(D) - lowest_);
  for (long i = top - 1; i >= 0; --i) {
    code = code * ell + digits_[static_cast<std::size_t>(i)];
  }
  for (int deg = lowest_; deg > 0; --deg) code *= ell;
  return is_zero() ? 0 : code;
}

bool Element::agrees_with(const Element& other, int D) const {
  if (!(ring_ == other.ring_)) throw RingMismatch("comparing elements of different rings");
  if (D > depth_ || D > other.depth_) throw BadDepth("comparison depth exceeds working depth");
  const int lo = std::min(is_zero() ? D : lowest_, other.is_zero() ? D : other.lowest_);
  for (int deg = lo; deg < D; ++deg) {
    if (digit(deg) != other.digit(deg)) return false;
  }
  return true;
}

Element Element::operator-() const {
  if (is_zero()) return *this;
  const Digit ell = ring_.ell();
  if (!ring_.carries()) {
    DigitStore out(digits_.size());
    for (std::size_t i = 0; i < digits_.size(); ++i) out[i] = digits_[i] == 0 ? 0 : ell - digits_[i];
    return Element(ring_, lowest_, std::move(out), depth_);
  }
  // ell-adic complement: the lowest nonzero digit d becomes ell - d and every
  // digit above it (up to the working depth) becomes ell - 1 - d.
  const long n = static_cast<long>(depth_) - lowest_;
  DigitStore out(static_cast<std::size_t>(n));
  out[0] = ell - digits_[0];
  for (long i = 1; i < n; ++i) {
    const Digit d = i < static_cast<long>(digits_.size()) ? digits_[static_cast<std::size_t>(i)] : 0;
    out[static_cast<std::size_t>(i)] = ell - 1 - d;
  }
  return Element(ring_, lowest_, std::move(out), depth_);
}

namespace {

void require_same_ring(const Element& a, const Element& b) {
  if (!(a.ring() == b.ring())) throw RingMismatch("operands belong to different rings");
}

// Binary digits packed into one word, digit i at bit i.
std::uint64_t pack_bits(std::span<const Digit> digits) {
  std::uint64_t w = 0;
  for (std::size_t i = 0; i < digits.size(); ++i) w |= static_cast<std::uint64_t>(digits[i]) << i;
  return w;
}

std::uint64_t carryless_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  while (b != 0) {
    const int i = std::countr_zero(b);
    r ^= a << i;
    b &= b - 1;
  }
  return r;
}

Element::DigitStore unpack_bits(std::uint64_t w, std::size_t n) {
  Element::DigitStore out(n, 0);
  for (std::size_t k = 0; k < n && k < 64; ++k) out[k] = static_cast<Digit>((w >> k) & 1U);
  return out;
}

}  // namespace

Element operator+(const Element& a, const Element& b) {
  require_same_ring(a, b);
  const int depth = std::min(a.depth_, b.depth_);
  if (a.is_zero()) return b.with_depth(depth);
  if (b.is_zero()) return a.with_depth(depth);
  const int lo = std::min(a.lowest_, b.lowest_);
  if (lo >= depth) return Element::zero(a.ring_, depth);
  const auto n = static_cast<std::size_t>(depth - lo);
  const Digit ell = a.ring_.ell();
  const auto off_a = static_cast<std::size_t>(a.lowest_ - lo);
  const auto off_b = static_cast<std::size_t>(b.lowest_ - lo);
  if (ell == 2 && off_a + a.digits_.size() <= 62 && off_b + b.digits_.size() <= 62) {
    const std::uint64_t x = pack_bits(a.digits()) << off_a;
    const std::uint64_t y = pack_bits(b.digits()) << off_b;
    return Element(a.ring_, lo, unpack_bits(a.ring_.carries() ? x + y : x ^ y, n), depth);
  }
  Element::DigitStore out(n, 0);
  const auto add_in = [&](const Element& e) {
    const auto off = static_cast<std::size_t>(e.lowest_ - lo);
    for (std::size_t i = 0; i < e.digits_.size() && off + i < n; ++i) out[off + i] += e.digits_[i];
  };
  add_in(a);
  add_in(b);
  if (a.ring_.carries()) {
    Digit carry = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const Digit s = out[i] + carry;
      carry = s >= ell ? 1 : 0;
      out[i] = s - carry * ell;
    }
  } else {
    for (auto& d : out) {
      if (d >= ell) d -= ell;
    }
  }
  return Element(a.ring_, lo, std::move(out), depth);
}

Element operator-(const Element& a, const Element& b) { return a + (-b); }

Element operator*(const Element& a, const Element& b) {
  require_same_ring(a, b);
  // A zero operand is only known to be divisible by t^depth.
  const long va = a.is_zero() ? a.depth_ : a.lowest_;
  const long vb = b.is_zero() ? b.depth_ : b.lowest_;
  const long depth_l = std::min(static_cast<long>(a.depth_) + vb, static_cast<long>(b.depth_) + va);
  const int depth = static_cast<int>(depth_l);
  if (a.is_zero() || b.is_zero()) return Element::zero(a.ring_, depth);
  const int lo = a.lowest_ + b.lowest_;
  if (lo >= depth) return Element::zero(a.ring_, depth);
  const auto n = static_cast<std::size_t>(depth - lo);
  const std::uint64_t ell = a.ring_.ell();
  if (ell == 2 && a.digits_.size() <= 32 && b.digits_.size() <= 32) {
    const std::uint64_t x = pack_bits(a.digits());
    const std::uint64_t y = pack_bits(b.digits());
    return Element(a.ring_, lo, unpack_bits(a.ring_.carries() ? x * y : carryless_mul(x, y), n), depth);
  }
  boost::container::small_vector<std::uint64_t, 48> acc(n, 0);
  const std::size_t na = std::min(a.digits_.size(), n);
  for (std::size_t i = 0; i < na; ++i) {
    const std::uint64_t ai = a.digits_[i];
    if (ai == 0) continue;
    const std::size_t nb = std::min(b.digits_.size(), n - i);
    for (std::size_t j = 0; j < nb; ++j) acc[i + j] += ai * b.digits_[j];
  }
  Element::DigitStore out(n);
  if (a.ring_.carries() && ell == 2) {
    std::uint64_t carry = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const std::uint64_t s = acc[k] + carry;
      out[k] = static_cast<Digit>(s & 1U);
      carry = s >> 1U;
    }
  } else if (a.ring_.carries()) {
    std::uint64_t carry = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const std::uint64_t s = acc[k] + carry;
      out[k] = static_cast<Digit>(s % ell);
      carry = s / ell;
    }
  } else if (ell == 2) {
    for (std::size_t k = 0; k < n; ++k) out[k] = static_cast<Digit>(acc[k] & 1U);
  } else {
    for (std::size_t k = 0; k < n; ++k) out[k] = static_cast<Digit>(acc[k] % ell);
  }
  return Element(a.ring_, lo, std::move(out), depth);
}

Element reciprocal(const Element& a) {
  if (a.is_zero()) throw KakeyaError("zero has no reciprocal");
  const RingSpec& ring = a.ring();
  const int v = a.valuation();
  const int unit_depth = a.depth() - v;
  if (unit_depth - v < 1) throw InsufficientDepth("reciprocal", 2 * v + 1, a.depth());
  // u = a / t^v, a unit known to unit_depth digits
  std::vector<std::int64_t> unit_digits(a.digits().begin(), a.digits().end());
  const Element u = Element::from_digits(unit_digits, 0, ring, unit_depth);
  const std::uint64_t ell = ring.ell();
  std::uint64_t inv0 = 1;
  {
    std::uint64_t base = a.digits()[0] % ell;
    std::uint64_t e = ell - 2;
    while (e > 0) {
      if (e & 1U) inv0 = inv0 * base % ell;
      base = base * base % ell;
      e >>= 1U;
    }
  }
  // Newton iteration b <- b (2 - u b) doubles the number of correct digits.
  Element b = Element::from_integer(static_cast<std::int64_t>(inv0), ring, 1);
  int known = 1;
  while (known < unit_depth) {
    const int next = std::min(2 * known, unit_depth);
    const Element bb = b.with_depth(next);
    const Element two = Element::from_integer(2, ring, next);
    b = (bb * (two - u.truncate(next) * bb)).with_depth(next);
    known = next;
  }
  std::vector<std::int64_t> inv_digits(b.digits().begin(), b.digits().end());
  return Element::from_digits(inv_digits, b.lowest_degree() - v, ring, unit_depth - v);
}

std::string to_digit_string(const Element& a) {
  const int depth = a.depth();
  const int lowest = a.is_zero() ? std::min(0, depth - 1) : std::min(a.valuation(), 0);
  std::ostringstream out;
  out << a.ring().tag() << ':' << a.ring().ell() << ':' << lowest << ':';
  for (int deg = lowest; deg < depth; ++deg) {
    if (deg != lowest) out << ',';
    out << a.digit(deg);
  }
  return out.str();
}

namespace {

std::int64_t parse_int(std::string_view field, std::string_view whole) {
  std::int64_t value = 0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && field[0] == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc() || ptr != last) {
    throw ParseError("malformed digit string '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

Element parse_digit_string(std::string_view text) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (int i = 0; i < 3; ++i) {
    const auto colon = text.find(':', start);
    if (colon == std::string_view::npos) {
      throw ParseError("malformed digit string '" + std::string(text) + "'");
    }
    fields.push_back(text.substr(start, colon - start));
    start = colon + 1;
  }
  const std::string_view digit_list = text.substr(start);
  const RingMode mode = parse_ring_mode(fields[0]);
  const std::int64_t ell = parse_int(fields[1], text);
  if (ell < 2 || ell > static_cast<std::int64_t>(kMaxEll)) {
    throw ParseError("bad residue field size in '" + std::string(text) + "'");
  }
  RingSpec ring = [&] {
    try {
      return RingSpec::make(static_cast<std::uint32_t>(ell), mode);
    } catch (const InvalidRing& e) {
      throw ParseError(e.what());
    }
  }();
  const std::int64_t lowest = parse_int(fields[2], text);
  if (digit_list.empty()) throw ParseError("digit string '" + std::string(text) + "' has no digits");
  std::vector<std::int64_t> digits;
  std::size_t pos = 0;
  while (true) {
    const auto comma = digit_list.find(',', pos);
    digits.push_back(parse_int(digit_list.substr(pos, comma - pos), text));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  const std::int64_t depth = lowest + static_cast<std::int64_t>(digits.size());
  if (lowest < -(1 << 24) || depth > (1 << 24)) {
    throw ParseError("degree range out of bounds in '" + std::string(text) + "'");
  }
  if (depth < 1) {
    throw ParseError("digit string '" + std::string(text) + "' must reach degree 0");
  }
  try {
    return Element::from_digits(digits, static_cast<int>(lowest), ring, static_cast<int>(depth));
  } catch (const DigitOutOfRange& e) {
    throw ParseError(e.what());
  }
}

ResidueRange::ResidueRange(const RingSpec& ring, int depth)
    : ring_(ring), depth_(depth), count_(checked_pow(ring.ell(), static_cast<std::uint64_t>(depth))) {}

ResidueRange enumerate_residues(const RingSpec& ring, int D) {
  if (D < 1) throw BadDepth("residue enumeration depth must be at least 1");
  return ResidueRange(ring, D);
}

// ---------------------------------------------------------------------------

int valuation(const ElementVector& v) {
  int best = kInfiniteValuation;
  for (const auto& e : v) best = std::min(best, e.valuation());
  return best;
}

Rational norm(const ElementVector& v) {
  Rational best = 0;
  for (const auto& e : v) best = std::max(best, e.norm());
  return best;
}

int min_depth(const ElementVector& v) {
  int best = std::numeric_limits<int>::max();
  for (const auto& e : v) best = std::min(best, e.depth());
  return best;
}

ElementVector truncate(const ElementVector& v, int D) {
  ElementVector out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(e.truncate(D));
  return out;
}

ElementVector reduce_to_R(const ElementVector& v) {
  ElementVector out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(e.reduce_to_R());
  return out;
}

namespace {

void require_same_size(std::size_t a, std::size_t b) {
  if (a != b) throw KakeyaError("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

}  // namespace

ElementVector operator+(const ElementVector& a, const ElementVector& b) {
  require_same_size(a.size(), b.size());
  ElementVector out;
  out.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(a[i] + b[i]);
  return out;
}

ElementVector operator-(const ElementVector& a, const ElementVector& b) {
  require_same_size(a.size(), b.size());
  ElementVector out;
  out.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(a[i] - b[i]);
  return out;
}

ElementMatrix::ElementMatrix(std::size_t rows, std::size_t cols, std::vector<Element> row_major)
    : rows_(rows), cols_(cols), entries_(std::move(row_major)) {
  require_same_size(rows * cols, entries_.size());
}

ElementMatrix ElementMatrix::filled(std::size_t rows, std::size_t cols, const Element& value) {
  return ElementMatrix(rows, cols, std::vector<Element>(rows * cols, value));
}

ElementMatrix ElementMatrix::identity(std::size_t n, const RingSpec& ring, int depth) {
  ElementMatrix m = filled(n, n, Element::zero(ring, depth));
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = Element::from_integer(1, ring, depth);
  return m;
}

int ElementMatrix::valuation() const {
  int best = kInfiniteValuation;
  for (const auto& e : entries_) best = std::min(best, e.valuation());
  return best;
}

Rational ElementMatrix::norm() const {
  Rational best = 0;
  for (const auto& e : entries_) best = std::max(best, e.norm());
  return best;
}

ElementVector operator*(const ElementMatrix& m, const ElementVector& v) {
  require_same_size(m.cols_, v.size());
  ElementVector out;
  out.reserve(m.rows_);
  for (std::size_t r = 0; r < m.rows_; ++r) {
    Element acc = m.at(r, 0) * v[0];
    for (std::size_t c = 1; c < m.cols_; ++c) acc = acc + m.at(r, c) * v[c];
    out.push_back(std::move(acc));
  }
  return out;
}

ElementMatrix operator*(const ElementMatrix& a, const ElementMatrix& b) {
  require_same_size(a.cols_, b.rows_);
  std::vector<Element> out;
  out.reserve(a.rows_ * b.cols_);
  for (std::size_t r = 0; r < a.rows_; ++r) {
    for (std::size_t c = 0; c < b.cols_; ++c) {
      Element acc = a.at(r, 0) * b.at(0, c);
      for (std::size_t k = 1; k < a.cols_; ++k) acc = acc + a.at(r, k) * b.at(k, c);
      out.push_back(std::move(acc));
    }
  }
  return ElementMatrix(a.rows_, b.cols_, std::move(out));
}

ElementMatrix operator+(const ElementMatrix& a, const ElementMatrix& b) {
  require_same_size(a.rows_, b.rows_);
  require_same_size(a.cols_, b.cols_);
  std::vector<Element> out;
  out.reserve(a.entries_.size());
  for (std::size_t i = 0; i < a.entries_.size(); ++i) out.push_back(a.entries_[i] + b.entries_[i]);
  return ElementMatrix(a.rows_, a.cols_, std::move(out));
}

}  // namespace kakeya

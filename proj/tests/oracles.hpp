#pragma once

// Independent reference arithmetic used by the tests. Nothing here calls the
// library's arithmetic; elements are only converted to and from plain digit
// vectors.

#include <cstdint>
#include <vector>

#include "kakeya/ring.hpp"

namespace kakeya::oracle {

// Digits of degrees [0, D) of an element of R.
inline std::vector<std::uint32_t> digits_of(const Element& e, int D) {
  std::vector<std::uint32_t> out(static_cast<std::size_t>(D), 0);
  for (std::size_t i = 0; i < e.digits().size(); ++i) {
    const long deg = e.lowest_degree() + static_cast<long>(i);
    if (deg >= 0 && deg < D) out[static_cast<std::size_t>(deg)] = e.digits()[i];
  }
  return out;
}

inline std::uint64_t integer_of(const std::vector<std::uint32_t>& digits, std::uint64_t ell) {
  std::uint64_t value = 0;
  for (std::size_t i = digits.size(); i-- > 0;) value = value * ell + digits[i];
  return value;
}

inline std::vector<std::int64_t> base_digits(std::uint64_t value, std::uint64_t ell, int D) {
  std::vector<std::int64_t> out(static_cast<std::size_t>(D));
  for (auto& d : out) {
    d = static_cast<std::int64_t>(value % ell);
    value /= ell;
  }
  return out;
}

inline std::uint64_t ipow(std::uint64_t base, int e) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

// Truncated polynomial arithmetic over F_ell, coefficient vectors of length D.
inline std::vector<std::uint32_t> poly_add(const std::vector<std::uint32_t>& a,
                                           const std::vector<std::uint32_t>& b, std::uint32_t ell) {
  std::vector<std::uint32_t> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] + b[i]) % ell;
  return out;
}

inline std::vector<std::uint32_t> poly_mul(const std::vector<std::uint32_t>& a,
                                           const std::vector<std::uint32_t>& b, std::uint32_t ell) {
  std::vector<std::uint32_t> out(a.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; i + j < a.size(); ++j) out[i + j] = (out[i + j] + a[i] * b[j]) % ell;
  }
  return out;
}

// floor(log_ell k) by repeated division, independent of the library's
// power-comparison loop.
inline int log_floor(std::uint64_t k, std::uint64_t ell) {
  int n = 0;
  while (k >= ell) {
    k /= ell;
    ++n;
  }
  return n;
}

}  // namespace kakeya::oracle

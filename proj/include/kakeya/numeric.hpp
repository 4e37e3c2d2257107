#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace kakeya {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// ell^exponent for exponent >= 0.
BigInt big_pow(std::uint64_t base, std::uint64_t exponent);

// ell^exponent as an exact rational; negative exponents give 1/ell^-exponent.
Rational rational_pow(std::uint64_t base, std::int64_t exponent);

// base^exponent if it fits in 63 bits, otherwise throws BadDepth.
std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exponent);

// "num/den" in lowest terms ("0/1" for zero, "3/1" for integers).
std::string to_fraction_string(const Rational& r);

// Fixed-point rendering with `places` digits after the point, rounded half
// away from zero.
std::string to_decimal_string(const Rational& r, int places = 6);

// Accepts "a", "a/b", or a plain decimal like "0.1". Throws ParseError.
Rational parse_rational(std::string_view text);

// Floor of a rational as a signed 64-bit integer.
std::int64_t floor_to_int(const Rational& r);

}  // namespace kakeya

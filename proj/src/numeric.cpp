#include "kakeya/numeric.hpp"

#include <cctype>
#include <limits>

#include "kakeya/errors.hpp"

namespace kakeya {

BigInt big_pow(std::uint64_t base, std::uint64_t exponent) {
  BigInt result = 1;
  BigInt b = base;
  while (exponent > 0) {
    if (exponent & 1U) result *= b;
    exponent >>= 1U;
    if (exponent > 0) b *= b;
  }
  return result;
}

Rational rational_pow(std::uint64_t base, std::int64_t exponent) {
  if (exponent >= 0) return Rational(big_pow(base, static_cast<std::uint64_t>(exponent)));
  return Rational(BigInt(1), big_pow(base, static_cast<std::uint64_t>(-exponent)));
}

std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exponent) {
  constexpr std::uint64_t kLimit = std::numeric_limits<std::uint64_t>::max() >> 1U;
  std::uint64_t result = 1;
  for (std::uint64_t i = 0; i < exponent; ++i) {
    if (base != 0 && result > kLimit / base) {
      throw BadDepth(std::to_string(base) + "^" + std::to_string(exponent) +
                     " does not fit in a 63-bit index");
    }
    result *= base;
  }
  return result;
}

std::string to_fraction_string(const Rational& r) {
  return boost::multiprecision::numerator(r).str() + "/" +
         boost::multiprecision::denominator(r).str();
}

std::string to_decimal_string(const Rational& r, int places) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  const bool negative = num < 0;
  const BigInt scale = big_pow(10, static_cast<std::uint64_t>(places));
  const BigInt magnitude = negative ? BigInt(-num) : num;
  // round half away from zero: floor((2*|n|*scale + den) / (2*den))
  BigInt scaled = (2 * magnitude * scale + den) / (2 * den);
  const BigInt whole = scaled / scale;
  const BigInt frac = scaled % scale;
  std::string frac_text = frac.str();
  if (static_cast<int>(frac_text.size()) < places) {
    frac_text.insert(0, static_cast<std::size_t>(places) - frac_text.size(), '0');
  }
  std::string out;
  if (negative && scaled != 0) out += '-';
  out += whole.str();
  if (places > 0) {
    out += '.';
    out += frac_text;
  }
  return out;
}

namespace {

BigInt parse_integer(std::string_view text, std::string_view whole) {
  if (text.empty()) throw ParseError("empty number in '" + std::string(whole) + "'");
  std::size_t i = 0;
  bool negative = false;
  if (text[0] == '-' || text[0] == '+') {
    negative = text[0] == '-';
    i = 1;
  }
  if (i == text.size()) throw ParseError("bad number '" + std::string(whole) + "'");
  BigInt value = 0;
  for (; i < text.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) {
      throw ParseError("bad number '" + std::string(whole) + "'");
    }
    value = value * 10 + (text[i] - '0');
  }
  return negative ? BigInt(-value) : value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const BigInt num = parse_integer(text.substr(0, slash), text);
    const BigInt den = parse_integer(text.substr(slash + 1), text);
    if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
    return Rational(num, den);
  }
  if (const auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = text.substr(0, dot);
    std::string_view frac_part = text.substr(dot + 1);
    bool negative = !int_part.empty() && int_part[0] == '-';
    std::string digits(int_part.empty() || int_part == "-" || int_part == "+" ? "0" : std::string(int_part));
    if (negative && digits == "-") digits = "0";
    if (frac_part.empty()) throw ParseError("bad number '" + std::string(text) + "'");
    const BigInt whole = parse_integer(digits, text);
    const BigInt frac = parse_integer(frac_part, text);
    if (frac < 0) throw ParseError("bad number '" + std::string(text) + "'");
    const BigInt scale = big_pow(10, frac_part.size());
    BigInt magnitude = (whole < 0 ? BigInt(-whole) : whole) * scale + frac;
    if (negative || whole < 0) magnitude = -magnitude;
    return Rational(magnitude, scale);
  }
  return Rational(parse_integer(text, text));
}

std::int64_t floor_to_int(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  BigInt q = num / den;
  if (num < 0 && q * den != num) q -= 1;
  return static_cast<std::int64_t>(q);
}

}  // namespace kakeya

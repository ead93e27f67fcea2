#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace nagata {

using Integer = mpz_class;
using Rational = mpq_class;

Integer parse_integer(std::string_view text);
// Accepts "p", "p/q" and finite decimals such as "2.5".
Rational parse_rational(std::string_view text);

std::string to_string(const Integer& value);
std::string to_string(const Rational& value);

inline Integer abs_value(const Integer& v) { return abs(v); }

// Floor/ceil of n / d for d != 0.
Integer floor_div(const Integer& n, const Integer& d);
Integer ceil_div(const Integer& n, const Integer& d);
Integer floor_of(const Rational& q);
Integer ceil_of(const Rational& q);

Integer pow2(unsigned long exponent);

std::size_t hash_integer(const Integer& v) noexcept;

inline void hash_combine(std::size_t& seed, std::size_t h) noexcept {
  seed ^= h + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view text);

}  // namespace nagata

#include "nagata/integer.hpp"

#include <cstdio>
#include <stdexcept>

namespace nagata {

Integer parse_integer(std::string_view text) {
  std::string s(text);
  if (!s.empty() && s.front() == '+') s.erase(0, 1);
  Integer out;
  if (s.empty() || out.set_str(s, 10) != 0) {
    throw std::invalid_argument("not an integer: '" + std::string(text) + "'");
  }
  return out;
}

Rational parse_rational(std::string_view text) {
  std::string s(text);
  if (auto dot = s.find('.'); dot != std::string::npos) {
    std::string whole = s.substr(0, dot);
    std::string frac = s.substr(dot + 1);
    bool negative = !whole.empty() && whole.front() == '-';
    if (negative) whole.erase(0, 1);
    if (whole.empty()) whole = "0";
    if (frac.empty() || frac.find_first_not_of("0123456789") != std::string::npos) {
      throw std::invalid_argument("not a rational: '" + s + "'");
    }
    Integer scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    Rational q(parse_integer(whole) * scale + parse_integer(frac), scale);
    q.canonicalize();
    return negative ? Rational(-q) : q;
  }
  if (auto slash = s.find('/'); slash != std::string::npos) {
    Integer num = parse_integer(s.substr(0, slash));
    Integer den = parse_integer(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator: '" + s + "'");
    Rational q(num, den);
    q.canonicalize();
    return q;
  }
  return Rational(parse_integer(s));
}

std::string to_string(const Integer& value) { return value.get_str(10); }

std::string to_string(const Rational& value) {
  Rational q = value;
  q.canonicalize();
  if (q.get_den() == 1) return q.get_num().get_str(10);
  return q.get_num().get_str(10) + "/" + q.get_den().get_str(10);
}

Integer floor_div(const Integer& n, const Integer& d) {
  if (d == 0) throw std::domain_error("floor_div by zero");
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
  return q;
}

Integer ceil_div(const Integer& n, const Integer& d) {
  if (d == 0) throw std::domain_error("ceil_div by zero");
  Integer q;
  mpz_cdiv_q(q.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
  return q;
}

Integer floor_of(const Rational& q) { return floor_div(q.get_num(), q.get_den()); }

Integer ceil_of(const Rational& q) { return ceil_div(q.get_num(), q.get_den()); }

Integer pow2(unsigned long exponent) {
  Integer out;
  mpz_ui_pow_ui(out.get_mpz_t(), 2, exponent);
  return out;
}

std::size_t hash_integer(const Integer& v) noexcept {
  const mpz_srcptr raw = v.get_mpz_t();
  std::size_t seed = static_cast<std::size_t>(raw->_mp_size);
  const int limbs = raw->_mp_size < 0 ? -raw->_mp_size : raw->_mp_size;
  for (int i = 0; i < limbs; ++i) {
    hash_combine(seed, static_cast<std::size_t>(raw->_mp_d[i]));
  }
  return seed;
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace nagata

#include "nagata/group.hpp"

#include <stdexcept>

namespace nagata {

Element::Element(GroupId group, std::vector<Integer> coords)
    : group_(group), coords_(std::move(coords)) {}

bool Element::is_identity() const noexcept {
  for (const auto& c : coords_) {
    if (c != 0) return false;
  }
  return true;
}

std::size_t ElementHash::operator()(const Element& e) const noexcept {
  std::size_t seed = static_cast<std::size_t>(e.group().rank) * 31u +
                     static_cast<std::size_t>(e.group().kind);
  for (const auto& c : e.coords()) hash_combine(seed, hash_integer(c));
  return seed;
}

std::string format_coords(const Element& e) {
  std::string out;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (i) out += ',';
    out += to_string(e[i]);
  }
  return out;
}

Group Group::free_abelian(int rank) {
  if (rank < 1) throw std::invalid_argument("free abelian rank must be >= 1");
  return Group(GroupId{GroupKind::FreeAbelian, rank});
}

Group Group::heisenberg() { return Group(GroupId{GroupKind::Heisenberg, 3}); }

Group Group::parse(std::string_view name, std::optional<int> d) {
  if (name == "H3") return heisenberg();
  if (name == "Z") return free_abelian(d.value_or(1));
  if (name == "Z^d") {
    if (!d) throw std::invalid_argument("group 'Z^d' needs a rank d");
    return free_abelian(*d);
  }
  if (name.size() > 2 && name.substr(0, 2) == "Z^") {
    int rank = 0;
    try {
      rank = std::stoi(std::string(name.substr(2)));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad group name '" + std::string(name) + "'");
    }
    return free_abelian(rank);
  }
  throw std::invalid_argument("unknown group '" + std::string(name) + "'");
}

std::string Group::name() const {
  if (id_.kind == GroupKind::Heisenberg) return "H3";
  return id_.rank == 1 ? "Z" : "Z^" + std::to_string(id_.rank);
}

Element Group::identity() const {
  return Element(id_, std::vector<Integer>(static_cast<std::size_t>(id_.rank), Integer(0)));
}

Element Group::make(std::vector<Integer> coords) const {
  if (coords.size() != static_cast<std::size_t>(id_.rank)) {
    throw std::invalid_argument(name() + " elements have " + std::to_string(id_.rank) +
                                " coordinates, got " + std::to_string(coords.size()));
  }
  return Element(id_, std::move(coords));
}

Element Group::parse_element(std::string_view text) const {
  std::vector<Integer> coords;
  std::string s(text);
  if (!s.empty() && s.front() == '(' && s.back() == ')') s = s.substr(1, s.size() - 2);
  std::size_t start = 0;
  while (start <= s.size()) {
    auto comma = s.find(',', start);
    if (comma == std::string::npos) comma = s.size();
    coords.push_back(parse_integer(s.substr(start, comma - start)));
    start = comma + 1;
  }
  return make(std::move(coords));
}

void Group::check(const Element& e) const {
  if (!(e.group() == id_) || e.size() != static_cast<std::size_t>(id_.rank)) {
    throw std::invalid_argument("element does not belong to " + name());
  }
}

Element Group::mul(const Element& a, const Element& b) const {
  check(a);
  check(b);
  std::vector<Integer> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  if (id_.kind == GroupKind::Heisenberg) out[2] += a[0] * b[1];
  return Element(id_, std::move(out));
}

Element Group::inverse(const Element& a) const {
  check(a);
  std::vector<Integer> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = -a[i];
  if (id_.kind == GroupKind::Heisenberg) out[2] += a[0] * a[1];
  return Element(id_, std::move(out));
}

Element Group::power(const Element& g, const Integer& n) const {
  check(g);
  std::vector<Integer> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = g[i] * n;
  if (id_.kind == GroupKind::Heisenberg) {
    // (a,b,c)^n = (na, nb, nc + ab·n(n-1)/2), valid for every integer n.
    Integer tri = n * (n - 1) / 2;
    out[2] += g[0] * g[1] * tri;
  }
  return Element(id_, std::move(out));
}

bool Group::is_central(const Element& x) const {
  check(x);
  if (id_.kind == GroupKind::FreeAbelian) return true;
  return x[0] == 0 && x[1] == 0;
}

Element Group::center_generator() const {
  std::vector<Integer> c(static_cast<std::size_t>(id_.rank), Integer(0));
  if (id_.kind == GroupKind::Heisenberg) {
    c[2] = 1;
  } else {
    c[0] = 1;
  }
  return Element(id_, std::move(c));
}

std::vector<Element> Group::standard_generators() const {
  const int basis = id_.kind == GroupKind::Heisenberg ? 2 : id_.rank;
  std::vector<Element> gens;
  for (int i = 0; i < basis; ++i) {
    for (int sign : {1, -1}) {
      std::vector<Integer> c(static_cast<std::size_t>(id_.rank), Integer(0));
      c[static_cast<std::size_t>(i)] = sign;
      gens.emplace_back(id_, std::move(c));
    }
  }
  return gens;
}

std::optional<Integer> Group::cyclic_exponent(const Element& z, const Element& x) const {
  check(z);
  check(x);
  if (z.is_identity()) {
    if (x.is_identity()) return Integer(0);
    return std::nullopt;
  }
  // Only central z is needed here; for those the power is linear in n.
  if (!is_central(z)) throw std::invalid_argument("cyclic_exponent needs a central element");
  std::optional<Integer> t;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i] == 0) {
      if (x[i] != 0) return std::nullopt;
      continue;
    }
    Integer q, r;
    mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), x[i].get_mpz_t(), z[i].get_mpz_t());
    if (r != 0) return std::nullopt;
    if (t && *t != q) return std::nullopt;
    t = q;
  }
  return t;
}

}  // namespace nagata

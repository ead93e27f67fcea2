#include <random>

#include "doctest.h"
#include "nagata/group.hpp"
#include "nagata/word_norms.hpp"

using namespace nagata;

namespace {

Element el(const Group& g, std::vector<long> c) {
  std::vector<Integer> v;
  for (long x : c) v.emplace_back(x);
  return g.make(std::move(v));
}

Integer random_huge(std::mt19937_64& rng) {
  Integer v = 1;
  for (int i = 0; i < 3; ++i) {
    v <<= 64;
    v += Integer(std::to_string(rng()));
  }
  return (rng() & 1) ? Integer(-v) : v;
}

}  // namespace

TEST_CASE("multiplication examples") {
  Group z = Group::parse("Z");
  CHECK(z.mul(el(z, {3}), el(z, {4})) == el(z, {7}));

  Group h = Group::heisenberg();
  CHECK(h.mul(el(h, {1, 0, 0}), el(h, {0, 1, 0})) == el(h, {1, 1, 1}));
  CHECK(h.mul(el(h, {0, 1, 0}), el(h, {1, 0, 0})) == el(h, {1, 1, 0}));
}

TEST_CASE("inverse examples") {
  Group z = Group::parse("Z");
  CHECK(z.inverse(el(z, {5})) == el(z, {-5}));
  Group h = Group::heisenberg();
  CHECK(h.inverse(el(h, {1, 1, 0})) == el(h, {-1, -1, 1}));
  CHECK(h.mul(el(h, {1, 1, 0}), el(h, {-1, -1, 1})).is_identity());
  CHECK(h.inverse(h.identity()) == h.identity());
}

TEST_CASE("center generators") {
  CHECK(Group::parse("Z").center_generator() == el(Group::parse("Z"), {1}));
  Group z3 = Group::parse("Z^3");
  CHECK(z3.center_generator() == el(z3, {1, 0, 0}));
  Group h = Group::heisenberg();
  CHECK(h.center_generator() == el(h, {0, 0, 1}));
}

TEST_CASE("powers") {
  Group z = Group::parse("Z");
  CHECK(z.power(el(z, {1}), 17) == el(z, {17}));
  Group h = Group::heisenberg();
  Integer n("123456789012345678901234567890");
  CHECK(h.power(h.center_generator(), n) == h.make({0, 0, n}));
  CHECK(h.power(el(h, {2, -1, 5}), 0).is_identity());
  // (1,1,0)^3 by repeated multiplication
  Element g = el(h, {1, 1, 0});
  CHECK(h.power(g, 3) == h.mul(g, h.mul(g, g)));
  CHECK(h.power(g, -2) == h.inverse(h.mul(g, g)));
}

TEST_CASE("mismatched groups are rejected") {
  Group z3 = Group::parse("Z^3");
  Group h = Group::heisenberg();
  CHECK_THROWS_AS(z3.mul(z3.identity(), h.identity()), std::invalid_argument);
  CHECK_THROWS_AS(Group::parse("Q"), std::invalid_argument);
  CHECK_THROWS_AS(z3.make({1, 2}), std::invalid_argument);
  CHECK(Group::parse("Z^d", 4).dimension() == 4);
  CHECK(Group::parse("Z^2").name() == "Z^2");
}

TEST_CASE("group laws on radius-4 balls") {
  for (const Group& g : {Group::parse("Z"), Group::parse("Z^2"), Group::heisenberg()}) {
    auto ball = make_word_norm(g).ball(4);
    // The radius-4 H3 ball is a few hundred elements; sample triples on a
    // stride so the cube stays small while every element appears.
    const std::size_t n = ball.size();
    const std::size_t stride = n > 60 ? 7 : 1;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& a = ball[i];
      CHECK(g.mul(a, g.identity()) == a);
      CHECK(g.mul(g.identity(), a) == a);
      CHECK(g.mul(a, g.inverse(a)).is_identity());
      for (std::size_t j = 0; j < n; j += stride) {
        for (std::size_t k = (i + j) % stride; k < n; k += stride) {
          const auto& b = ball[j];
          const auto& c = ball[k];
          REQUIRE(g.mul(g.mul(a, b), c) == g.mul(a, g.mul(b, c)));
        }
      }
    }
    Element z = g.center_generator();
    for (const auto& x : ball) CHECK(g.mul(z, x) == g.mul(x, z));
    CHECK(g.is_central(z));
  }
  Group h = Group::heisenberg();
  CHECK_FALSE(h.is_central(el(h, {1, 0, 0})));
}

TEST_CASE("power is additive in the exponent") {
  std::mt19937_64 rng(20080423);
  for (const Group& g : {Group::parse("Z^2"), Group::heisenberg()}) {
    Element x = g.kind() == GroupKind::Heisenberg ? el(g, {2, -3, 1}) : el(g, {2, -3});
    for (long a = -100; a <= 100; a += 7) {
      for (long b = -100; b <= 100; b += 11) {
        REQUIRE(g.power(x, a + b) == g.mul(g.power(x, a), g.power(x, b)));
      }
    }
    for (int i = 0; i < 3; ++i) {
      Integer a = random_huge(rng), b = random_huge(rng);
      CHECK(abs(a) >= pow2(64));
      CHECK(g.power(x, a + b) == g.mul(g.power(x, a), g.power(x, b)));
    }
  }
}

TEST_CASE("cyclic exponent") {
  Group h = Group::heisenberg();
  Element z = h.center_generator();
  CHECK(h.cyclic_exponent(z, el(h, {0, 0, -12})) == Integer(-12));
  CHECK_FALSE(h.cyclic_exponent(z, el(h, {1, 0, 3})).has_value());
  Group z2 = Group::parse("Z^2");
  CHECK(z2.cyclic_exponent(el(z2, {2, 0}), el(z2, {6, 0})) == Integer(3));
  CHECK_FALSE(z2.cyclic_exponent(el(z2, {2, 0}), el(z2, {5, 0})).has_value());
}

TEST_CASE("element parsing and formatting") {
  Group h = Group::heisenberg();
  Element e = h.parse_element("1,-2,30");
  CHECK(format_coords(e) == "1,-2,30");
  CHECK(h.parse_element("(1,-2,30)") == e);
  CHECK_THROWS(h.parse_element("1,2"));
  CHECK_THROWS(h.parse_element("1,x,2"));
}

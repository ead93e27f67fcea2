#include <array>
#include <cstdint>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "nagata/construction.hpp"
#include "nagata/metric_space.hpp"
#include "nagata/weights.hpp"
#include "nagata/word_norms.hpp"

using namespace nagata;

namespace {

Element el(const Group& g, std::vector<long> c) {
  std::vector<Integer> v;
  for (long x : c) v.emplace_back(x);
  return g.make(std::move(v));
}

// Plain-integer Dijkstra on Z restricted to [-W, W].
std::map<long, long> z_oracle(const std::vector<std::pair<long, long>>& gens, long W) {
  std::map<long, long> dist;
  using Item = std::pair<long, long>;  // (dist, point)
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  pq.push({0, 0});
  while (!pq.empty()) {
    auto [d, x] = pq.top();
    pq.pop();
    if (dist.count(x)) continue;
    dist[x] = d;
    for (auto [s, w] : gens) {
      for (long step : {s, -s}) {
        long y = x + step;
        if (y < -W || y > W || dist.count(y)) continue;
        pq.push({d + w, y});
      }
    }
  }
  return dist;
}

std::vector<std::pair<long, long>> abs_weights(long G) {
  std::vector<std::pair<long, long>> gens;
  for (long s = 1; s <= G; ++s) gens.push_back({s, s});
  return gens;
}

using Triple = std::array<std::int64_t, 3>;

// Breadth-first word lengths in H3 over (+-1,0,0), (0,+-1,0).
std::map<Triple, int> h3_bfs(int radius) {
  std::map<Triple, int> dist{{Triple{0, 0, 0}, 0}};
  std::vector<Triple> frontier{{0, 0, 0}};
  const Triple gens[] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}};
  for (int r = 1; r <= radius; ++r) {
    std::vector<Triple> next;
    for (const auto& x : frontier) {
      for (const auto& s : gens) {
        Triple y{x[0] + s[0], x[1] + s[1], x[2] + s[2] + x[0] * s[1]};
        if (dist.emplace(y, r).second) next.push_back(y);
      }
    }
    frontier = std::move(next);
  }
  return dist;
}

Element from_triple(const Group& h, const Triple& t) { return el(h, {long(t[0]), long(t[1]), long(t[2])}); }

std::vector<std::vector<std::size_t>> closure_oracle(const FiniteMetricSpace& X, const Rational& s) {
  const std::size_t n = X.size();
  std::vector<std::vector<bool>> r(n, std::vector<bool>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) r[i][j] = i == j || X.d(i, j) < s;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (r[i][k] && r[k][j]) r[i][j] = true;
  std::set<std::vector<std::size_t>> classes;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> c;
    for (std::size_t j = 0; j < n; ++j)
      if (r[i][j]) c.push_back(j);
    classes.insert(c);
  }
  return {classes.begin(), classes.end()};
}

FiniteMetricSpace random_metric(std::mt19937_64& rng, std::size_t n) {
  // Shortest-path closure of random edge weights is always a metric.
  std::uniform_int_distribution<int> w(1, 12);
  std::vector<std::vector<Rational>> d(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d[i][j] = d[j][i] = Rational(w(rng), 1 + (rng() % 2));
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
  return FiniteMetricSpace::from_matrix(d);
}

}  // namespace

TEST_CASE("weight-generated norm examples") {
  Group z = Group::parse("Z");
  NormHandle abs_norm = make_word_norm(z);
  WeightSystem plain = WeightSystem::over_group(abs_norm);
  CHECK(norm_from_weights(plain, el(z, {5})) == 5);

  WeightSystem w = WeightSystem::over_group(abs_norm);
  w.set_weight(el(z, {5}), 2);
  CHECK(w.weight(el(z, {-5})) == Integer(2));
  CHECK(norm_from_weights(w, el(z, {7})) == 4);
  CHECK(norm_from_weights(w, el(z, {12})) == 6);

  auto oracle = z_oracle([] {
    auto g = abs_weights(7);
    g[4].second = 2;
    return g;
  }(), 200);
  CHECK(oracle.at(7) == 4);
  CHECK(oracle.at(12) == 6);
  std::vector<Element> targets;
  for (long x = -40; x <= 40; ++x) targets.push_back(el(z, {x}));
  auto batch = norms_from_weights(w, targets);
  for (long x = -40; x <= 40; ++x) CHECK(batch[std::size_t(x + 40)] == oracle.at(x));
}

TEST_CASE("weight systems reject bad weights") {
  Group z = Group::parse("Z");
  WeightSystem w = WeightSystem::over_group(make_word_norm(z));
  CHECK_THROWS_AS(w.set_weight(z.identity(), 1), std::invalid_argument);
  CHECK_THROWS_AS(w.set_weight(el(z, {3}), 0), std::invalid_argument);
  Group h = Group::heisenberg();
  NormHandle hw = make_word_norm(h);
  CHECK_THROWS_AS(closed_form_norm(hw, {el(h, {1, 0, 0}), {Integer(4)}, Integer(2)}, h.identity()),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_override_norm(hw, {el(h, {0, 1, 0}), {Integer(4)}, Integer(2)}),
                  std::invalid_argument);
}

TEST_CASE("regeneration on Z") {
  Group z = Group::parse("Z");
  NormHandle base = make_word_norm(z);
  WeightSystem w = WeightSystem::over_group(base);
  std::vector<Element> targets;
  for (long x = -50; x <= 50; ++x) targets.push_back(el(z, {x}));
  auto values = norms_from_weights(w, targets);
  for (long x = -50; x <= 50; ++x) REQUIRE(values[std::size_t(x + 50)] == std::labs(x));
}

TEST_CASE("regeneration and word metric on H3") {
  Group h = Group::heisenberg();
  auto oracle = h3_bfs(5);
  NormHandle base = make_word_norm(h);
  std::vector<Element> targets;
  for (const auto& [t, d] : oracle) targets.push_back(from_triple(h, t));
  auto from_base = norms_from_weights(WeightSystem::over_group(base), targets);
  auto from_units = norms_from_weights(WeightSystem::word(h), targets);
  std::size_t i = 0;
  for (const auto& [t, d] : oracle) {
    REQUIRE(base(targets[i]) == d);
    REQUIRE(from_base[i] == d);
    REQUIRE(from_units[i] == d);
    ++i;
  }
  auto ball = base.ball(5);
  CHECK(ball.size() == oracle.size());
}

TEST_CASE("bounded H3 queries respect the bound after the table grew") {
  Group h = Group::heisenberg();
  NormHandle n = make_word_norm(h);
  Element far = el(h, {0, 0, 40});
  CHECK(n(far) == 2 * 13);  // grows the table past radius 20
  Element x = el(h, {3, 3, 0});
  CHECK_FALSE(n.evaluator().evaluate(x, Integer(5)).has_value());
  CHECK(n.evaluator().evaluate(x, Integer(7)) == Integer(6));
  CHECK_FALSE(n.below(far, 10).has_value());
}

TEST_CASE("closed form examples") {
  Group z = Group::parse("Z");
  NormHandle base = make_word_norm(z);
  CentralOverrides ov{el(z, {1}), {Integer(17)}, Integer(4)};
  CHECK(closed_form_norm(base, ov, el(z, {17})) == 4);
  CHECK(closed_form_norm(base, ov, el(z, {16})) == 5);
  CHECK(closed_form_norm(base, ov, el(z, {2})) == 2);
  CHECK(closed_form_norm(base, ov, el(z, {-34})) == 8);
}

TEST_CASE("closed form agrees with shortest paths") {
  Group z = Group::parse("Z");
  NormHandle abs_norm = make_word_norm(z);
  NormHandle omega1 = make_override_norm(abs_norm, {el(z, {1}), {Integer(17)}, Integer(4)});

  struct Instance {
    NormHandle base;
    CentralOverrides ov;
    std::vector<std::pair<long, long>> oracle_gens;
  };
  std::vector<Instance> instances{
      {abs_norm, {el(z, {1}), {Integer(17)}, Integer(4)}, {{1, 1}, {17, 4}}},
      {abs_norm, {el(z, {1}), {Integer(5)}, Integer(2)}, {{1, 1}, {5, 2}}},
      {abs_norm, {el(z, {1}), {Integer(3), Integer(11)}, Integer(2)}, {{1, 1}, {3, 2}, {11, 2}}},
      {omega1, {el(z, {1}), {Integer(23)}, Integer(3)}, {{1, 1}, {17, 4}, {23, 3}}},
      {abs_norm, {el(z, {-1}), {Integer(9)}, Integer(3)}, {{1, 1}, {9, 3}}},
  };
  std::vector<Element> targets;
  for (long x = -60; x <= 60; ++x) targets.push_back(el(z, {x}));
  for (const auto& inst : instances) {
    auto oracle = z_oracle(inst.oracle_gens, 400);
    auto dijkstra = norms_from_weights(override_weight_system(inst.base, inst.ov), targets);
    NormHandle handle = make_override_norm(inst.base, inst.ov);
    for (long x = -60; x <= 60; ++x) {
      const auto i = std::size_t(x + 60);
      Integer cf = closed_form_norm(inst.base, inst.ov, targets[i]);
      REQUIRE(cf == dijkstra[i]);
      REQUIRE(cf == oracle.at(x));
      REQUIRE(handle(targets[i]) == cf);
    }
  }
}

TEST_CASE("closed form agrees with shortest paths on H3") {
  Group h = Group::heisenberg();
  NormHandle base = make_word_norm(h);
  CentralOverrides ov{h.center_generator(), {Integer(6)}, Integer(2)};
  auto ball = base.ball(4);
  auto dijkstra = norms_from_weights(override_weight_system(base, ov), ball);
  for (std::size_t i = 0; i < ball.size(); ++i) REQUIRE(closed_form_norm(base, ov, ball[i]) == dijkstra[i]);
  CHECK(closed_form_norm(base, ov, el(h, {0, 0, 12})) == 4);
}

TEST_CASE("balls") {
  Group z = Group::parse("Z");
  NormHandle n = make_word_norm(z);
  auto b3 = n.ball(3);
  REQUIRE(b3.size() == 7);
  for (long x = -3; x <= 3; ++x) CHECK(b3[std::size_t(x + 3)] == el(z, {x}));
  CHECK(n.ball(0) == std::vector<Element>{z.identity()});
  auto X = ball_space(n, 3);
  CHECK(X.size() == 7);
  CHECK(X.d(0, 6) == 6);
  CHECK(X.validate().empty());

  Group h = Group::heisenberg();
  auto oracle = h3_bfs(2);
  auto b2 = make_word_norm(h).ball(2);
  CHECK(b2.size() == oracle.size());
  CHECK(b2.size() == 17);  // spheres of size 1, 4, 12
  for (const auto& x : b2) {
    Triple t{x[0].get_si(), x[1].get_si(), x[2].get_si()};
    CHECK(oracle.count(t));
  }
}

TEST_CASE("ball of an override norm") {
  Group z = Group::parse("Z");
  NormHandle omega = make_override_norm(make_word_norm(z), {el(z, {1}), {Integer(17)}, Integer(4)});
  auto ball = omega.ball(8);
  auto oracle = z_oracle({{1, 1}, {17, 4}}, 500);
  std::set<long> expected;
  for (auto [x, d] : oracle)
    if (d <= 8) expected.insert(x);
  std::set<long> got;
  for (const auto& e : ball) got.insert(e[0].get_si());
  CHECK(got == expected);
}

TEST_CASE("proper norm verification") {
  Group z = Group::parse("Z");
  NormHandle n = make_word_norm(z);
  auto rep = verify_proper_norm(n, 20);
  CHECK(rep.ok());
  CHECK(rep.elements == 41);
  CHECK(rep.sublevel_counts.back().second == 41);

  NormHandle omega = make_override_norm(n, {el(z, {1}), {Integer(17)}, Integer(4)});
  auto rep60 = verify_proper_norm(omega, 60);
  CHECK(rep60.ok());
  CHECK(rep60.violations.empty());

  NormHandle broken = make_word_norm(z);
  broken.cache().overwrite(el(z, {5}), 0);
  auto bad = verify_proper_norm(broken, 10);
  CHECK_FALSE(bad.ok());
  bool identity = false, symmetry = false;
  for (const auto& v : bad.violations) {
    identity |= v.kind == "identity";
    symmetry |= v.kind == "symmetry";
  }
  CHECK(identity);
  CHECK(symmetry);

  Group h = Group::heisenberg();
  CHECK(verify_proper_norm(make_word_norm(h), 3).ok());
}

TEST_CASE("left invariance spot check") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long> c(-6, 6);
  Group h = Group::heisenberg();
  NormHandle n = make_word_norm(h);
  for (int i = 0; i < 50; ++i) {
    Element g = el(h, {c(rng), c(rng), c(rng)});
    Element x = el(h, {c(rng), c(rng), c(rng)});
    Element y = el(h, {c(rng), c(rng), c(rng)});
    CHECK(n.distance(h.mul(g, x), h.mul(g, y)) == n.distance(x, y));
  }
  Group z = Group::parse("Z");
  NormHandle omega = make_override_norm(make_word_norm(z), {el(z, {1}), {Integer(17)}, Integer(4)});
  std::uniform_int_distribution<long> w(-100, 100);
  for (int i = 0; i < 50; ++i) {
    Element g = el(z, {w(rng)}), x = el(z, {w(rng)}), y = el(z, {w(rng)});
    CHECK(omega.distance(z.mul(g, x), z.mul(g, y)) == omega.distance(x, y));
  }
}

TEST_CASE("s-components examples") {
  auto pts = [](std::vector<long> xs) {
    std::vector<std::vector<Integer>> p;
    for (long x : xs) p.push_back({Integer(x)});
    return FiniteMetricSpace::lattice_points(p);
  };
  auto X = pts({0, 1, 5});
  auto comps = s_components(X, 2);
  CHECK(comps == std::vector<std::vector<std::size_t>>{{0, 1}, {2}});
  CHECK(s_components(pts({0, 1, 2, 3, 4, 5, 6, 7, 8, 9}), 2).size() == 1);
  // strict: distance exactly s does not chain
  CHECK(s_components(pts({0, 2}), 2).size() == 2);
  CHECK(s_components(pts({0, 2}), Rational(5, 2)).size() == 1);
}

TEST_CASE("s-components match the closure oracle") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long> c(-6, 6);
  std::vector<std::vector<Integer>> pts;
  std::set<std::pair<long, long>> seen;
  while (pts.size() < 20) {
    long a = c(rng), b = c(rng);
    if (seen.insert({a, b}).second) pts.push_back({Integer(a), Integer(b)});
  }
  auto X = FiniteMetricSpace::lattice_points(pts);
  CHECK(s_components(X, 3) == closure_oracle(X, 3));

  for (int trial = 0; trial < 30; ++trial) {
    auto Y = random_metric(rng, 5 + rng() % 30);
    REQUIRE(Y.validate().empty());
    for (Rational s : {Rational(1), Rational(5, 2), Rational(4), Rational(7)}) {
      REQUIRE(s_components(Y, s) == closure_oracle(Y, s));
    }
  }
}

TEST_CASE("s-components refine as the scale grows") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    auto X = random_metric(rng, 25);
    std::vector<Rational> scales{Rational(1), Rational(2), Rational(3), Rational(9, 2), Rational(8)};
    for (std::size_t a = 0; a + 1 < scales.size(); ++a) {
      auto fine = s_components(X, scales[a]);
      auto coarse = s_components(X, scales[a + 1]);
      std::vector<std::size_t> owner(X.size());
      for (std::size_t c = 0; c < coarse.size(); ++c)
        for (auto i : coarse[c]) owner[i] = c;
      for (const auto& cls : fine)
        for (auto i : cls) REQUIRE(owner[i] == owner[cls.front()]);
    }
  }
}

TEST_CASE("matrix parsing and validation") {
  std::istringstream ok("# three points\n0,1,2\n1,0,1\n2,1,0\n");
  auto X = FiniteMetricSpace::parse_csv(ok);
  CHECK(X.size() == 3);
  std::istringstream bad("0,1,5\n1,0,1\n5,1,0\n");
  CHECK_THROWS_AS(FiniteMetricSpace::parse_csv(bad), std::invalid_argument);
  std::istringstream half("0,1/2\n0.5,0\n");
  CHECK(FiniteMetricSpace::parse_csv(half).d(0, 1) == Rational(1, 2));
}

TEST_CASE("coarse envelopes") {
  Group z = Group::parse("Z");
  NormHandle n = make_word_norm(z);
  NormHandle twice = make_scaled_norm(n, 2);
  for (const auto& row : coarse_envelopes(n, twice, 10)) {
    CHECK(row.lower == 2 * row.t);
    CHECK(row.upper == 2 * row.t);
  }
  for (const auto& row : coarse_envelopes(n, n, 10)) {
    CHECK(row.lower == row.t);
    CHECK(row.upper == row.t);
  }
  NormHandle omega = make_override_norm(n, {el(z, {1}), {Integer(17)}, Integer(4)});
  auto rows = coarse_envelopes(n, omega, 60);
  bool found = false;
  for (const auto& row : rows) {
    if (row.t == 17) {
      found = true;
      // one left-invariant value per distance: both envelopes equal ||17||
      CHECK(row.lower == 4);
      CHECK(row.upper == 4);
    }
    CHECK(row.lower <= row.t);
  }
  CHECK(found);
}

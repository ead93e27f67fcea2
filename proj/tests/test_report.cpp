#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "doctest.h"
#include "nagata/cache.hpp"
#include "nagata/report.hpp"
#include "nagata/weights.hpp"
#include "nagata/word_norms.hpp"

using namespace nagata;
namespace fs = std::filesystem;

namespace {

Element el(const Group& g, std::vector<long> c) {
  std::vector<Integer> v;
  for (long x : c) v.emplace_back(x);
  return g.make(std::move(v));
}

fs::path scratch_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("nagata-test-" + name + "-" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string rewrite(const std::string& text) {
  std::istringstream in(text);
  std::ostringstream out;
  write_cache(out, read_cache(in));
  return out.str();
}

}  // namespace

TEST_CASE("tower config parsing") {
  auto c = tower_config_from_json(Json::parse(R"({"group": "Z", "k": [2, 3], "M": ["3", 5],
      "steps": 2, "h1_mode": "exact", "verify_radius": 40})"));
  CHECK(c.group == Group::parse("Z"));
  CHECK(c.k == std::vector<long>{2, 3});
  CHECK(c.M == std::vector<Integer>{Integer(3), Integer(5)});
  CHECK(c.steps == 2);
  CHECK(c.h1_mode == H1Mode::Exact);
  CHECK(c.verify_radius == 40);

  auto big = tower_config_from_json(
      Json::parse(R"({"group": "Z^d", "d": 2, "k": [2], "M": ["123456789012345678901234567890"], "steps": 1})"));
  CHECK(big.group.dimension() == 2);
  CHECK(big.M[0] == Integer("123456789012345678901234567890"));
  CHECK(big.verify_radius == 60);

  auto h = tower_config_from_json(Json::parse(R"({"group": "H3", "k": [2], "M": [3], "steps": 1,
      "stage_overrides": {"1": {"C": "20", "h1": 7}}})"));
  REQUIRE(h.overrides.count(1));
  CHECK(*h.overrides[1].C == 20);
  CHECK(*h.overrides[1].h1 == 7);
  CHECK_FALSE(h.overrides[1].a);

  // round trip through the emitted form
  auto again = tower_config_from_json(to_json(h));
  CHECK(dump(to_json(again)) == dump(to_json(h)));
  CHECK(again.group == h.group);
}

TEST_CASE("tower config rejection") {
  const char* bad[] = {
      R"([1, 2])",
      R"({"group": "Z", "k": [2], "M": [3]})",
      R"({"group": "Z", "k": [2], "M": [3], "steps": 1, "seed": 4})",
      R"({"group": "Q", "k": [2], "M": [3], "steps": 1})",
      R"({"group": "Z^3", "d": 2, "k": [2], "M": [3], "steps": 1})",
      R"({"group": "Z", "k": [2], "M": [3], "steps": 1, "h1_mode": "fast"})",
      R"({"group": "Z", "k": [3, 2], "M": [3, 5], "steps": 2})",
      R"({"group": "Z", "k": [2], "M": [3], "steps": 2})",
      R"({"group": "Z", "k": [2.5], "M": [3], "steps": 1})",
      R"({"group": "Z", "k": [2], "M": ["x"], "steps": 1})",
      R"({"group": "Z", "k": [2], "M": [3], "steps": 1, "stage_overrides": {"2": {"C": 5}}})",
      R"({"group": "Z", "k": [2], "M": [3], "steps": 1, "stage_overrides": {"1": {"R": 5}}})",
  };
  for (const char* text : bad) {
    CAPTURE(text);
    CHECK_THROWS_AS(tower_config_from_json(Json::parse(text)), ConfigError);
  }
  CHECK_THROWS_AS(load_tower_config("/nonexistent/tower.json"), ConfigError);
}

TEST_CASE("stage and tower reports") {
  TowerConfig c;
  c.group = Group::parse("Z");
  c.k = {2, 3};
  c.M = {Integer(3), Integer(5)};
  c.steps = 2;
  auto t = build_tower(c);
  REQUIRE(t.complete);
  Json s1 = stage_json(t, t.stages[0]);
  CHECK(s1["params"]["C"] == "4");
  CHECK(s1["params"]["a"] == "17");
  CHECK(s1["params"]["h"] == Json::array({"17"}));
  CHECK(s1["conditions"]["dilatation"]["checked"] == 10);
  CHECK(s1["conditions"]["dilatation"]["witness"].is_null());
  CHECK(s1["conditions"]["image_diameter"] == "16");
  CHECK(s1["pass"] == true);
  CHECK(s1["norm"]["provenance"] == "tower-stage 1");

  Json tj = tower_json(t);
  CHECK(tj["stages"][1]["R"] == "17");
  CHECK(tj["stages"][1]["slope"] == "9/29456");
  CHECK(tj["complete"] == true);

  Json w = to_json(witness_report(t));
  CHECK(w["pass"] == true);
  CHECK(w["claimed_dimension"] == 2);
  CHECK(w["stages"][1]["measured"] == "18");

  // an identical rebuild gives identical text
  CHECK(dump(tower_json(build_tower(c))) == dump(tj));

  c.steps = 1;
  c.overrides[1].C = Integer(20);
  auto bad = build_tower(c);
  CHECK_FALSE(bad.complete);
  Json sb = stage_json(bad, bad.stages[0]);
  CHECK(sb["pass"] == false);
  CHECK(sb["conditions"]["dilatation"]["pass"] == false);
  CHECK(sb["conditions"]["dilatation"]["witness"]["x"].is_array());
  CHECK_FALSE(sb["admissibility"].empty());
}

TEST_CASE("cover and components JSON") {
  std::vector<std::vector<Integer>> pts;
  for (long x = 0; x < 6; ++x) pts.push_back({Integer(x)});
  auto X = FiniteMetricSpace::lattice_points(pts);
  auto sol = solve_cover_exact(X, 1, 3);
  Json j = to_json(sol, X);
  CHECK(j["mode"] == "exact");
  CHECK(j["D"] == to_string(sol.D));
  CHECK(j["assignment"].size() == 6);
  CHECK(j["families"].size() == 2);

  auto comps = s_components(X, Rational(1));
  Json cj = components_json(X, Rational(1), comps);
  CHECK(cj["count"] == 6);
  CHECK(components_json(X, Rational(2), s_components(X, Rational(2)))["components"][0]["diameter"] ==
        "5");
}

TEST_CASE("cache text round trip") {
  Group h = Group::parse("H3");
  NormHandle w = make_word_norm(h);
  for (const auto& x : w.ball(Integer(4))) w(x);
  CacheTable t = snapshot_table(w);
  CHECK(t.group == "H3");
  CHECK(t.entries.size() == w.ball(Integer(4)).size());
  std::ostringstream out;
  write_cache(out, t);
  const std::string text = out.str();
  CHECK(text.rfind("nagata-cache v1 H3 " + w.provenance_hash() + "\n", 0) == 0);
  CHECK(rewrite(text) == text);
  CHECK(rewrite(rewrite(text)) == text);

  std::istringstream in(text);
  auto back = read_cache(in);
  REQUIRE(back.entries.size() == t.entries.size());
  for (std::size_t i = 0; i < t.entries.size(); ++i) {
    CHECK(back.entries[i].first == t.entries[i].first);
    CHECK(back.entries[i].second == t.entries[i].second);
  }

  // randomized big values survive unchanged
  std::mt19937_64 rng(5);
  Group z2 = Group::parse("Z^2");
  std::map<Element, Integer> m;
  for (int i = 0; i < 200; ++i) {
    Integer a = Integer(long(rng() >> 1)) * Integer(long(rng() >> 1)) - Integer(long(rng() >> 2));
    Integer b(long(rng() % 1000) - 500);
    m[z2.make({a, b})] = abs(a) + abs(b);
  }
  CacheTable rt{"Z^2", "0123456789abcdef", {m.begin(), m.end()}};
  std::ostringstream o2;
  write_cache(o2, rt);
  CHECK(rewrite(o2.str()) == o2.str());
}

TEST_CASE("malformed cache files") {
  const char* bad[] = {
      "",
      "nagata-cache v2 Z abc\n",
      "other v1 Z abc\n",
      "nagata-cache v1 Z\n",
      "nagata-cache v1 Q abc\n",
      "nagata-cache v1 Z abc\n5\n",
      "nagata-cache v1 Z abc\n+5 5\n",
      "nagata-cache v1 Z abc\n05 5\n",
      "nagata-cache v1 Z abc\n5  5\n",
      "nagata-cache v1 Z abc\n5 -5\n",
      "nagata-cache v1 Z abc\n5 5\n3 3\n",
      "nagata-cache v1 Z abc\n5 5\n5 5\n",
      "nagata-cache v1 Z abc\n1,2 3\n",
  };
  for (const char* text : bad) {
    CAPTURE(text);
    std::istringstream in(text);
    CHECK_THROWS_AS(read_cache(in), std::runtime_error);
  }
}

TEST_CASE("cache directory save and load") {
  auto dir = scratch_dir("cache");
  Group z = Group::parse("Z");
  NormHandle base = make_word_norm(z);
  NormHandle om = make_override_norm(base, {el(z, {1}), {Integer(17)}, Integer(4)});
  for (long x = -30; x <= 30; ++x) om(el(z, {x}));
  CHECK(save_cache(om, dir) == 61);
  const auto file = dir / cache_file_name(om);
  REQUIRE(fs::exists(file));
  const std::string first = slurp(file);

  NormHandle fresh = make_override_norm(base, {el(z, {1}), {Integer(17)}, Integer(4)});
  CHECK(fresh.provenance_hash() == om.provenance_hash());
  CHECK(load_cache(fresh, dir) == 61);
  CHECK(fresh.cache().size() == 61);
  CHECK(*fresh.cache().exact(el(z, {17})) == 4);
  // saving again changes nothing
  CHECK(save_cache(fresh, dir) == 61);
  CHECK(slurp(file) == first);

  // merging grows the file; other parameters use another file
  fresh(el(z, {1000}));
  CHECK(save_cache(fresh, dir) == 62);
  NormHandle other = make_override_norm(base, {el(z, {1}), {Integer(17)}, Integer(5)});
  CHECK(cache_file_name(other) != cache_file_name(om));
  CHECK(load_cache(other, dir) == 0);

  // conflicting values are refused
  NormHandle liar = make_override_norm(base, {el(z, {1}), {Integer(17)}, Integer(4)});
  liar.cache().overwrite(el(z, {17}), 5);
  CHECK_THROWS(save_cache(liar, dir));
  NormHandle seeded = make_override_norm(base, {el(z, {1}), {Integer(17)}, Integer(4)});
  seeded.cache().overwrite(el(z, {17}), 5);
  CHECK_THROWS(load_cache(seeded, dir));
  fs::remove_all(dir);
}

TEST_CASE("warm cache rebuild is byte identical") {
  auto dir = scratch_dir("warm");
  TowerConfig c;
  c.group = Group::parse("Z");
  c.k = {2, 3};
  c.M = {Integer(3), Integer(5)};
  c.steps = 2;
  std::vector<NormHandle> seen;
  auto cold = build_tower(c, [&](const NormHandle& n) { seen.push_back(n); });
  CHECK(seen.size() == 3);
  for (const auto& n : seen) save_cache(n, dir);
  std::size_t loaded = 0;
  auto warm = build_tower(c, [&](const NormHandle& n) { loaded += load_cache(n, dir); });
  CHECK(loaded > 0);
  CHECK(dump(tower_json(warm)) == dump(tower_json(cold)));
  for (std::size_t i = 0; i < cold.stages.size(); ++i) {
    CHECK(dump(stage_json(warm, warm.stages[i])) == dump(stage_json(cold, cold.stages[i])));
  }
  CHECK(dump(to_json(witness_report(warm))) == dump(to_json(witness_report(cold))));
  fs::remove_all(dir);
}

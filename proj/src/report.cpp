#include "nagata/report.hpp"

#include <fstream>
#include <limits>
#include <set>

namespace nagata {

namespace {

Integer read_integer(const Json& v, const std::string& what) {
  if (v.is_number_unsigned()) return Integer(std::to_string(v.get<unsigned long long>()));
  if (v.is_number_integer()) return Integer(std::to_string(v.get<long long>()));
  if (v.is_string()) {
    try {
      return parse_integer(v.get<std::string>());
    } catch (const std::exception&) {
    }
  }
  throw ConfigError(what + ": expected an integer, got " + v.dump());
}

long read_long(const Json& v, const std::string& what) {
  Integer i = read_integer(v, what);
  if (!i.fits_slong_p()) throw ConfigError(what + ": out of range");
  return i.get_si();
}

void reject_unknown(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) throw ConfigError(where + ": unknown key \"" + it.key() + "\"");
  }
}

ParamOverrides read_overrides(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  reject_unknown(j, {"a", "C", "h1"}, where);
  ParamOverrides o;
  if (j.contains("a")) o.a = read_integer(j["a"], where + ".a");
  if (j.contains("C")) o.C = read_integer(j["C"], where + ".C");
  if (j.contains("h1")) o.h1 = read_integer(j["h1"], where + ".h1");
  return o;
}

Json str(const Integer& v) { return to_string(v); }
Json str(const Rational& v) { return to_string(v); }

Json str_list(const std::vector<Integer>& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back(to_string(x));
  return out;
}

Json element_json(const Element& e) { return format_coords(e); }

Json condition_json(const ConditionCheck& c) {
  Json j;
  j["pass"] = c.pass;
  j["checked"] = c.checked;
  if (c.element) {
    j["witness"] = {{"element", element_json(c.element->x)},
                    {"norm", str(c.element->value)},
                    {"base_norm", str(c.element->base_value)}};
  } else if (c.pair) {
    j["witness"] = {{"x", str_list(c.pair->x)},
                    {"y", str_list(c.pair->y)},
                    {"distance", str(c.pair->distance)},
                    {"expected", str(c.pair->expected)}};
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

}  // namespace

TowerConfig tower_config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("tower config: expected a JSON object");
  reject_unknown(j, {"group", "d", "k", "M", "steps", "h1_mode", "verify_radius", "stage_overrides"},
                 "tower config");
  for (const char* key : {"group", "k", "M", "steps"}) {
    if (!j.contains(key)) throw ConfigError(std::string("tower config: missing \"") + key + "\"");
  }
  TowerConfig c;
  if (!j["group"].is_string()) throw ConfigError("group: expected a string");
  std::optional<int> d;
  if (j.contains("d")) {
    long v = read_long(j["d"], "d");
    if (v < 1 || v > std::numeric_limits<int>::max()) throw ConfigError("d: must be positive");
    d = static_cast<int>(v);
  }
  try {
    c.group = Group::parse(j["group"].get<std::string>(), d);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("group: ") + e.what());
  }
  if (d && c.group.dimension() != *d) throw ConfigError("d: conflicts with the group name");
  if (!j["k"].is_array()) throw ConfigError("k: expected an array");
  for (const auto& v : j["k"]) c.k.push_back(read_long(v, "k"));
  if (!j["M"].is_array()) throw ConfigError("M: expected an array");
  for (const auto& v : j["M"]) c.M.push_back(read_integer(v, "M"));
  long steps = read_long(j["steps"], "steps");
  if (steps < 0 || steps > 1000) throw ConfigError("steps: out of range");
  c.steps = static_cast<int>(steps);
  if (j.contains("h1_mode")) {
    if (!j["h1_mode"].is_string()) throw ConfigError("h1_mode: expected a string");
    try {
      c.h1_mode = parse_h1_mode(j["h1_mode"].get<std::string>());
    } catch (const std::exception& e) {
      throw ConfigError(std::string("h1_mode: ") + e.what());
    }
  }
  if (j.contains("verify_radius")) c.verify_radius = read_integer(j["verify_radius"], "verify_radius");
  if (j.contains("stage_overrides")) {
    const Json& so = j["stage_overrides"];
    if (!so.is_object()) throw ConfigError("stage_overrides: expected an object");
    for (auto it = so.begin(); it != so.end(); ++it) {
      long stage = read_long(Json(it.key()), "stage_overrides key");
      if (stage < 1 || stage > c.steps) {
        throw ConfigError("stage_overrides: stage " + it.key() + " is not built");
      }
      c.overrides[static_cast<int>(stage)] = read_overrides(it.value(), "stage_overrides." + it.key());
    }
  }
  if (auto p = c.problems(); !p.empty()) throw ConfigError("tower config: " + p.front());
  return c;
}

TowerConfig load_tower_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return tower_config_from_json(j);
}

Json to_json(const TowerConfig& c) {
  Json j;
  j["group"] = c.group.name();
  if (c.group.is_abelian()) j["d"] = c.group.dimension();
  j["k"] = c.k;
  j["M"] = str_list(c.M);
  j["steps"] = c.steps;
  j["h1_mode"] = to_string(c.h1_mode);
  j["verify_radius"] = str(c.verify_radius);
  if (!c.overrides.empty()) {
    Json so = Json::object();
    for (const auto& [stage, o] : c.overrides) {
      Json e = Json::object();
      if (o.a) e["a"] = str(*o.a);
      if (o.C) e["C"] = str(*o.C);
      if (o.h1) e["h1"] = str(*o.h1);
      so[std::to_string(stage)] = e;
    }
    j["stage_overrides"] = so;
  }
  return j;
}

Json to_json(const LemmaCertificate& cert) {
  Json j;
  j["radius"] = str(cert.radius);
  j["norm_bound"] = condition_json(cert.norm_bound);
  j["threshold"] = condition_json(cert.threshold);
  j["dilatation"] = condition_json(cert.dilatation);
  j["image_diameter"] = str(cert.image_diameter);
  j["pass"] = cert.pass();
  return j;
}

Json stage_json(const TowerState& tower, const TowerStage& st) {
  const auto& p = st.step.params;
  const auto& h1 = st.step.h1_info;
  Json j;
  j["stage"] = st.index;
  j["group"] = tower.config.group.name();
  j["z"] = element_json(tower.z);
  j["params"] = {{"k", p.k}, {"m", p.m}, {"R", str(p.R)}, {"C", str(p.C)}, {"a", str(p.a)},
                 {"h1", str(p.h1)}, {"p", p.p},     {"h", str_list(p.h)}};
  j["h1"] = {{"mode", to_string(h1.mode)},
             {"slope", str(h1.slope)},
             {"bounded", h1.bounded ? str(*h1.bounded) : Json(nullptr)},
             {"certificate", h1.certificate}};
  j["admissibility"] = st.step.admissibility;
  j["base"] = {{"provenance", to_string(st.step.base.provenance())},
               {"hash", st.step.base.provenance_hash()}};
  j["norm"] = {{"provenance", to_string(st.step.norm.provenance())},
               {"hash", st.step.norm.provenance_hash()}};
  j["conditions"] = to_json(st.certificate);
  j["pass"] = st.certificate.pass();
  return j;
}

Json tower_json(const TowerState& tower) {
  Json j;
  j["config"] = to_json(tower.config);
  j["z"] = element_json(tower.z);
  Json stages = Json::array();
  std::vector<LemmaParams> params;
  for (const auto& st : tower.stages) {
    params.push_back(st.step.params);
    stages.push_back({{"stage", st.index},
                      {"R", str(st.R)},
                      {"C", str(st.step.params.C)},
                      {"a", str(st.step.params.a)},
                      {"h1", str(st.step.params.h1)},
                      {"image_diameter", str(st.certificate.image_diameter)},
                      {"slope", str(slope_recurrence(params))},
                      {"pass", st.certificate.pass()}});
  }
  j["stages"] = stages;
  j["final_norm"] = {{"provenance", to_string(tower.final_norm().provenance())},
                     {"hash", tower.final_norm().provenance_hash()}};
  j["complete"] = tower.complete;
  return j;
}

Json to_json(const WitnessReport& r) {
  Json j;
  Json stages = Json::array();
  for (const auto& w : r.stages) {
    Json s;
    s["stage"] = w.stage;
    s["k"] = w.k;
    s["m"] = w.m;
    s["C"] = str(w.C);
    s["measured"] = w.measured ? str(*w.measured) : Json(nullptr);
    s["verified"] = w.verified;
    s["pairs_checked"] = w.pairs_checked;
    if (w.failure) {
      s["failure"] = {{"x", str_list(w.failure->x)},
                      {"y", str_list(w.failure->y)},
                      {"distance", str(w.failure->distance)},
                      {"expected", str(w.failure->expected)}};
    } else {
      s["failure"] = nullptr;
    }
    stages.push_back(s);
  }
  j["stages"] = stages;
  j["pass"] = r.pass;
  j["failed_stage"] = r.failed_stage ? Json(*r.failed_stage) : Json(nullptr);
  j["claimed_dimension"] = r.claimed_dimension;
  j["claim"] = r.claim;
  return j;
}

Json to_json(const CoverSolution& sol, const FiniteMetricSpace& X) {
  Json j;
  j["n"] = sol.n;
  j["s"] = str(sol.s);
  j["mode"] = to_string(sol.mode);
  j["D"] = str(sol.D);
  j["assignment"] = sol.assignment;
  Json fams = Json::array();
  for (const auto& f : sol.families) {
    Json labels = Json::array();
    for (auto i : f) labels.push_back(X.labels()[i]);
    fams.push_back(labels);
  }
  j["families"] = fams;
  return j;
}

Json components_json(const FiniteMetricSpace& X, const Rational& s,
                     const std::vector<std::vector<std::size_t>>& components) {
  Json j;
  j["s"] = str(s);
  j["points"] = X.size();
  Json comps = Json::array();
  for (const auto& c : components) {
    Json labels = Json::array();
    for (auto i : c) labels.push_back(X.labels()[i]);
    comps.push_back({{"members", labels}, {"diameter", str(diameter(X, c))}});
  }
  j["count"] = components.size();
  j["components"] = comps;
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace nagata

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nagata/cache.hpp"
#include "nagata/construction.hpp"
#include "nagata/dimlab.hpp"
#include "nagata/metric_space.hpp"
#include "nagata/report.hpp"
#include "nagata/word_norms.hpp"

using namespace nagata;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kInconclusive = 2, kConfig = 3 };

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

Group group_from(const std::string& name, int d) {
  try {
    return Group::parse(name, d > 0 ? std::optional<int>(d) : std::nullopt);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

struct CacheSet {
  std::optional<fs::path> dir;
  std::vector<NormHandle> seen;

  NormHook hook() {
    return [this](const NormHandle& n) {
      seen.push_back(n);
      if (dir) load_cache(n, *dir);
    };
  }
  void save() const {
    if (!dir) return;
    for (const auto& n : seen) save_cache(n, *dir);
  }
};

TowerState tower_from(const std::string& path, CacheSet& caches) {
  return build_tower(load_tower_config(path), caches.hook());
}

const NormHandle& stage_norm(const TowerState& t, int stage) {
  if (stage < 0 || stage > t.config.steps) {
    throw ConfigError("stage " + std::to_string(stage) + " is outside 0.." +
                      std::to_string(t.config.steps));
  }
  if (stage == 0) return t.base;
  if (static_cast<std::size_t>(stage) > t.stages.size()) {
    throw ConfigError("stage " + std::to_string(stage) + " was not built: an earlier stage failed");
  }
  return t.stages[static_cast<std::size_t>(stage - 1)].step.norm;
}

// "word", "<tower.json>:limit" or "<tower.json>:stage:<i>".
struct NormSource {
  std::optional<TowerState> tower;
  std::optional<NormHandle> norm;
};

NormSource norm_source(const std::string& spec, const std::optional<Group>& group, CacheSet& caches) {
  NormSource src;
  if (spec == "word") {
    if (!group) throw ConfigError("the word metric needs --group");
    src.norm = make_word_norm(*group);
    caches.hook()(*src.norm);
    return src;
  }
  std::string path = spec;
  int stage = -1;
  if (auto pos = spec.rfind(":limit"); pos != std::string::npos && pos + 6 == spec.size()) {
    path = spec.substr(0, pos);
  } else if (auto sp = spec.rfind(":stage:"); sp != std::string::npos) {
    path = spec.substr(0, sp);
    try {
      stage = std::stoi(spec.substr(sp + 7));
    } catch (const std::exception&) {
      throw ConfigError("bad stage in metric spec '" + spec + "'");
    }
  } else {
    throw ConfigError("metric spec must be word, <tower.json>:limit or <tower.json>:stage:<i>");
  }
  src.tower = tower_from(path, caches);
  src.norm = stage < 0 ? src.tower->final_norm() : stage_norm(*src.tower, stage);
  if (group && !(src.norm->group() == *group)) throw ConfigError("tower group differs from --group");
  return src;
}

// "<group>-ball:r", "interval:a:b" or a CSV distance matrix.
FiniteMetricSpace space_from(const std::string& spec) {
  if (spec.rfind("interval:", 0) == 0) {
    auto parts = split(spec, ':');
    if (parts.size() != 3) throw ConfigError("interval spec is interval:<a>:<b>");
    Integer a = parse_integer(parts[1]), b = parse_integer(parts[2]);
    if (b < a) throw ConfigError("empty interval");
    std::vector<std::vector<Integer>> pts;
    for (Integer x = a; x <= b; ++x) pts.push_back({x});
    return FiniteMetricSpace::lattice_points(pts);
  }
  if (auto pos = spec.find("-ball:"); pos != std::string::npos) {
    Group g = group_from(spec.substr(0, pos), 0);
    Integer r = parse_integer(spec.substr(pos + 6));
    if (r < 0) throw ConfigError("negative ball radius");
    return ball_space(make_word_norm(g), r);
  }
  std::ifstream in(spec);
  if (!in) throw ConfigError("cannot open space file " + spec);
  auto X = FiniteMetricSpace::parse_csv(in);
  if (auto bad = X.validate(); !bad.empty()) throw ConfigError(spec + ": " + bad.front());
  return X;
}

std::vector<Rational> scales_from(const std::string& text) {
  std::vector<Rational> out;
  for (const auto& part : split(text, ',')) {
    Rational s = parse_rational(part);
    if (s <= 0) throw ConfigError("scales must be positive");
    out.push_back(s);
  }
  if (out.empty()) throw ConfigError("no scales given");
  return out;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + p.string());
}

std::optional<std::string> read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct NormArgs {
  std::string group = "Z";
  int d = 0;
  std::string metric = "word";
  std::string tower;
  std::optional<int> stage;
  bool limit = false;
  std::string cache_dir;
  std::vector<std::string> elements;
};

int cmd_norm(const NormArgs& a) {
  CacheSet caches;
  if (!a.cache_dir.empty()) caches.dir = a.cache_dir;
  std::optional<TowerState> tower;
  std::optional<NormHandle> norm;
  if (!a.tower.empty()) {
    if (a.limit == a.stage.has_value()) throw ConfigError("--tower needs exactly one of --stage, --limit");
    tower = tower_from(a.tower, caches);
    if (a.stage) norm = stage_norm(*tower, *a.stage);
  } else {
    if (a.limit || a.stage) throw ConfigError("--stage and --limit need --tower");
    if (a.metric != "word") throw ConfigError("unknown metric '" + a.metric + "'");
    norm = make_word_norm(group_from(a.group, a.d));
    caches.hook()(*norm);
  }
  const Group& g = tower ? tower->config.group : norm->group();

  std::vector<Element> xs;
  for (const auto& text : a.elements) {
    try {
      xs.push_back(g.parse_element(text));
    } catch (const std::exception& e) {
      throw ConfigError("element '" + text + "': " + e.what());
    }
  }

  int code = kOk;
  std::cout << (a.limit ? "element,norm,status\n" : "element,norm\n");
  for (const auto& x : xs) {
    std::cout << csv_field(format_coords(x)) << ',';
    try {
      if (a.limit) {
        auto v = limit_norm(*tower, x);
        std::cout << to_string(v.value) << ',' << (v.stabilized ? "stabilized" : "not-stabilized") << '\n';
      } else {
        std::cout << to_string((*norm)(x)) << '\n';
      }
    } catch (const Inconclusive& e) {
      std::cout << "inconclusive\n";
      std::cerr << format_coords(x) << ": " << e.what() << '\n';
      code = kInconclusive;
    }
  }
  caches.save();
  if (tower && !tower->complete) {
    std::cerr << "warning: the tower did not verify completely\n";
    if (code == kOk) code = kVerifyFailed;
  }
  return code;
}

struct BuildArgs {
  std::string config;
  std::string out;
  std::string cache_dir;
  bool reverify = false;
};

int cmd_build_verify(const BuildArgs& a) {
  CacheSet caches;
  if (!a.cache_dir.empty()) caches.dir = a.cache_dir;
  TowerConfig cfg = load_tower_config(a.config);
  TowerState tower = build_tower(cfg, caches.hook());
  WitnessReport report = witness_report(tower);
  caches.save();

  std::map<std::string, std::string> files;
  for (const auto& st : tower.stages) {
    files["stage-" + std::to_string(st.index) + ".json"] = dump(stage_json(tower, st));
  }
  files["tower.json"] = dump(tower_json(tower));
  files["witness.json"] = dump(to_json(report));

  for (const auto& st : tower.stages) {
    std::cout << "stage " << st.index << ": " << (st.certificate.pass() ? "pass" : "FAIL")
              << " R=" << to_string(st.R) << " C=" << to_string(st.step.params.C)
              << " a=" << to_string(st.step.params.a) << " h1=" << to_string(st.step.params.h1) << '\n';
  }
  const bool ok = tower.complete && report.pass;
  std::cout << (report.pass ? "witness: " + report.claim : "witness: FAIL") << '\n';

  const fs::path out(a.out);
  if (a.reverify) {
    bool same = true;
    for (const auto& [name, text] : files) {
      auto old = read_file(out / name);
      if (!old || *old != text) {
        std::cout << "differs: " << name << '\n';
        same = false;
      }
    }
    if (fs::is_directory(out)) {
      for (const auto& e : fs::directory_iterator(out)) {
        const auto name = e.path().filename().string();
        if (name.rfind("stage-", 0) == 0 && !files.count(name)) {
          std::cout << "unexpected: " << name << '\n';
          same = false;
        }
      }
    }
    std::cout << (same ? "reverify: identical" : "reverify: MISMATCH") << '\n';
    return ok && same ? kOk : kVerifyFailed;
  }
  fs::create_directories(out);
  for (const auto& e : fs::directory_iterator(out)) {
    const auto name = e.path().filename().string();
    if (name.rfind("stage-", 0) == 0 && name.size() > 5 && !files.count(name)) fs::remove(e.path());
  }
  for (const auto& [name, text] : files) write_file(out / name, text);
  return ok ? kOk : kVerifyFailed;
}

struct DimlabArgs {
  std::string space;
  int n = 1;
  std::string scales;
  std::string mode = "exact";
  std::size_t cap = CoverOptions{}.exact_cap;
  bool json = false;
  std::string a = "word";
  std::string b;
  std::string group;
  int d = 0;
  std::string radius;
  std::string cache_dir;
};

int cmd_control_fn(const DimlabArgs& a) {
  auto X = space_from(a.space);
  if (a.n < 0) throw ConfigError("--n must be nonnegative");
  CoverOptions opt;
  opt.exact_cap = a.cap;
  CoverMode mode;
  try {
    mode = parse_cover_mode(a.mode);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  auto sols = control_function_estimate(X, a.n, scales_from(a.scales), mode, opt);
  if (a.json) {
    Json arr = Json::array();
    for (const auto& s : sols) arr.push_back(to_json(s, X));
    std::cout << dump(arr);
  } else {
    std::cout << "s,D,mode,n\n";
    for (const auto& s : sols) {
      std::cout << to_string(s.s) << ',' << to_string(s.D) << ',' << to_string(s.mode) << ',' << s.n
                << '\n';
    }
  }
  return kOk;
}

int cmd_components(const DimlabArgs& a) {
  auto X = space_from(a.space);
  auto scales = scales_from(a.scales);
  if (scales.size() != 1) throw ConfigError("components takes a single scale");
  std::cout << dump(components_json(X, scales[0], s_components(X, scales[0])));
  return kOk;
}

int cmd_envelopes(const DimlabArgs& a) {
  if (a.b.empty()) throw ConfigError("--b is required");
  CacheSet caches;
  if (!a.cache_dir.empty()) caches.dir = a.cache_dir;
  std::optional<Group> g;
  if (!a.group.empty()) g = group_from(a.group, a.d);
  // a tower fixes the group when --group is absent
  NormSource sb = norm_source(a.b, g, caches);
  if (!g) g = sb.norm->group();
  NormSource sa = norm_source(a.a, g, caches);
  Integer r = parse_integer(a.radius);
  if (r < 0) throw ConfigError("negative radius");
  auto rows = coarse_envelopes(*sa.norm, *sb.norm, r);
  caches.save();
  std::cout << "t,lower,upper,pairs\n";
  for (const auto& row : rows) {
    std::cout << to_string(row.t) << ',' << to_string(row.lower) << ',' << to_string(row.upper) << ','
              << row.pairs << '\n';
  }
  return kOk;
}

int cmd_cache(const std::string& action, const std::string& dir) {
  std::vector<fs::path> files;
  if (fs::is_directory(dir)) {
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.path().extension() == ".cache") files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (action == "clear") {
    for (const auto& f : files) fs::remove(f);
    std::cout << "removed " << files.size() << " cache files\n";
    return kOk;
  }
  std::cout << "file,group,hash,entries\n";
  int code = kOk;
  for (const auto& f : files) {
    std::ifstream in(f);
    try {
      auto t = read_cache(in);
      std::cout << csv_field(f.filename().string()) << ',' << csv_field(t.group) << ',' << t.hash << ','
                << t.entries.size() << '\n';
    } catch (const std::exception& e) {
      std::cout << csv_field(f.filename().string()) << ",invalid,,\n";
      std::cerr << f.string() << ": " << e.what() << '\n';
      code = kConfig;
    }
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weight-system metrics on Z^d and H3: towers, certificates, cover search"};
  app.require_subcommand(1);

  NormArgs na;
  auto* norm = app.add_subcommand("norm", "Evaluate elements under a norm; CSV on stdout");
  norm->add_option("--group", na.group, "Z, Z^d or H3")->capture_default_str();
  norm->add_option("--d", na.d, "rank for Z^d");
  norm->add_option("--metric", na.metric, "word")->capture_default_str();
  norm->add_option("--tower", na.tower, "tower config JSON");
  norm->add_option("--stage", na.stage, "stage norm (0 = base)");
  norm->add_flag("--limit", na.limit, "limit norm with stabilization status");
  norm->add_option("--cache-dir", na.cache_dir, "norm-table cache directory");
  norm->add_option("elements", na.elements, "elements such as 5 or 1,0,-3")->required();

  BuildArgs ba;
  auto* build = app.add_subcommand("build-verify", "Build a tower and write its certificates");
  build->add_option("--config", ba.config, "tower config JSON")->required();
  build->add_option("--out", ba.out, "output directory")->required();
  build->add_option("--cache-dir", ba.cache_dir, "norm-table cache directory");
  build->add_flag("--reverify", ba.reverify, "compare against existing certificates instead of writing");

  DimlabArgs da;
  auto* dimlab = app.add_subcommand("dimlab", "Cover search, components and envelopes");
  dimlab->require_subcommand(1);
  auto* cf = dimlab->add_subcommand("control-fn", "Estimate D(s) for n + 1 families; CSV s,D,mode,n");
  cf->add_option("--space", da.space, "<group>-ball:r, interval:a:b or a CSV matrix")->required();
  cf->add_option("--n", da.n, "families minus one")->capture_default_str();
  cf->add_option("--s", da.scales, "comma-separated scales")->required();
  cf->add_option("--mode", da.mode, "exact or greedy")->capture_default_str();
  cf->add_option("--cap", da.cap, "bound on (n+1)^|X| for exact search")->capture_default_str();
  cf->add_flag("--json", da.json, "emit cover solutions as JSON");
  auto* comp = dimlab->add_subcommand("components", "s-components as JSON");
  comp->add_option("--space", da.space, "<group>-ball:r, interval:a:b or a CSV matrix")->required();
  comp->add_option("--s", da.scales, "scale")->required();
  auto* env = dimlab->add_subcommand("envelopes", "Distance envelopes of the identity map; CSV");
  env->add_option("--a", da.a, "word, <tower.json>:limit or <tower.json>:stage:<i>")->capture_default_str();
  env->add_option("--b", da.b, "same forms as --a")->required();
  env->add_option("--radius", da.radius, "ball radius in the first metric")->required();
  env->add_option("--group", da.group, "Z, Z^d or H3");
  env->add_option("--d", da.d, "rank for Z^d");
  env->add_option("--cache-dir", da.cache_dir, "norm-table cache directory");

  std::string cache_dir;
  auto* cache = app.add_subcommand("cache", "Inspect or clear a cache directory");
  cache->require_subcommand(1);
  auto* inspect = cache->add_subcommand("inspect", "List cache files");
  auto* clear = cache->add_subcommand("clear", "Remove cache files");
  for (auto* sub : {inspect, clear}) sub->add_option("--cache-dir", cache_dir)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (*norm) return cmd_norm(na);
    if (*build) return cmd_build_verify(ba);
    if (*cf) return cmd_control_fn(da);
    if (*comp) return cmd_components(da);
    if (*env) return cmd_envelopes(da);
    if (*inspect) return cmd_cache("inspect", cache_dir);
    if (*clear) return cmd_cache("clear", cache_dir);
  } catch (const Inconclusive& e) {
    std::cerr << "inconclusive: " << e.what() << '\n';
    return kInconclusive;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }
  return kConfig;
}

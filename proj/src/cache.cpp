#include "nagata/cache.hpp"

#include <unistd.h>

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace nagata {

namespace {

constexpr const char* kMagic = "nagata-cache";
constexpr const char* kVersion = "v1";

[[noreturn]] void malformed(std::size_t line, const std::string& why) {
  throw std::runtime_error("cache line " + std::to_string(line) + ": " + why);
}

}  // namespace

void write_cache(std::ostream& out, const CacheTable& table) {
  out << kMagic << ' ' << kVersion << ' ' << table.group << ' ' << table.hash << '\n';
  for (const auto& [x, v] : table.entries) out << format_coords(x) << ' ' << to_string(v) << '\n';
}

CacheTable read_cache(std::istream& in) {
  CacheTable t;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("cache file is empty");
  {
    std::istringstream hs(line);
    std::string magic, version, extra;
    if (!(hs >> magic >> version >> t.group >> t.hash) || (hs >> extra)) malformed(1, "bad header");
    if (magic != kMagic) malformed(1, "not a cache file");
    if (version != kVersion) malformed(1, "unsupported version " + version);
  }
  Group g;
  try {
    g = Group::parse(t.group);
  } catch (const std::exception& e) {
    malformed(1, e.what());
  }
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    auto sp = line.find(' ');
    if (sp == std::string::npos || line.find(' ', sp + 1) != std::string::npos) {
      malformed(n, "expected \"<coords> <norm>\"");
    }
    Element x;
    Integer v;
    try {
      x = g.parse_element(line.substr(0, sp));
      v = parse_integer(line.substr(sp + 1));
    } catch (const std::exception& e) {
      malformed(n, e.what());
    }
    // Only the canonical spelling is accepted, so reading and writing is bit-exact.
    if (format_coords(x) + ' ' + to_string(v) != line) malformed(n, "non-canonical entry");
    if (v < 0) malformed(n, "negative norm");
    if (!t.entries.empty() && !(t.entries.back().first < x)) malformed(n, "entries out of order");
    t.entries.emplace_back(std::move(x), std::move(v));
  }
  return t;
}

CacheTable snapshot_table(const NormHandle& norm) {
  return CacheTable{norm.group().name(), norm.provenance_hash(), norm.cache().snapshot()};
}

std::string cache_file_name(const NormHandle& norm) {
  std::string g = norm.group().name();
  std::replace(g.begin(), g.end(), '^', '_');
  return g + "-" + norm.provenance_hash() + ".cache";
}

std::size_t load_cache(const NormHandle& norm, const std::filesystem::path& dir) {
  const auto path = dir / cache_file_name(norm);
  std::ifstream in(path);
  if (!in) return 0;
  CacheTable t = read_cache(in);
  if (t.group != norm.group().name() || t.hash != norm.provenance_hash()) {
    throw std::runtime_error(path.string() + ": header does not match the norm");
  }
  for (const auto& [x, v] : t.entries) norm.cache().seed(x, v);
  return t.entries.size();
}

std::size_t save_cache(const NormHandle& norm, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto path = dir / cache_file_name(norm);
  std::map<Element, Integer> merged;
  if (std::ifstream in(path); in) {
    CacheTable old = read_cache(in);
    if (old.hash != norm.provenance_hash()) {
      throw std::runtime_error(path.string() + ": header does not match the norm");
    }
    for (auto& [x, v] : old.entries) merged.emplace(std::move(x), std::move(v));
  }
  for (const auto& [x, v] : norm.cache().snapshot()) {
    auto [it, inserted] = merged.emplace(x, v);
    if (!inserted && it->second != v) {
      throw std::runtime_error(path.string() + ": conflicting value at " + format_coords(x));
    }
  }
  CacheTable t{norm.group().name(), norm.provenance_hash(), {}};
  t.entries.assign(merged.begin(), merged.end());

  auto tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    write_cache(out, t);
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
  return t.entries.size();
}

}  // namespace nagata

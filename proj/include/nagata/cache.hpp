#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "nagata/group.hpp"
#include "nagata/norm.hpp"

namespace nagata {

/// Parsed norm-table cache file.
///
///   nagata-cache v1 <group> <provenance-hash>
///   <coords> <norm>
///   ...
///
/// Entries are written sorted by coordinates, one per line.
struct CacheTable {
  std::string group;
  std::string hash;
  std::vector<std::pair<Element, Integer>> entries;
};

void write_cache(std::ostream& out, const CacheTable& table);
/// Throws std::runtime_error on a malformed file.
CacheTable read_cache(std::istream& in);

CacheTable snapshot_table(const NormHandle& norm);
std::string cache_file_name(const NormHandle& norm);

/// Seeds the handle's memo from <dir>/<file name> if present; returns the
/// number of entries read. A header mismatch or conflicting value throws.
std::size_t load_cache(const NormHandle& norm, const std::filesystem::path& dir);
/// Merges the memo into the file (values must agree) and rewrites it
/// atomically; returns the entry count written.
std::size_t save_cache(const NormHandle& norm, const std::filesystem::path& dir);

}  // namespace nagata

#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nagata/integer.hpp"

namespace nagata {

enum class GroupKind { FreeAbelian, Heisenberg };

struct GroupId {
  GroupKind kind = GroupKind::FreeAbelian;
  int rank = 1;  // coordinate count: d for Z^d, 3 for H3

  friend bool operator==(const GroupId&, const GroupId&) = default;
};

/// A group element in canonical coordinates. Equal elements have equal
/// coordinate vectors, so comparison and hashing work on coordinates alone.
class Element {
 public:
  Element() = default;
  Element(GroupId group, std::vector<Integer> coords);

  const GroupId& group() const noexcept { return group_; }
  const std::vector<Integer>& coords() const noexcept { return coords_; }
  const Integer& operator[](std::size_t i) const { return coords_[i]; }
  std::size_t size() const noexcept { return coords_.size(); }

  bool is_identity() const noexcept;

  friend bool operator==(const Element& a, const Element& b) {
    return a.group_ == b.group_ && a.coords_ == b.coords_;
  }
  // Lexicographic on coordinates; only meaningful inside one group.
  friend bool operator<(const Element& a, const Element& b) { return a.coords_ < b.coords_; }

 private:
  GroupId group_{};
  std::vector<Integer> coords_;
};

struct ElementHash {
  std::size_t operator()(const Element& e) const noexcept;
};

/// "1,0,-3" style rendering and parsing (a bare integer for rank-1 groups).
std::string format_coords(const Element& e);

/// Concrete group with exact arithmetic: Z^d (coordinatewise addition) or the
/// discrete Heisenberg group H3 with (a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab').
class Group {
 public:
  Group() = default;  // Z
  static Group free_abelian(int rank);
  static Group heisenberg();
  // "Z", "Z^d" (rank from the suffix or from `d`), or "H3".
  static Group parse(std::string_view name, std::optional<int> d = std::nullopt);

  const GroupId& id() const noexcept { return id_; }
  GroupKind kind() const noexcept { return id_.kind; }
  int dimension() const noexcept { return id_.rank; }
  bool is_abelian() const noexcept { return id_.kind == GroupKind::FreeAbelian; }
  std::string name() const;

  Element identity() const;
  Element make(std::vector<Integer> coords) const;
  Element parse_element(std::string_view text) const;

  Element mul(const Element& a, const Element& b) const;
  Element inverse(const Element& a) const;
  Element power(const Element& g, const Integer& n) const;

  bool is_central(const Element& x) const;
  /// Central element of infinite order: e_1 for Z^d, (0,0,1) for H3.
  Element center_generator() const;
  /// Symmetric standard generating set, identity excluded.
  std::vector<Element> standard_generators() const;

  /// t with x = z^t, if x lies in the cyclic subgroup generated by z.
  std::optional<Integer> cyclic_exponent(const Element& z, const Element& x) const;

  friend bool operator==(const Group& a, const Group& b) { return a.id_ == b.id_; }

 private:
  explicit Group(GroupId id) : id_(id) {}
  void check(const Element& e) const;

  GroupId id_{};
};

}  // namespace nagata

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "nagata/group.hpp"
#include "nagata/norm.hpp"

namespace nagata {

/// A system of weights on a symmetric generating set S.
///
/// With a base norm, S is the whole group and w(s) = ||s||_base except at the
/// overrides. Without one, S is exactly the set of override keys (a finite
/// generating set; unit weights on the standard generators give the word
/// metric). Overrides are symmetrized on insertion.
class WeightSystem {
 public:
  static WeightSystem over_group(NormHandle base);
  static WeightSystem finite(Group group);
  static WeightSystem word(const Group& group);  // unit weights, standard generators

  void set_weight(const Element& s, const Integer& w);

  const Group& group() const noexcept { return group_; }
  const std::optional<NormHandle>& base() const noexcept { return base_; }
  const std::map<Element, Integer>& overrides() const noexcept { return overrides_; }

  // w(s); std::nullopt when s is not in S.
  std::optional<Integer> weight(const Element& s) const;
  // Generators (s, w(s)) with w(s) <= bound.
  std::vector<WeightedGenerator> generators_up_to(const Integer& bound) const;

  std::string description() const;

 private:
  explicit WeightSystem(Group g) : group_(g) {}

  Group group_;
  std::optional<NormHandle> base_;
  std::map<Element, Integer> overrides_;
};

struct SearchLimits {
  std::size_t max_settled = 2'000'000;
};

/// min{ sum w(s_i) : x = s_1 ... s_n, s_i in S } by best-first search from the
/// identity. Generators costing more than the current best bound are never
/// expanded; a search that outgrows its budget throws Inconclusive.
Integer norm_from_weights(const WeightSystem& w, const Element& x, const SearchLimits& limits = {});

/// Same search, one run for many targets; results in target order.
std::vector<Integer> norms_from_weights(const WeightSystem& w, const std::vector<Element>& targets,
                                        const SearchLimits& limits = {});

/// Weight override C on the powers z^(+-h_1), ..., z^(+-h_m) of a central z.
struct CentralOverrides {
  Element z;
  std::vector<Integer> h;
  Integer C;
};

/// min over y in Z^m of  C*|y|_1 + ||x * z^(-<y,h>)||_base, exactly, by
/// branch and bound on the central bound of the base. Throws
/// std::invalid_argument for a non-central z.
Integer closed_form_norm(const NormHandle& base, const CentralOverrides& ov, const Element& x);

/// Norm handle whose evaluator is the closed form above.
NormHandle make_override_norm(const NormHandle& base, const CentralOverrides& ov,
                              Provenance provenance = {ProvenanceKind::WeightGenerated},
                              std::size_t node_cap = 5'000'000);

/// Norm handle evaluated by the generic shortest-path search.
NormHandle make_weight_generated_norm(const WeightSystem& w, const SearchLimits& limits = {});

/// The WeightSystem whose generated norm the closed form computes.
WeightSystem override_weight_system(const NormHandle& base, const CentralOverrides& ov);

}  // namespace nagata

#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nagata/group.hpp"
#include "nagata/integer.hpp"
#include "nagata/norm.hpp"

namespace nagata {

/// Finite metric space with an exact rational distance matrix. Immutable once
/// built.
class FiniteMetricSpace {
 public:
  FiniteMetricSpace() = default;
  // Row-major n*n matrix.
  FiniteMetricSpace(std::vector<std::string> labels, std::vector<Rational> distances);

  static FiniteMetricSpace from_matrix(const std::vector<std::vector<Rational>>& rows);
  // Points of a group under the left-invariant distance of `norm`.
  static FiniteMetricSpace from_points(const NormHandle& norm, const std::vector<Element>& points);
  // Integer points of Z^d with the l1 distance.
  static FiniteMetricSpace lattice_points(const std::vector<std::vector<Integer>>& points);
  // Comma-separated rows of rationals; blank lines and '#' comments skipped.
  static FiniteMetricSpace parse_csv(std::istream& in);

  std::size_t size() const noexcept { return labels_.size(); }
  const Rational& d(std::size_t i, std::size_t j) const { return dist_[i * size() + j]; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  // Integer coordinates when the points live in Z^d with the l1 metric.
  const std::optional<std::vector<std::vector<Integer>>>& lattice() const noexcept {
    return lattice_;
  }

  FiniteMetricSpace subspace(const std::vector<std::size_t>& indices) const;

  // Human-readable list of metric-axiom failures; empty when valid.
  std::vector<std::string> validate() const;

 private:
  std::vector<std::string> labels_;
  std::vector<Rational> dist_;
  std::optional<std::vector<std::vector<Integer>>> lattice_;
};

/// Ball of radius r of the norm as a finite metric space.
FiniteMetricSpace ball_space(const NormHandle& norm, const Integer& r);

/// Classes of the transitive closure of d(x, y) < s. Each class sorted, classes
/// ordered by their smallest index.
std::vector<std::vector<std::size_t>> s_components(const FiniteMetricSpace& X, const Rational& s);

std::vector<std::vector<std::size_t>> s_components(const FiniteMetricSpace& X, const Rational& s,
                                                   const std::vector<std::size_t>& subset);

Rational diameter(const FiniteMetricSpace& X, const std::vector<std::size_t>& subset);

struct EnvelopeRow {
  Integer t;      // attained first-norm distance
  Integer lower;  // min second-norm distance over pairs at distance t
  Integer upper;  // max second-norm distance over pairs at distance t
  std::size_t pairs = 0;
};

/// Pointwise envelopes of the identity map (G, d_a) -> (G, d_b) over the
/// d_a-ball of the given radius.
std::vector<EnvelopeRow> coarse_envelopes(const NormHandle& a, const NormHandle& b,
                                          const Integer& radius);

struct NormViolation {
  std::string kind;  // identity | symmetry | subadditivity
  std::vector<Element> elements;
  std::string detail;
};

struct ProperNormReport {
  Integer radius;
  std::size_t elements = 0;
  std::size_t pairs_checked = 0;
  std::size_t violation_count = 0;
  std::vector<NormViolation> violations;  // first few, in deterministic order
  std::vector<std::pair<Integer, std::size_t>> sublevel_counts;  // t -> #{||x|| <= t}
  bool ok() const noexcept { return violation_count == 0; }
};

/// Checks identity, symmetry and subadditivity on the norm's own ball of the
/// given radius, over all pairs.
ProperNormReport verify_proper_norm(const NormHandle& norm, const Integer& radius,
                                    std::size_t max_reported = 16);

}  // namespace nagata

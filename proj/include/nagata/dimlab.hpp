#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nagata/construction.hpp"
#include "nagata/integer.hpp"
#include "nagata/metric_space.hpp"

namespace nagata {

struct DilatationCheck {
  std::optional<Rational> constant;  // set iff one C >= 1 fits every pair
  std::size_t pairs_checked = 0;
  std::optional<std::pair<std::size_t, std::size_t>> witness;  // first pair that broke it
  std::string reason;
};

/// Codomain distance between the images of domain points i and j.
using ImageDistance = std::function<Rational(std::size_t, std::size_t)>;

DilatationCheck is_dilatation(const FiniteMetricSpace& domain, const ImageDistance& image);
/// f = id, codomain = the domain itself.
DilatationCheck is_dilatation_identity(const FiniteMetricSpace& domain);
/// f(x) = z^{<x,h>} from the l1 ball B^m(0, k) into (G, d_norm).
DilatationCheck is_dilatation(const HomSpec& f, long k, const NormHandle& norm);

struct StageWitness {
  int stage = 0;
  long k = 0;
  long m = 0;
  Integer C;
  std::optional<Rational> measured;
  bool verified = false;
  std::size_t pairs_checked = 0;
  std::optional<PairWitness> failure;
};

struct WitnessReport {
  std::vector<StageWitness> stages;
  bool pass = true;
  std::optional<int> failed_stage;
  int claimed_dimension = 0;  // asdim_AN(G, d_limit) >= this
  std::string claim;
};

/// Re-verifies every stage dilatation against the final norm of the tower.
WitnessReport witness_report(const TowerState& tower);

enum class CoverMode { Exact, Greedy };

std::string to_string(CoverMode mode);
CoverMode parse_cover_mode(const std::string& text);

/// n + 1 families partitioning X; D is the largest diameter of an s-component
/// inside one family.
struct CoverSolution {
  int n = 0;
  Rational s;
  CoverMode mode = CoverMode::Exact;
  std::vector<int> assignment;  // family of each point
  std::vector<std::vector<std::size_t>> families;
  Rational D;
};

struct CoverOptions {
  std::size_t exact_cap = 531'441;  // bound on (n+1)^|X|
  std::size_t local_search_rounds = 200;
};

/// max over families of the largest s-component diameter.
Rational cover_diameter(const FiniteMetricSpace& X, const std::vector<int>& assignment, int n,
                        const Rational& s);

CoverSolution solve_cover_exact(const FiniteMetricSpace& X, int n, const Rational& s,
                                const CoverOptions& options = {});
CoverSolution solve_cover_greedy(const FiniteMetricSpace& X, int n, const Rational& s,
                                 const CoverOptions& options = {});

std::vector<CoverSolution> control_function_estimate(const FiniteMetricSpace& X, int n,
                                                     const std::vector<Rational>& scales,
                                                     CoverMode mode,
                                                     const CoverOptions& options = {});

/// Recomputes the partition and D from scratch.
bool validate_cover(const FiniteMetricSpace& X, const CoverSolution& sol);

}  // namespace nagata

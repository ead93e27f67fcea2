#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nagata/group.hpp"
#include "nagata/integer.hpp"
#include "nagata/norm.hpp"

namespace nagata {

/// Parameters of one inductive step: R < C < a / (2 k m^2), p_1 = 1,
/// sum_{i<j} 2km 2^{p_i} < 2^{p_j}, h_j = 2^{p_j} h_1.
struct LemmaParams {
  long k = 1;
  long m = 1;
  Integer R;
  Integer a;
  Integer C;
  Integer h1;
  std::vector<long> p;
  std::vector<Integer> h;
};

struct ScaleChoice {
  Integer a;
  Integer C;
};

/// Smallest admissible naturals: C = R + 1, a = 2 k m^2 C + 1.
ScaleChoice choose_params(long k, long m, const Integer& R);

/// p_1 = 1 and each later p_j the least exponent with 2^{p_j} > sum_{i<j} 2km 2^{p_i}.
std::vector<long> choose_p(long k, long m);

/// Every violated parameter constraint, described; empty when admissible.
std::vector<std::string> admissibility_problems(const LemmaParams& p);

enum class H1Mode { Bounded, Exact };

std::string to_string(H1Mode mode);
H1Mode parse_h1_mode(const std::string& text);

struct H1Result {
  Integer h1;
  H1Mode mode = H1Mode::Bounded;
  Rational slope;                 // certified slope of the base on <z>; 0 if none
  std::optional<Integer> bounded; // ceil(a / slope) when a slope exists
  std::string certificate;        // how the guarantee ||z^h|| >= a for |h| >= h1 was obtained
};

/// sigma with ||z^h|| >= sigma |h| for all h, read off the norm's structure.
Rational slope_lower_bound(const NormHandle& norm, const Element& z);

/// The same bound from the stage parameters alone: sigma_0 = 1,
/// sigma_n = min(sigma_{n-1}, C_n / h_m^{(n)}).
Rational slope_recurrence(const std::vector<LemmaParams>& stages);

/// h1 > 0 with ||z^h||_base >= a whenever |h| >= h1.
///
/// Bounded mode uses ceil(a / sigma) from the slope certificate and refuses a
/// base without one. Exact mode scans below that bound for the least valid h1;
/// without a slope it enumerates the ball of radius a - 1 and takes one past
/// the largest central exponent found there.
H1Result find_h1(const NormHandle& base, const Element& z, const Integer& a, H1Mode mode,
                 std::size_t scan_cap = 2'000'000);

/// f(x_1..x_m) = z^{sum x_i h_i}, a homomorphism Z^m -> G for central z.
struct HomSpec {
  Element z;
  std::vector<Integer> h;

  Element apply(const Group& g, const std::vector<Integer>& x) const;
};

struct ParamOverrides {
  std::optional<Integer> a;
  std::optional<Integer> C;
  std::optional<Integer> h1;
};

struct LemmaOptions {
  H1Mode h1_mode = H1Mode::Bounded;
  ParamOverrides overrides;
  std::optional<int> stage;  // tags the new norm as a tower stage
};

struct LemmaStepResult {
  LemmaParams params;
  H1Result h1_info;
  NormHandle base;
  NormHandle norm;
  HomSpec hom;
  std::vector<std::string> admissibility;  // empty when all constraints hold
};

LemmaStepResult lemma_step(const NormHandle& base, const Element& z, long k, long m,
                           const Integer& R, const LemmaOptions& options = {});

/// Points of the l1 ball B^m(0, k) in Z^m, lexicographic.
std::vector<std::vector<Integer>> lattice_ball(long m, long k);

struct NormWitness {
  Element x;
  Integer value;       // new norm
  Integer base_value;  // old norm
};

struct PairWitness {
  std::vector<Integer> x;
  std::vector<Integer> y;
  Integer distance;
  Integer expected;
};

struct ConditionCheck {
  bool pass = true;
  std::size_t checked = 0;
  std::optional<NormWitness> element;
  std::optional<PairWitness> pair;
};

struct LemmaCertificate {
  Integer radius;
  ConditionCheck norm_bound;  // ||x||_new <= ||x||_base on the base ball
  ConditionCheck threshold;   // equality wherever ||x||_new <= R
  ConditionCheck dilatation;  // d_new(f(x), f(y)) = C |x - y|_1 on B^m(0, k)
  Integer image_diameter;     // max distance seen among dilatation pairs
  bool pass() const noexcept { return norm_bound.pass && threshold.pass && dilatation.pass; }
};

LemmaCertificate verify_lemma_conditions(const LemmaStepResult& res, const Integer& radius);

struct TowerConfig {
  Group group;
  std::vector<long> k;
  std::vector<Integer> M;
  int steps = 0;
  H1Mode h1_mode = H1Mode::Bounded;
  Integer verify_radius = 60;
  std::map<int, ParamOverrides> overrides;  // keyed by stage (1-based)

  // Problems with the sequences; empty when usable.
  std::vector<std::string> problems() const;
};

struct TowerStage {
  int index = 0;  // 1-based; m = index
  Integer R;
  LemmaStepResult step;
  LemmaCertificate certificate;
};

struct TowerState {
  TowerConfig config;
  Element z;
  NormHandle base;
  std::vector<TowerStage> stages;
  bool complete = false;  // every requested stage built and verified

  const NormHandle& final_norm() const {
    return stages.empty() ? base : stages.back().step.norm;
  }
};

/// R_1 = M_1, R_{i+1} = max(M_{i+1}, R_i + 1, diam f_i(B(0, k_i)) + 1).
Integer next_threshold(const Integer& M_next, const Integer& R_prev, const Integer& diameter);

/// Runs the induction on the word norm of the configured group. Stops at the
/// first stage whose certificate fails (complete = false).
/// Called on the base and on each stage norm before it is first evaluated
/// (used to seed caches).
using NormHook = std::function<void(const NormHandle&)>;

TowerState build_tower(const TowerConfig& config, const NormHook& prepare = {});
TowerState build_tower(const TowerConfig& config, const NormHandle& base,
                       const NormHook& prepare = {});

struct LimitValue {
  Integer value;
  bool stabilized = false;        // value <= R_last, so every later stage keeps it
  std::vector<Integer> per_stage;  // base first, then each stage
};

LimitValue limit_norm(const TowerState& tower, const Element& x);

}  // namespace nagata

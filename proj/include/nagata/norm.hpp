#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "nagata/group.hpp"
#include "nagata/integer.hpp"

namespace nagata {

/// Raised when a search exceeds its configured budget. Callers never get a
/// wrong number in place of this.
class Inconclusive : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ProvenanceKind { Analytic, Word, WeightGenerated, TowerStage };

struct Provenance {
  ProvenanceKind kind = ProvenanceKind::Analytic;
  int stage = 0;  // only for TowerStage
};

std::string to_string(const Provenance& p);

/// Lower bound along a central direction:
///   ||x * z^(-t)|| >= slope * |t - center| + offset   for every integer t.
struct CentralBound {
  Rational slope = 0;
  Integer center = 0;
  Integer offset = 0;
};

struct WeightedGenerator {
  Element element;
  Integer weight;
};

class NormEvaluator {
 public:
  virtual ~NormEvaluator() = default;

  virtual const Group& group() const = 0;
  // Stable textual identity; hashed into cache headers.
  virtual std::string description() const = 0;

  // Exact ||x|| if it is strictly below `bound` (always, when no bound is
  // given); std::nullopt means ||x|| >= bound. Throws Inconclusive.
  virtual std::optional<Integer> evaluate(const Element& x,
                                          const std::optional<Integer>& bound) const = 0;

  virtual CentralBound central_bound(const Element& z, const Element& x) const;

  // Finite symmetric weighted generating set whose word norm equals this norm.
  virtual std::optional<std::vector<WeightedGenerator>> atoms() const { return std::nullopt; }

  // Direct ball enumeration when cheaper than a search over atoms.
  virtual std::optional<std::vector<Element>> enumerate_ball(const Integer& /*radius*/) const {
    return std::nullopt;
  }
};

/// Thread-safe memo of exact values and known lower bounds.
class MemoCache {
 public:
  std::optional<Integer> exact(const Element& x) const;
  std::optional<Integer> lower(const Element& x) const;
  void store(const Element& x, const Integer& v);
  void store_lower(const Element& x, const Integer& lb);
  // Insert from a persisted table; a differing existing value is an error.
  void seed(const Element& x, const Integer& v);
  // Fault injection and cache editing: replaces whatever is stored.
  void overwrite(const Element& x, const Integer& v);
  void clear();
  std::size_t size() const;
  std::vector<std::pair<Element, Integer>> snapshot() const;  // sorted by coords

 private:
  struct Shard {
    mutable std::mutex mu;
    std::unordered_map<Element, Integer, ElementHash> exact;
    std::unordered_map<Element, Integer, ElementHash> lower;
  };
  static constexpr std::size_t kShards = 64;
  Shard& shard(const Element& x) const { return shards_[ElementHash{}(x) % kShards]; }

  mutable std::array<Shard, kShards> shards_;
};

/// An evaluable integer-valued proper norm with provenance and a memo cache.
/// Copies share the evaluator and the cache.
class NormHandle {
 public:
  NormHandle(std::shared_ptr<const NormEvaluator> evaluator, Provenance provenance);

  const Group& group() const { return evaluator_->group(); }
  const NormEvaluator& evaluator() const { return *evaluator_; }
  const Provenance& provenance() const noexcept { return provenance_; }
  std::string description() const { return evaluator_->description(); }
  std::string provenance_hash() const;

  Integer operator()(const Element& x) const;
  std::optional<Integer> below(const Element& x, const Integer& bound) const;
  // Left-invariant distance d(x, y) = ||x^-1 y||.
  Integer distance(const Element& x, const Element& y) const;

  // All elements of norm <= r, sorted by coordinates.
  std::vector<Element> ball(const Integer& r) const;

  CentralBound central_bound(const Element& z, const Element& x) const {
    return evaluator_->central_bound(z, x);
  }

  MemoCache& cache() const { return *cache_; }

 private:
  std::shared_ptr<const NormEvaluator> evaluator_;
  Provenance provenance_;
  std::shared_ptr<MemoCache> cache_;
};

/// Shortest-path ball over a finite weighted generating set: every element
/// reachable with total weight <= radius, with its exact distance.
std::vector<std::pair<Element, Integer>> weighted_ball(const Group& group,
                                                       const std::vector<WeightedGenerator>& gens,
                                                       const Integer& radius,
                                                       std::size_t max_elements = 4'000'000);

}  // namespace nagata

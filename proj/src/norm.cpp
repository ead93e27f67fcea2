#include "nagata/norm.hpp"

#include <algorithm>
#include <queue>

namespace nagata {

std::string to_string(const Provenance& p) {
  switch (p.kind) {
    case ProvenanceKind::Analytic:
      return "analytic";
    case ProvenanceKind::Word:
      return "word";
    case ProvenanceKind::WeightGenerated:
      return "weight-generated";
    case ProvenanceKind::TowerStage:
      return "tower-stage " + std::to_string(p.stage);
  }
  return "unknown";
}

CentralBound NormEvaluator::central_bound(const Element&, const Element&) const { return {}; }

std::optional<Integer> MemoCache::exact(const Element& x) const {
  Shard& sh = shard(x);
  std::lock_guard lock(sh.mu);
  auto it = sh.exact.find(x);
  if (it == sh.exact.end()) return std::nullopt;
  return it->second;
}

std::optional<Integer> MemoCache::lower(const Element& x) const {
  Shard& sh = shard(x);
  std::lock_guard lock(sh.mu);
  auto it = sh.lower.find(x);
  if (it == sh.lower.end()) return std::nullopt;
  return it->second;
}

void MemoCache::store(const Element& x, const Integer& v) {
  Shard& sh = shard(x);
  std::lock_guard lock(sh.mu);
  sh.exact.try_emplace(x, v);
}

void MemoCache::store_lower(const Element& x, const Integer& lb) {
  Shard& sh = shard(x);
  std::lock_guard lock(sh.mu);
  auto [it, inserted] = sh.lower.try_emplace(x, lb);
  if (!inserted && it->second < lb) it->second = lb;
}

void MemoCache::seed(const Element& x, const Integer& v) {
  Shard& sh = shard(x);
  std::lock_guard lock(sh.mu);
  auto [it, inserted] = sh.exact.try_emplace(x, v);
  if (!inserted && it->second != v) {
    throw std::runtime_error("cache conflict at (" + format_coords(x) + "): " +
                             to_string(it->second) + " vs " + to_string(v));
  }
}

void MemoCache::overwrite(const Element& x, const Integer& v) {
  Shard& sh = shard(x);
  std::lock_guard lock(sh.mu);
  sh.exact[x] = v;
  sh.lower.erase(x);
}

void MemoCache::clear() {
  for (auto& sh : shards_) {
    std::lock_guard lock(sh.mu);
    sh.exact.clear();
    sh.lower.clear();
  }
}

std::size_t MemoCache::size() const {
  std::size_t n = 0;
  for (auto& sh : shards_) {
    std::lock_guard lock(sh.mu);
    n += sh.exact.size();
  }
  return n;
}

std::vector<std::pair<Element, Integer>> MemoCache::snapshot() const {
  std::vector<std::pair<Element, Integer>> out;
  for (auto& sh : shards_) {
    std::lock_guard lock(sh.mu);
    out.insert(out.end(), sh.exact.begin(), sh.exact.end());
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

NormHandle::NormHandle(std::shared_ptr<const NormEvaluator> evaluator, Provenance provenance)
    : evaluator_(std::move(evaluator)),
      provenance_(provenance),
      cache_(std::make_shared<MemoCache>()) {
  if (!evaluator_) throw std::invalid_argument("NormHandle needs an evaluator");
}

std::string NormHandle::provenance_hash() const {
  return fnv1a_hex(to_string(provenance_) + "|" + evaluator_->description());
}

Integer NormHandle::operator()(const Element& x) const {
  if (auto hit = cache_->exact(x)) return *hit;
  auto v = evaluator_->evaluate(x, std::nullopt);
  if (!v) throw Inconclusive("unbounded evaluation returned no value");
  cache_->store(x, *v);
  return *v;
}

std::optional<Integer> NormHandle::below(const Element& x, const Integer& bound) const {
  if (auto hit = cache_->exact(x)) {
    if (*hit < bound) return hit;
    return std::nullopt;
  }
  if (bound <= 0) return std::nullopt;
  if (auto lb = cache_->lower(x); lb && *lb >= bound) return std::nullopt;
  auto v = evaluator_->evaluate(x, bound);
  if (v && *v >= bound) {
    throw std::logic_error(description() + " returned " + to_string(*v) + " for a bound of " +
                           to_string(bound));
  }
  if (v) {
    cache_->store(x, *v);
  } else {
    cache_->store_lower(x, bound);
  }
  return v;
}

Integer NormHandle::distance(const Element& x, const Element& y) const {
  const Group& g = group();
  return (*this)(g.mul(g.inverse(x), y));
}

std::vector<Element> NormHandle::ball(const Integer& r) const {
  std::vector<Element> out;
  if (r < 0) return out;
  if (auto direct = evaluator_->enumerate_ball(r)) {
    out = std::move(*direct);
  } else if (auto gens = evaluator_->atoms()) {
    for (auto& [e, d] : weighted_ball(group(), *gens, r)) out.push_back(std::move(e));
  } else {
    throw Inconclusive("no ball enumeration available for " + description());
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

struct Frontier {
  Integer dist;
  Element element;
};

struct FrontierOrder {
  bool operator()(const Frontier& a, const Frontier& b) const { return a.dist > b.dist; }
};

}  // namespace

std::vector<std::pair<Element, Integer>> weighted_ball(const Group& group,
                                                       const std::vector<WeightedGenerator>& gens,
                                                       const Integer& radius,
                                                       std::size_t max_elements) {
  std::vector<const WeightedGenerator*> usable;
  for (const auto& g : gens) {
    if (g.weight <= radius) usable.push_back(&g);
  }
  std::sort(usable.begin(), usable.end(),
            [](const auto* a, const auto* b) { return a->weight < b->weight; });

  std::unordered_map<Element, Integer, ElementHash> best;
  std::unordered_map<Element, Integer, ElementHash> settled;
  std::priority_queue<Frontier, std::vector<Frontier>, FrontierOrder> pq;
  Element start = group.identity();
  best.emplace(start, 0);
  pq.push({Integer(0), start});
  while (!pq.empty()) {
    Frontier cur = pq.top();
    pq.pop();
    if (settled.count(cur.element)) continue;
    settled.emplace(cur.element, cur.dist);
    if (settled.size() > max_elements) {
      throw Inconclusive("ball search exceeded " + std::to_string(max_elements) + " elements");
    }
    for (const auto* g : usable) {
      Integer nd = cur.dist + g->weight;
      if (nd > radius) break;
      Element next = group.mul(cur.element, g->element);
      if (settled.count(next)) continue;
      auto it = best.find(next);
      if (it != best.end() && it->second <= nd) continue;
      best[next] = nd;
      pq.push({nd, std::move(next)});
    }
  }
  std::vector<std::pair<Element, Integer>> out(settled.begin(), settled.end());
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

}  // namespace nagata

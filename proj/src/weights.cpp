#include "nagata/weights.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>
#include <unordered_map>

namespace nagata {

WeightSystem WeightSystem::over_group(NormHandle base) {
  WeightSystem w(base.group());
  w.base_ = std::move(base);
  return w;
}

WeightSystem WeightSystem::finite(Group group) { return WeightSystem(group); }

WeightSystem WeightSystem::word(const Group& group) {
  WeightSystem w(group);
  for (const auto& g : group.standard_generators()) w.set_weight(g, 1);
  return w;
}

void WeightSystem::set_weight(const Element& s, const Integer& w) {
  if (s.is_identity()) throw std::invalid_argument("the identity carries weight 0 only");
  if (w <= 0) throw std::invalid_argument("generator weights must be positive");
  overrides_[s] = w;
  overrides_[group_.inverse(s)] = w;
}

std::optional<Integer> WeightSystem::weight(const Element& s) const {
  if (s.is_identity()) return Integer(0);
  if (auto it = overrides_.find(s); it != overrides_.end()) return it->second;
  if (base_) return (*base_)(s);
  return std::nullopt;
}

std::vector<WeightedGenerator> WeightSystem::generators_up_to(const Integer& bound) const {
  std::vector<WeightedGenerator> out;
  if (base_) {
    for (auto& s : base_->ball(bound)) {
      if (s.is_identity() || overrides_.count(s)) continue;
      out.push_back({s, (*base_)(s)});
    }
  }
  for (const auto& [s, w] : overrides_) {
    if (w <= bound) out.push_back({s, w});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.weight != b.weight) return a.weight < b.weight;
    return a.element < b.element;
  });
  return out;
}

std::string WeightSystem::description() const {
  std::string out = base_ ? "S=G,base=" + base_->description() : "S=finite";
  for (const auto& [s, w] : overrides_) out += ";" + format_coords(s) + ":" + to_string(w);
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

std::vector<Integer> norms_from_weights(const WeightSystem& w, const std::vector<Element>& targets,
                                        const SearchLimits& limits) {
  const Group& group = w.group();
  const std::size_t n = targets.size();
  std::vector<std::optional<Integer>> bound(n);  // single-factor cost, if x in S
  std::vector<std::optional<Integer>> result(n);
  std::unordered_map<Element, std::vector<std::size_t>, ElementHash> pending;
  bool unbounded = false;
  Integer limit = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (targets[i].is_identity()) {
      result[i] = Integer(0);
      continue;
    }
    bound[i] = w.weight(targets[i]);
    if (bound[i]) {
      if (*bound[i] > limit) limit = *bound[i];
    } else {
      unbounded = true;
    }
    pending[targets[i]].push_back(i);
  }
  if (pending.empty()) {
    std::vector<Integer> out;
    for (auto& r : result) out.push_back(*r);
    return out;
  }
  if (unbounded && w.base()) throw std::logic_error("whole-group systems bound every element");

  std::vector<WeightedGenerator> gens;
  if (unbounded) {
    for (const auto& [s, wt] : w.overrides()) gens.push_back({s, wt});
    std::sort(gens.begin(), gens.end(),
              [](const auto& a, const auto& b) { return a.weight < b.weight; });
  } else {
    gens = w.generators_up_to(limit);
  }

  // Largest bound among still-pending targets; paths at or above it are useless.
  auto pending_limit = [&]() -> std::optional<Integer> {
    if (unbounded) return std::nullopt;
    Integer best = 0;
    for (const auto& [e, idx] : pending) {
      for (auto i : idx) {
        if (*bound[i] > best) best = *bound[i];
      }
    }
    return best;
  };

  std::unordered_map<Element, Integer, ElementHash> best;
  std::unordered_map<Element, bool, ElementHash> settled;
  std::priority_queue<Frontier, std::vector<Frontier>, FrontierOrder> pq;
  pq.push({Integer(0), group.identity()});
  best.emplace(group.identity(), 0);
  std::optional<Integer> cutoff = pending_limit();

  while (!pq.empty() && !pending.empty()) {
    Frontier cur = pq.top();
    pq.pop();
    if (settled.count(cur.element)) continue;
    if (cutoff && cur.dist >= *cutoff) break;
    settled.emplace(cur.element, true);
    if (settled.size() > limits.max_settled) {
      throw Inconclusive("weight search exceeded " + std::to_string(limits.max_settled) +
                         " settled elements");
    }
    if (auto it = pending.find(cur.element); it != pending.end()) {
      for (auto i : it->second) {
        result[i] = (bound[i] && *bound[i] < cur.dist) ? *bound[i] : cur.dist;
      }
      pending.erase(it);
      cutoff = pending_limit();
      if (pending.empty()) break;
    }
    for (const auto& g : gens) {
      Integer nd = cur.dist + g.weight;
      if (cutoff && nd >= *cutoff) break;
      Element next = group.mul(cur.element, g.element);
      if (settled.count(next)) continue;
      auto it = best.find(next);
      if (it != best.end() && it->second <= nd) continue;
      best[next] = nd;
      pq.push({nd, std::move(next)});
    }
  }
  for (const auto& [e, idx] : pending) {
    for (auto i : idx) {
      if (!bound[i]) throw Inconclusive("target unreachable within search: " + format_coords(e));
      result[i] = *bound[i];
    }
  }
  std::vector<Integer> out;
  out.reserve(n);
  for (auto& r : result) out.push_back(*r);
  return out;
}

Integer norm_from_weights(const WeightSystem& w, const Element& x, const SearchLimits& limits) {
  return norms_from_weights(w, {x}, limits).front();
}

namespace {

class CentralOverrideNorm final : public NormEvaluator {
 public:
  CentralOverrideNorm(NormHandle base, CentralOverrides ov, std::size_t node_cap)
      : base_(std::move(base)), ov_(std::move(ov)), node_cap_(node_cap) {
    const Group& g = base_.group();
    if (ov_.h.empty()) throw std::invalid_argument("override needs at least one exponent");
    if (ov_.z.is_identity() || !g.is_central(ov_.z)) {
      throw std::invalid_argument("override element is not a non-trivial central element");
    }
    if (ov_.C <= 0) throw std::invalid_argument("override weight must be positive");
    for (const auto& h : ov_.h) {
      if (h <= 0) throw std::invalid_argument("override exponents must be positive");
    }
    order_.resize(ov_.h.size());
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
    // Cheapest cost per unit of exponent first.
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t a, std::size_t b) { return ov_.h[a] > ov_.h[b]; });
    min_ratio_ = Rational(ov_.C, ov_.h[order_.front()]);
    min_ratio_.canonicalize();
  }

  const Group& group() const override { return base_.group(); }

  std::string description() const override {
    std::string out = "override(" + base_.description() + ";z=" + format_coords(ov_.z) + ";h=";
    for (std::size_t i = 0; i < ov_.h.size(); ++i) {
      if (i) out += ",";
      out += to_string(ov_.h[i]);
    }
    return out + ";C=" + to_string(ov_.C) + ")";
  }

  std::optional<Integer> evaluate(const Element& x,
                                  const std::optional<Integer>& bound) const override {
    Search s(*this, x);
    if (bound) return s.run(*bound);
    if (s.cb.slope > 0) {
      Integer ub = s.greedy();
      auto better = s.run(ub);
      return better ? *better : ub;
    }
    Integer b = s.cb.offset + 1;
    for (;;) {
      if (auto v = s.run(b)) return v;
      b *= 2;
    }
  }

  CentralBound central_bound(const Element& z, const Element& x) const override {
    if (!(z == ov_.z)) return {};
    CentralBound b = base_.central_bound(z, x);
    if (min_ratio_ < b.slope) b.slope = min_ratio_;
    return b;
  }

  std::optional<std::vector<WeightedGenerator>> atoms() const override {
    auto gens = base_.evaluator().atoms();
    if (!gens) return std::nullopt;
    const Group& g = group();
    for (const auto& h : ov_.h) {
      gens->push_back({g.power(ov_.z, h), ov_.C});
      gens->push_back({g.power(ov_.z, -h), ov_.C});
    }
    return gens;
  }

 private:
  struct Search {
    Search(const CentralOverrideNorm& n, const Element& x) : self(n), x(x) {
      cb = self.base_.central_bound(self.ov_.z, x);
      const std::size_t m = self.order_.size();
      rest_slope.resize(m);
      Rational s = cb.slope;
      for (std::size_t pos = m; pos-- > 0;) {
        rest_slope[pos] = s;
        Rational r(self.ov_.C, self.ov_.h[self.order_[pos]]);
        r.canonicalize();
        if (r < s) s = r;
      }
    }

    Rational phi(const Integer& y, const Integer& h, const Integer& target,
                 const Rational& slope) const {
      Rational v = Rational(self.ov_.C * abs(y));
      if (slope != 0) v += slope * Rational(abs(target - y * h));
      return v;
    }

    Integer best_y(const Integer& h, const Integer& target, const Rational& slope) const {
      Integer cands[3] = {Integer(0), floor_div(target, h), ceil_div(target, h)};
      Integer y = cands[0];
      Rational v = phi(y, h, target, slope);
      for (int i = 1; i < 3; ++i) {
        Rational w = phi(cands[i], h, target, slope);
        if (w < v) {
          v = w;
          y = cands[i];
        }
      }
      return y;
    }

    Element shifted(const Integer& P) const {
      const Group& g = self.group();
      return g.mul(x, g.power(self.ov_.z, -P));
    }

    // Exact value of one greedy candidate; an upper bound on the norm.
    Integer greedy() {
      Integer P = 0, cost = 0;
      for (std::size_t pos = 0; pos < self.order_.size(); ++pos) {
        const Integer& h = self.ov_.h[self.order_[pos]];
        Integer y = best_y(h, cb.center - P, rest_slope[pos]);
        cost += self.ov_.C * abs(y);
        P += y * h;
      }
      return cost + self.base_(shifted(P));
    }

    std::optional<Integer> run(const Integer& bound) {
      best = bound;
      found.reset();
      dfs(0, Integer(0), Integer(0));
      return found;
    }

    void dfs(std::size_t pos, const Integer& P, const Integer& cost) {
      if (++nodes > self.node_cap_) {
        throw Inconclusive("closed-form search exceeded " + std::to_string(self.node_cap_) +
                           " nodes");
      }
      if (pos == self.order_.size()) {
        Integer room = best - cost;
        if (room <= 0) return;
        if (auto v = self.base_.below(shifted(P), room)) {
          best = cost + *v;
          found = best;
        }
        return;
      }
      const Integer& h = self.ov_.h[self.order_[pos]];
      const Rational& slope = rest_slope[pos];
      const Integer target = cb.center - P;
      const Integer y0 = best_y(h, target, slope);
      auto visit = [&](const Integer& y) {
        Integer slack = best - cost - cb.offset;
        if (phi(y, h, target, slope) >= Rational(slack)) return false;
        dfs(pos + 1, P + y * h, cost + self.ov_.C * abs(y));
        return true;
      };
      // phi is convex in y, so walking away from its minimum stops at the
      // first candidate that cannot beat the incumbent.
      for (Integer y = y0;; ++y) {
        if (!visit(y)) break;
      }
      for (Integer y = y0 - 1;; --y) {
        if (!visit(y)) break;
      }
    }

    const CentralOverrideNorm& self;
    const Element& x;
    CentralBound cb;
    std::vector<Rational> rest_slope;  // bound slope for everything after pos
    Integer best;
    std::optional<Integer> found;
    std::size_t nodes = 0;
  };

  NormHandle base_;
  CentralOverrides ov_;
  std::size_t node_cap_;
  std::vector<std::size_t> order_;
  Rational min_ratio_;
};

class WeightGeneratedNorm final : public NormEvaluator {
 public:
  WeightGeneratedNorm(WeightSystem w, SearchLimits limits)
      : w_(std::move(w)), limits_(limits) {}

  const Group& group() const override { return w_.group(); }
  std::string description() const override { return "weights(" + w_.description() + ")"; }

  std::optional<Integer> evaluate(const Element& x,
                                  const std::optional<Integer>& bound) const override {
    Integer v = norm_from_weights(w_, x, limits_);
    if (bound && v >= *bound) return std::nullopt;
    return v;
  }

  std::optional<std::vector<Element>> enumerate_ball(const Integer& r) const override {
    std::vector<WeightedGenerator> gens;
    if (w_.base()) {
      gens = w_.generators_up_to(r);
    } else {
      for (const auto& [s, wt] : w_.overrides()) gens.push_back({s, wt});
    }
    std::vector<Element> out;
    for (auto& [e, d] : weighted_ball(group(), gens, r, limits_.max_settled)) {
      out.push_back(std::move(e));
    }
    return out;
  }

 private:
  WeightSystem w_;
  SearchLimits limits_;
};

}  // namespace

Integer closed_form_norm(const NormHandle& base, const CentralOverrides& ov, const Element& x) {
  CentralOverrideNorm eval(base, ov, 5'000'000);
  return *eval.evaluate(x, std::nullopt);
}

NormHandle make_override_norm(const NormHandle& base, const CentralOverrides& ov,
                              Provenance provenance, std::size_t node_cap) {
  return NormHandle(std::make_shared<CentralOverrideNorm>(base, ov, node_cap), provenance);
}

NormHandle make_weight_generated_norm(const WeightSystem& w, const SearchLimits& limits) {
  return NormHandle(std::make_shared<WeightGeneratedNorm>(w, limits),
                    {ProvenanceKind::WeightGenerated});
}

WeightSystem override_weight_system(const NormHandle& base, const CentralOverrides& ov) {
  WeightSystem w = WeightSystem::over_group(base);
  for (const auto& h : ov.h) w.set_weight(base.group().power(ov.z, h), ov.C);
  return w;
}

}  // namespace nagata

#include "nagata/word_norms.hpp"

#include <cstdint>
#include <mutex>
#include <unordered_map>
#include <vector>

namespace nagata {
namespace {

std::optional<long> small_radius(const Integer& r) {
  if (!r.fits_slong_p()) return std::nullopt;
  return r.get_si();
}

// l1 norm on Z^d; also the word norm of {+-e_i}.
class L1Norm final : public NormEvaluator {
 public:
  explicit L1Norm(Group g) : group_(g) {}

  const Group& group() const override { return group_; }
  std::string description() const override { return "word(" + group_.name() + ")"; }

  std::optional<Integer> evaluate(const Element& x,
                                  const std::optional<Integer>& bound) const override {
    Integer sum = 0;
    for (const auto& c : x.coords()) sum += abs(c);
    if (bound && sum >= *bound) return std::nullopt;
    return sum;
  }

  CentralBound central_bound(const Element& z, const Element& x) const override {
    // Exact along a signed unit vector: ||x - t z|| = |t - z_i x_i| + sum_{j != i} |x_j|.
    std::optional<std::size_t> axis;
    for (std::size_t i = 0; i < z.size(); ++i) {
      if (z[i] == 0) continue;
      if (axis || abs(z[i]) != 1) return {};
      axis = i;
    }
    if (!axis) return {};
    CentralBound b;
    b.slope = 1;
    b.center = z[*axis] * x[*axis];
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (j != *axis) b.offset += abs(x[j]);
    }
    return b;
  }

  std::optional<std::vector<WeightedGenerator>> atoms() const override {
    std::vector<WeightedGenerator> out;
    for (auto& g : group_.standard_generators()) out.push_back({g, Integer(1)});
    return out;
  }

  std::optional<std::vector<Element>> enumerate_ball(const Integer& radius) const override {
    auto r = small_radius(radius);
    if (!r) throw Inconclusive("l1 ball radius too large");
    std::vector<Element> out;
    std::vector<Integer> coords(static_cast<std::size_t>(group_.dimension()));
    fill(0, *r, coords, out);
    return out;
  }

 private:
  void fill(std::size_t axis, long budget, std::vector<Integer>& coords,
            std::vector<Element>& out) const {
    if (axis == coords.size()) {
      out.push_back(group_.make(coords));
      return;
    }
    for (long v = -budget; v <= budget; ++v) {
      coords[axis] = v;
      fill(axis + 1, budget - (v < 0 ? -v : v), coords, out);
    }
    coords[axis] = 0;
  }

  Group group_;
};

struct Key {
  std::int64_t a, b, c;
  bool operator==(const Key&) const = default;
};

struct KeyHash {
  std::size_t operator()(const Key& k) const noexcept {
    std::size_t seed = std::hash<std::int64_t>{}(k.a);
    hash_combine(seed, std::hash<std::int64_t>{}(k.b));
    hash_combine(seed, std::hash<std::int64_t>{}(k.c));
    return seed;
  }
};

// Word norm on H3 for generators (+-1,0,0), (0,+-1,0) by breadth-first layers.
class HeisenbergWordNorm final : public NormEvaluator {
 public:
  HeisenbergWordNorm(Group g, std::size_t max_table) : group_(g), max_table_(max_table) {
    dist_.emplace(Key{0, 0, 0}, 0);
    frontier_.push_back(Key{0, 0, 0});
  }

  const Group& group() const override { return group_; }
  std::string description() const override { return "word(H3)"; }

  std::optional<Integer> evaluate(const Element& x,
                                  const std::optional<Integer>& bound) const override {
    // Abelianization gives |x1| + |x2| <= ||x||; each letter moves x3 by at
    // most |x1| <= length, so |x3| <= ||x||^2.
    Integer ab = abs(x[0]) + abs(x[1]);
    if (bound) {
      if (ab >= *bound) return std::nullopt;
      Integer limit = (*bound - 1) * (*bound - 1);
      if (abs(x[2]) > limit) return std::nullopt;
    }
    auto key = to_key(x);
    if (!key) throw Inconclusive("H3 coordinates out of table range");
    std::lock_guard lock(mu_);
    if (bound) {
      auto r = small_radius(*bound - 1);
      if (!r) throw Inconclusive("H3 radius too large");
      grow_to(*r);
      auto it = dist_.find(*key);
      if (it == dist_.end() || it->second >= *bound) return std::nullopt;
      return Integer(it->second);
    }
    for (;;) {
      auto it = dist_.find(*key);
      if (it != dist_.end()) return Integer(it->second);
      grow_to(radius_ + 1);
    }
  }

  CentralBound central_bound(const Element& z, const Element& x) const override {
    CentralBound b;
    if (z[0] == 0 && z[1] == 0 && z[2] != 0) b.offset = abs(x[0]) + abs(x[1]);
    return b;
  }

  std::optional<std::vector<WeightedGenerator>> atoms() const override {
    std::vector<WeightedGenerator> out;
    for (auto& g : group_.standard_generators()) out.push_back({g, Integer(1)});
    return out;
  }

  std::optional<std::vector<Element>> enumerate_ball(const Integer& radius) const override {
    auto r = small_radius(radius);
    if (!r) throw Inconclusive("H3 radius too large");
    std::lock_guard lock(mu_);
    grow_to(*r);
    std::vector<Element> out;
    for (const auto& [k, d] : dist_) {
      if (d <= *r) out.push_back(group_.make({Integer(k.a), Integer(k.b), Integer(k.c)}));
    }
    return out;
  }

 private:
  static std::optional<Key> to_key(const Element& x) {
    for (const auto& c : x.coords()) {
      if (!c.fits_slong_p()) return std::nullopt;
    }
    return Key{x[0].get_si(), x[1].get_si(), x[2].get_si()};
  }

  // Caller holds mu_.
  void grow_to(long r) const {
    static constexpr std::int64_t moves[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    while (radius_ < r) {
      std::vector<Key> next;
      for (const Key& k : frontier_) {
        for (const auto& m : moves) {
          // (a,b,c) * (da,db,0) = (a+da, b+db, c + a*db)
          Key n{k.a + m[0], k.b + m[1], k.c + k.a * m[1]};
          if (dist_.try_emplace(n, radius_ + 1).second) next.push_back(n);
        }
      }
      if (dist_.size() > max_table_) {
        throw Inconclusive("H3 word-norm table exceeded " + std::to_string(max_table_) +
                           " entries at radius " + std::to_string(radius_ + 1));
      }
      frontier_ = std::move(next);
      ++radius_;
    }
  }

  Group group_;
  std::size_t max_table_;
  mutable std::mutex mu_;
  mutable std::unordered_map<Key, long, KeyHash> dist_;
  mutable std::vector<Key> frontier_;
  mutable long radius_ = 0;
};

class ScaledNorm final : public NormEvaluator {
 public:
  ScaledNorm(NormHandle base, Integer factor) : base_(std::move(base)), factor_(std::move(factor)) {
    if (factor_ < 1) throw std::invalid_argument("scale factor must be >= 1");
  }

  const Group& group() const override { return base_.group(); }
  std::string description() const override {
    return to_string(factor_) + "*" + base_.description();
  }

  std::optional<Integer> evaluate(const Element& x,
                                  const std::optional<Integer>& bound) const override {
    if (!bound) return factor_ * base_(x);
    auto v = base_.below(x, ceil_div(*bound, factor_));
    if (!v) return std::nullopt;
    Integer scaled = factor_ * *v;
    if (scaled >= *bound) return std::nullopt;
    return scaled;
  }

  CentralBound central_bound(const Element& z, const Element& x) const override {
    CentralBound b = base_.central_bound(z, x);
    b.slope *= factor_;
    b.offset *= factor_;
    return b;
  }

  std::optional<std::vector<WeightedGenerator>> atoms() const override {
    auto gens = base_.evaluator().atoms();
    if (!gens) return std::nullopt;
    for (auto& g : *gens) g.weight *= factor_;
    return gens;
  }

 private:
  NormHandle base_;
  Integer factor_;
};

}  // namespace

NormHandle make_word_norm(const Group& group, std::size_t max_table) {
  if (group.kind() == GroupKind::Heisenberg) {
    return NormHandle(std::make_shared<HeisenbergWordNorm>(group, max_table),
                      {ProvenanceKind::Word});
  }
  return NormHandle(std::make_shared<L1Norm>(group), {ProvenanceKind::Word});
}

NormHandle make_scaled_norm(const NormHandle& base, const Integer& factor) {
  return NormHandle(std::make_shared<ScaledNorm>(base, factor), {ProvenanceKind::Analytic});
}

}  // namespace nagata

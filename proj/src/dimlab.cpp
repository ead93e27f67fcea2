#include "nagata/dimlab.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "nagata/parallel.hpp"

namespace nagata {

DilatationCheck is_dilatation(const FiniteMetricSpace& domain, const ImageDistance& image) {
  DilatationCheck out;
  const std::size_t n = domain.size();
  std::optional<Rational> C;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      ++out.pairs_checked;
      const Rational& d = domain.d(i, j);
      Rational e = image(i, j);
      if (d == 0) {
        if (e != 0) {
          out.witness = {i, j};
          out.reason = "coincident points with distinct images";
          return out;
        }
        continue;
      }
      Rational ratio = e / d;
      if (!C) {
        C = ratio;
      } else if (*C != ratio) {
        out.witness = {i, j};
        out.reason = "ratio " + to_string(ratio) + " differs from " + to_string(*C);
        return out;
      }
    }
  }
  if (!C) C = Rational(1);  // no pairs: any C >= 1 works
  if (*C < 1) {
    out.reason = "constant " + to_string(*C) + " is below 1";
    return out;
  }
  out.constant = C;
  return out;
}

DilatationCheck is_dilatation_identity(const FiniteMetricSpace& domain) {
  return is_dilatation(domain, [&](std::size_t i, std::size_t j) { return domain.d(i, j); });
}

DilatationCheck is_dilatation(const HomSpec& f, long k, const NormHandle& norm) {
  const Group& g = norm.group();
  auto points = lattice_ball(static_cast<long>(f.h.size()), k);
  auto domain = FiniteMetricSpace::lattice_points(points);
  std::vector<Element> images;
  for (const auto& x : points) images.push_back(f.apply(g, x));
  return is_dilatation(domain, [&](std::size_t i, std::size_t j) {
    return Rational(norm.distance(images[i], images[j]));
  });
}

WitnessReport witness_report(const TowerState& tower) {
  WitnessReport rep;
  const NormHandle& limit = tower.final_norm();
  const Group& g = limit.group();
  for (const auto& st : tower.stages) {
    StageWitness w;
    w.stage = st.index;
    w.k = st.step.params.k;
    w.m = st.step.params.m;
    w.C = st.step.params.C;
    auto check = is_dilatation(st.step.hom, w.k, limit);
    w.pairs_checked = check.pairs_checked;
    w.measured = check.constant;
    w.verified = check.constant && *check.constant == Rational(w.C);
    if (!w.verified) {
      auto points = lattice_ball(w.m, w.k);
      if (check.witness) {
        auto [i, j] = *check.witness;
        Integer l1 = 0;
        for (std::size_t c = 0; c < points[i].size(); ++c) l1 += abs(points[i][c] - points[j][c]);
        w.failure = PairWitness{points[i], points[j],
                                limit.distance(st.step.hom.apply(g, points[i]),
                                               st.step.hom.apply(g, points[j])),
                                w.C * l1};
      }
      if (rep.pass) rep.failed_stage = st.index;
      rep.pass = false;
    }
    rep.stages.push_back(std::move(w));
  }
  if (!tower.complete) rep.pass = false;
  rep.claimed_dimension = rep.pass ? static_cast<int>(tower.stages.size()) : 0;
  rep.claim = "asdim_AN(" + g.name() + ", d_limit) >= " + std::to_string(rep.claimed_dimension);
  return rep;
}

std::string to_string(CoverMode mode) { return mode == CoverMode::Exact ? "exact" : "greedy"; }

CoverMode parse_cover_mode(const std::string& text) {
  if (text == "exact") return CoverMode::Exact;
  if (text == "greedy") return CoverMode::Greedy;
  throw std::invalid_argument("mode must be \"exact\" or \"greedy\", got \"" + text + "\"");
}

namespace {

// Largest s-component diameter among `members`.
Rational family_diameter(const FiniteMetricSpace& X, const std::vector<std::size_t>& members,
                         const Rational& s) {
  if (members.size() < 2) return 0;
  Rational best = 0;
  for (const auto& comp : s_components(X, s, members)) {
    Rational d = diameter(X, comp);
    if (d > best) best = d;
  }
  return best;
}

std::vector<std::vector<std::size_t>> families_of(const std::vector<int>& assignment, int n) {
  std::vector<std::vector<std::size_t>> fam(static_cast<std::size_t>(n + 1));
  for (std::size_t i = 0; i < assignment.size(); ++i) fam[static_cast<std::size_t>(assignment[i])].push_back(i);
  return fam;
}

// Relabel families by first occurrence; the lexicographically least labelling.
std::vector<int> canonical(const std::vector<int>& assignment, int n) {
  std::vector<int> map(static_cast<std::size_t>(n + 1), -1), out(assignment.size());
  int next = 0;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    int& m = map[static_cast<std::size_t>(assignment[i])];
    if (m < 0) m = next++;
    out[i] = m;
  }
  return out;
}

CoverSolution make_solution(int n, const Rational& s, CoverMode mode,
                            std::vector<int> assignment, const Rational& D) {
  CoverSolution sol;
  sol.n = n;
  sol.s = s;
  sol.mode = mode;
  sol.families = families_of(assignment, n);
  sol.assignment = std::move(assignment);
  sol.D = D;
  return sol;
}

// Branch and bound over restricted growth strings. D of a prefix can only
// grow as points are added, so it bounds every completion from below.
class ExactSearch {
 public:
  ExactSearch(const FiniteMetricSpace& X, int n, const Rational& s) : X_(X), n_(n), s_(s) {}

  struct Result {
    std::optional<Rational> D;
    std::vector<int> assignment;
  };

  Result run(std::vector<int> prefix, const Rational& ceiling) {
    best_ = ceiling;
    have_ = false;
    cur_ = std::move(prefix);
    fam_.assign(static_cast<std::size_t>(n_ + 1), {});
    for (std::size_t i = 0; i < cur_.size(); ++i) fam_[static_cast<std::size_t>(cur_[i])].push_back(i);
    Rational d = 0;
    for (const auto& f : fam_) d = std::max(d, family_diameter(X_, f, s_));
    if (d <= best_) dfs(d);
    Result r;
    if (have_) {
      r.D = best_;
      r.assignment = best_assignment_;
    }
    return r;
  }

 private:
  void dfs(const Rational& partial) {
    const std::size_t i = cur_.size();
    if (i == X_.size()) {
      if (!have_ || partial < best_) {
        best_ = partial;
        best_assignment_ = cur_;
        have_ = true;
      }
      return;
    }
    int top = cur_.empty() ? -1 : *std::max_element(cur_.begin(), cur_.end());
    for (int f = 0; f <= std::min(top + 1, n_); ++f) {
      auto& fam = fam_[static_cast<std::size_t>(f)];
      fam.push_back(i);
      Rational d = std::max(partial, family_diameter(X_, fam, s_));
      // strict improvement only, so the first optimum found is the least
      if (!have_ ? d <= best_ : d < best_) {
        cur_.push_back(f);
        dfs(d);
        cur_.pop_back();
      }
      fam.pop_back();
    }
  }

  const FiniteMetricSpace& X_;
  int n_;
  Rational s_;
  Rational best_;
  bool have_ = false;
  std::vector<int> cur_, best_assignment_;
  std::vector<std::vector<std::size_t>> fam_;
};

void rgs_prefixes(std::size_t len, int n, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (cur.size() == len) {
    out.push_back(cur);
    return;
  }
  int top = cur.empty() ? -1 : *std::max_element(cur.begin(), cur.end());
  for (int f = 0; f <= std::min(top + 1, n); ++f) {
    cur.push_back(f);
    rgs_prefixes(len, n, cur, out);
    cur.pop_back();
  }
}

bool within_cap(std::size_t points, int n, std::size_t cap) {
  Integer total = 1;
  for (std::size_t i = 0; i < points; ++i) {
    total *= n + 1;
    if (total > cap) return false;
  }
  return true;
}

}  // namespace

Rational cover_diameter(const FiniteMetricSpace& X, const std::vector<int>& assignment, int n,
                        const Rational& s) {
  Rational D = 0;
  for (const auto& fam : families_of(assignment, n)) D = std::max(D, family_diameter(X, fam, s));
  return D;
}

CoverSolution solve_cover_exact(const FiniteMetricSpace& X, int n, const Rational& s,
                                const CoverOptions& options) {
  if (n < 0) throw std::invalid_argument("n must be nonnegative");
  if (!within_cap(X.size(), n, options.exact_cap)) {
    throw Inconclusive("exact cover search over " + std::to_string(n + 1) + "^" +
                       std::to_string(X.size()) + " assignments exceeds the cap of " +
                       std::to_string(options.exact_cap));
  }
  if (X.size() == 0) return make_solution(n, s, CoverMode::Exact, {}, 0);

  // A trivial upper bound seeds the search: everything in family 0.
  std::vector<int> all_zero(X.size(), 0);
  const Rational ceiling = cover_diameter(X, all_zero, n, s);

  std::vector<std::vector<int>> prefixes;
  std::vector<int> cur;
  rgs_prefixes(std::min<std::size_t>(X.size(), 4), n, cur, prefixes);
  std::vector<ExactSearch::Result> results(prefixes.size());
  parallel_for(prefixes.size(), [&](std::size_t t) {
    ExactSearch search(X, n, s);
    results[t] = search.run(prefixes[t], ceiling);
  });
  // prefixes are in lexicographic order, so the first minimum is the least
  std::optional<std::size_t> pick;
  for (std::size_t t = 0; t < results.size(); ++t) {
    if (!results[t].D) continue;
    if (!pick || *results[t].D < *results[*pick].D) pick = t;
  }
  if (!pick) throw std::logic_error("exact cover search found no assignment");
  return make_solution(n, s, CoverMode::Exact, results[*pick].assignment, *results[*pick].D);
}

CoverSolution solve_cover_greedy(const FiniteMetricSpace& X, int n, const Rational& s,
                                 const CoverOptions& options) {
  if (n < 0) throw std::invalid_argument("n must be nonnegative");
  const std::size_t N = X.size();
  if (N == 0) return make_solution(n, s, CoverMode::Greedy, {}, 0);
  const int F = n + 1;

  std::vector<std::vector<int>> candidates;
  candidates.emplace_back(N, 0);

  // Lattice points: diagonal layers of width L, cycled through the families.
  if (X.lattice()) {
    const auto& pts = *X.lattice();
    std::vector<Integer> layer(N);
    for (std::size_t i = 0; i < N; ++i) {
      layer[i] = 0;
      for (const auto& c : pts[i]) layer[i] += c;
    }
    const long max_L = std::max<long>(1, ceil_of(s).get_si() + 1);
    for (long L = 1; L <= max_L; ++L) {
      for (long off = 0; off < L * F; ++off) {
        std::vector<int> a(N);
        for (std::size_t i = 0; i < N; ++i) {
          Integer q = floor_div(layer[i] + off, Integer(L));
          Integer r = q % F;
          if (r < 0) r += F;
          a[i] = static_cast<int>(r.get_si());
        }
        candidates.push_back(std::move(a));
      }
    }
  }

  // Farthest-point seeds grow clusters; clusters closer than s get distinct
  // families where the palette allows.
  {
    std::vector<std::size_t> order{0};
    std::vector<Rational> gap(N);
    for (std::size_t i = 0; i < N; ++i) gap[i] = X.d(0, i);
    std::vector<bool> used(N, false);
    used[0] = true;
    while (order.size() < N) {
      std::size_t far = N;
      for (std::size_t i = 0; i < N; ++i) {
        if (!used[i] && (far == N || gap[i] > gap[far])) far = i;
      }
      used[far] = true;
      order.push_back(far);
      for (std::size_t i = 0; i < N; ++i) gap[i] = std::min(gap[i], X.d(far, i));
    }
    for (const Rational& radius : {Rational(s / 2), s, Rational(2 * s)}) {
      std::vector<long> cluster(N, -1);
      std::vector<std::size_t> centers;
      for (std::size_t c : order) {
        if (cluster[c] >= 0) continue;
        cluster[c] = static_cast<long>(centers.size());
        for (std::size_t i = 0; i < N; ++i) {
          if (cluster[i] < 0 && X.d(c, i) <= radius) cluster[i] = static_cast<long>(centers.size());
        }
        centers.push_back(c);
      }
      std::vector<int> color(centers.size(), 0);
      for (std::size_t a = 0; a < centers.size(); ++a) {
        std::vector<int> clash(static_cast<std::size_t>(F), 0);
        for (std::size_t i = 0; i < N; ++i) {
          if (static_cast<std::size_t>(cluster[i]) != a) continue;
          for (std::size_t j = 0; j < N; ++j) {
            auto b = static_cast<std::size_t>(cluster[j]);
            if (b < a && X.d(i, j) < s) ++clash[static_cast<std::size_t>(color[b])];
          }
        }
        color[a] = static_cast<int>(std::min_element(clash.begin(), clash.end()) - clash.begin());
      }
      std::vector<int> a(N);
      for (std::size_t i = 0; i < N; ++i) a[i] = color[static_cast<std::size_t>(cluster[i])];
      candidates.push_back(std::move(a));
    }
  }

  std::vector<int> best;
  Rational bestD;
  for (auto& c : candidates) {
    Rational D = cover_diameter(X, c, n, s);
    if (best.empty() || D < bestD) {
      bestD = D;
      best = c;
    }
  }

  // Single-point moves while they lower D.
  for (std::size_t round = 0; round < options.local_search_rounds && bestD > 0; ++round) {
    bool improved = false;
    for (std::size_t i = 0; i < N && !improved; ++i) {
      for (int f = 0; f < F && !improved; ++f) {
        if (f == best[i]) continue;
        int old = best[i];
        best[i] = f;
        Rational D = cover_diameter(X, best, n, s);
        if (D < bestD) {
          bestD = D;
          improved = true;
        } else {
          best[i] = old;
        }
      }
    }
    if (!improved) break;
  }
  return make_solution(n, s, CoverMode::Greedy, canonical(best, n), bestD);
}

std::vector<CoverSolution> control_function_estimate(const FiniteMetricSpace& X, int n,
                                                     const std::vector<Rational>& scales,
                                                     CoverMode mode, const CoverOptions& options) {
  std::vector<CoverSolution> out;
  for (const auto& s : scales) {
    if (s <= 0) throw std::invalid_argument("scales must be positive");
    out.push_back(mode == CoverMode::Exact ? solve_cover_exact(X, n, s, options)
                                           : solve_cover_greedy(X, n, s, options));
  }
  return out;
}

bool validate_cover(const FiniteMetricSpace& X, const CoverSolution& sol) {
  if (sol.n < 0 || sol.families.size() != static_cast<std::size_t>(sol.n + 1)) return false;
  if (sol.assignment.size() != X.size()) return false;
  std::vector<int> seen(X.size(), -1);
  for (std::size_t f = 0; f < sol.families.size(); ++f) {
    for (auto i : sol.families[f]) {
      if (i >= X.size() || seen[i] >= 0) return false;
      seen[i] = static_cast<int>(f);
    }
  }
  for (std::size_t i = 0; i < X.size(); ++i) {
    if (seen[i] < 0 || seen[i] != sol.assignment[i]) return false;
  }
  Rational D = 0;
  for (const auto& fam : sol.families) {
    // from scratch: components by repeated flooding, diameters by all pairs
    std::vector<bool> done(fam.size(), false);
    for (std::size_t a = 0; a < fam.size(); ++a) {
      if (done[a]) continue;
      std::vector<std::size_t> comp{a}, stack{a};
      done[a] = true;
      while (!stack.empty()) {
        std::size_t u = stack.back();
        stack.pop_back();
        for (std::size_t b = 0; b < fam.size(); ++b) {
          if (!done[b] && X.d(fam[u], fam[b]) < sol.s) {
            done[b] = true;
            comp.push_back(b);
            stack.push_back(b);
          }
        }
      }
      for (auto u : comp)
        for (auto v : comp) D = std::max(D, X.d(fam[u], fam[v]));
    }
  }
  return D == sol.D;
}

}  // namespace nagata

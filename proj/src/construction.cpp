#include "nagata/construction.hpp"

#include <algorithm>
#include <stdexcept>

#include "nagata/parallel.hpp"
#include "nagata/weights.hpp"
#include "nagata/word_norms.hpp"

namespace nagata {

ScaleChoice choose_params(long k, long m, const Integer& R) {
  if (k < 1 || m < 1) throw std::invalid_argument("k and m must be positive");
  if (R < 1) throw std::invalid_argument("R must be positive");
  Integer C = R + 1;
  Integer a = Integer(2 * k * m * m) * C + 1;
  return {a, C};
}

std::vector<long> choose_p(long k, long m) {
  if (k < 1 || m < 1) throw std::invalid_argument("k and m must be positive");
  std::vector<long> p{1};
  Integer sum = 0;
  for (long j = 2; j <= m; ++j) {
    sum += Integer(2 * k * m) * pow2(static_cast<unsigned long>(p.back()));
    long e = p.back() + 1;
    while (pow2(static_cast<unsigned long>(e)) <= sum) ++e;
    p.push_back(e);
  }
  return p;
}

std::vector<std::string> admissibility_problems(const LemmaParams& p) {
  std::vector<std::string> out;
  const Integer km2 = Integer(2 * p.k * p.m * p.m);
  if (!(p.R < p.C)) out.push_back("R < C fails: R=" + to_string(p.R) + ", C=" + to_string(p.C));
  if (!(p.C * km2 < p.a)) {
    out.push_back("C < a/(2km^2) fails: C=" + to_string(p.C) + ", a=" + to_string(p.a) +
                  ", 2km^2=" + to_string(km2));
  }
  if (p.h1 <= 0) out.push_back("h1 must be positive");
  if (p.p.size() != static_cast<std::size_t>(p.m) || p.h.size() != p.p.size()) {
    out.push_back("p and h must have m entries");
    return out;
  }
  if (p.p[0] != 1) out.push_back("p_1 must be 1");
  Integer sum = 0;
  for (std::size_t j = 0; j < p.p.size(); ++j) {
    if (j > 0) {
      sum += Integer(2 * p.k * p.m) * pow2(static_cast<unsigned long>(p.p[j - 1]));
      if (!(sum < pow2(static_cast<unsigned long>(p.p[j])))) {
        out.push_back("exponent gap fails at p_" + std::to_string(j + 1));
      }
    }
  }
  for (std::size_t j = 1; j < p.h.size(); ++j) {
    if (p.h[j] != pow2(static_cast<unsigned long>(p.p[j])) * p.h1) {
      out.push_back("h_" + std::to_string(j + 1) + " != 2^p_" + std::to_string(j + 1) + " h_1");
    }
  }
  if (!p.h.empty() && p.h[0] != p.h1) out.push_back("h_1 mismatch");
  return out;
}

std::string to_string(H1Mode mode) { return mode == H1Mode::Bounded ? "bounded" : "exact"; }

H1Mode parse_h1_mode(const std::string& text) {
  if (text == "bounded") return H1Mode::Bounded;
  if (text == "exact") return H1Mode::Exact;
  throw std::invalid_argument("h1_mode must be \"bounded\" or \"exact\", got \"" + text + "\"");
}

Rational slope_lower_bound(const NormHandle& norm, const Element& z) {
  return norm.central_bound(z, norm.group().identity()).slope;
}

Rational slope_recurrence(const std::vector<LemmaParams>& stages) {
  Rational sigma = 1;
  for (const auto& st : stages) {
    Rational r(st.C, st.h.back());
    r.canonicalize();
    if (r < sigma) sigma = r;
  }
  return sigma;
}

H1Result find_h1(const NormHandle& base, const Element& z, const Integer& a, H1Mode mode,
                 std::size_t scan_cap) {
  const Group& g = base.group();
  if (!g.is_central(z) || z.is_identity()) throw std::invalid_argument("z must be central and nontrivial");
  if (a < 1) throw std::invalid_argument("a must be positive");
  H1Result res;
  res.mode = mode;
  res.slope = slope_lower_bound(base, z);
  if (res.slope > 0) {
    Integer H = ceil_of(Rational(a) / res.slope);
    if (H < 1) H = 1;
    res.bounded = H;
    res.h1 = H;
    res.certificate = "slope " + to_string(res.slope) + ": |h| >= " + to_string(H) + " gives ||z^h|| >= a";
    if (mode == H1Mode::Bounded) return res;
    // Every h in [h1, H) checked; the slope covers the rest.
    std::size_t scanned = 0;
    for (Integer h = H - 1; h >= 1; --h) {
      if (++scanned > scan_cap) throw Inconclusive("h1 scan exceeded " + std::to_string(scan_cap) + " exponents");
      if (base.below(g.power(z, h), a)) break;
      res.h1 = h;
    }
    res.certificate += "; scanned [" + to_string(res.h1) + ", " + to_string(H) + ")";
    return res;
  }
  if (mode == H1Mode::Bounded) {
    throw std::invalid_argument("bounded h1 needs a slope certificate, none for " + base.description());
  }
  // No slope: every z^t with ||z^t|| < a lies in the ball of radius a - 1.
  Integer top = 0;
  std::size_t count = 0;
  for (const auto& x : base.ball(a - 1)) {
    if (auto t = g.cyclic_exponent(z, x)) {
      ++count;
      if (abs(*t) > top) top = abs(*t);
    }
  }
  res.h1 = top + 1;
  res.certificate = "ball of radius " + to_string(Integer(a - 1)) + " holds " + std::to_string(count) +
                    " powers of z, max |t| = " + to_string(top);
  return res;
}

Element HomSpec::apply(const Group& g, const std::vector<Integer>& x) const {
  if (x.size() != h.size()) throw std::invalid_argument("homomorphism argument has wrong length");
  Integer e = 0;
  for (std::size_t i = 0; i < x.size(); ++i) e += x[i] * h[i];
  return g.power(z, e);
}

LemmaStepResult lemma_step(const NormHandle& base, const Element& z, long k, long m,
                           const Integer& R, const LemmaOptions& options) {
  const Group& g = base.group();
  if (!g.is_central(z) || z.is_identity()) throw std::invalid_argument("z must be central and nontrivial");
  ScaleChoice sc = choose_params(k, m, R);
  LemmaParams p;
  p.k = k;
  p.m = m;
  p.R = R;
  p.a = options.overrides.a.value_or(sc.a);
  p.C = options.overrides.C.value_or(sc.C);
  p.p = choose_p(k, m);

  H1Result h1;
  if (options.overrides.h1) {
    h1.h1 = *options.overrides.h1;
    h1.mode = options.h1_mode;
    h1.slope = slope_lower_bound(base, z);
    h1.certificate = "configured";
  } else {
    h1 = find_h1(base, z, p.a, options.h1_mode);
  }
  p.h1 = h1.h1;
  if (p.h1 <= 0) throw std::invalid_argument("h1 must be positive");
  if (p.C <= 0 || p.a <= 0) throw std::invalid_argument("a and C must be positive");
  p.h.push_back(p.h1);
  for (std::size_t j = 1; j < p.p.size(); ++j) {
    p.h.push_back(pow2(static_cast<unsigned long>(p.p[j])) * p.h1);
  }

  Provenance prov{ProvenanceKind::WeightGenerated};
  if (options.stage) prov = {ProvenanceKind::TowerStage, *options.stage};
  NormHandle norm = make_override_norm(base, {z, p.h, p.C}, prov);
  auto problems = admissibility_problems(p);
  return LemmaStepResult{p, h1, base, norm, HomSpec{z, p.h}, problems};
}

std::vector<std::vector<Integer>> lattice_ball(long m, long k) {
  std::vector<std::vector<Integer>> out;
  std::vector<long> cur(static_cast<std::size_t>(m), -k);
  // Odometer over [-k, k]^m, keeping the l1 ball, lexicographic.
  for (;;) {
    long l1 = 0;
    for (long c : cur) l1 += c < 0 ? -c : c;
    if (l1 <= k) {
      std::vector<Integer> v;
      for (long c : cur) v.emplace_back(c);
      out.push_back(std::move(v));
    }
    long i = m - 1;
    while (i >= 0 && cur[static_cast<std::size_t>(i)] == k) {
      cur[static_cast<std::size_t>(i)] = -k;
      --i;
    }
    if (i < 0) break;
    ++cur[static_cast<std::size_t>(i)];
  }
  return out;
}

LemmaCertificate verify_lemma_conditions(const LemmaStepResult& res, const Integer& radius) {
  LemmaCertificate cert;
  cert.radius = radius;
  const Group& g = res.norm.group();
  const auto window = res.base.ball(radius);
  const std::size_t n = window.size();

  std::vector<Integer> old_v(n), new_v(n);
  parallel_for(n, [&](std::size_t i) {
    old_v[i] = res.base(window[i]);
    new_v[i] = res.norm(window[i]);
  });
  cert.norm_bound.checked = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (new_v[i] > old_v[i] && cert.norm_bound.pass) {
      cert.norm_bound.pass = false;
      cert.norm_bound.element = NormWitness{window[i], new_v[i], old_v[i]};
    }
    if (new_v[i] <= res.params.R) {
      ++cert.threshold.checked;
      if (new_v[i] != old_v[i] && cert.threshold.pass) {
        cert.threshold.pass = false;
        cert.threshold.element = NormWitness{window[i], new_v[i], old_v[i]};
      }
    }
  }

  const auto points = lattice_ball(res.params.m, res.params.k);
  const std::size_t L = points.size();
  std::vector<Element> images;
  for (const auto& x : points) images.push_back(res.hom.apply(g, x));
  std::vector<std::optional<PairWitness>> first_bad(L);
  std::vector<Integer> row_max(L);
  parallel_for(L, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < L; ++j) {
      Integer d = res.norm.distance(images[i], images[j]);
      Integer l1 = 0;
      for (std::size_t c = 0; c < points[i].size(); ++c) l1 += abs(points[i][c] - points[j][c]);
      Integer expected = res.params.C * l1;
      if (d > row_max[i]) row_max[i] = d;
      if (d != expected && !first_bad[i]) first_bad[i] = PairWitness{points[i], points[j], d, expected};
    }
  });
  cert.dilatation.checked = L * (L - 1) / 2;
  cert.image_diameter = 0;
  for (std::size_t i = 0; i < L; ++i) {
    if (row_max[i] > cert.image_diameter) cert.image_diameter = row_max[i];
    if (first_bad[i] && cert.dilatation.pass) {
      cert.dilatation.pass = false;
      cert.dilatation.pair = first_bad[i];
    }
  }
  return cert;
}

std::vector<std::string> TowerConfig::problems() const {
  std::vector<std::string> out;
  if (steps < 0) out.push_back("steps must be nonnegative");
  const auto need = static_cast<std::size_t>(std::max(steps, 0));
  if (k.size() < need) out.push_back("k has fewer entries than steps");
  if (M.size() < need) out.push_back("M has fewer entries than steps");
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (k[i] < 1) out.push_back("k entries must be positive");
    if (i > 0 && k[i] <= k[i - 1]) out.push_back("k must be strictly increasing");
  }
  for (std::size_t i = 0; i < M.size(); ++i) {
    if (M[i] < 1) out.push_back("M entries must be positive");
    if (i > 0 && M[i] <= M[i - 1]) out.push_back("M must be strictly increasing");
  }
  if (verify_radius < 0) out.push_back("verify_radius must be nonnegative");
  return out;
}

Integer next_threshold(const Integer& M_next, const Integer& R_prev, const Integer& diameter) {
  Integer r = M_next;
  if (R_prev + 1 > r) r = R_prev + 1;
  if (diameter + 1 > r) r = diameter + 1;
  return r;
}

TowerState build_tower(const TowerConfig& config, const NormHook& prepare) {
  return build_tower(config, make_word_norm(config.group), prepare);
}

TowerState build_tower(const TowerConfig& config, const NormHandle& base, const NormHook& prepare) {
  if (auto problems = config.problems(); !problems.empty()) {
    throw std::invalid_argument("tower config: " + problems.front());
  }
  if (!(base.group() == config.group)) throw std::invalid_argument("base norm lives on another group");
  TowerState t{config, config.group.center_generator(), base, {}, false};
  if (prepare) prepare(base);
  NormHandle prev = base;
  Integer R;
  for (int i = 1; i <= config.steps; ++i) {
    const auto idx = static_cast<std::size_t>(i - 1);
    if (i == 1) {
      R = config.M[0];
    } else {
      R = next_threshold(config.M[idx], R, t.stages.back().certificate.image_diameter);
    }
    LemmaOptions opt;
    opt.h1_mode = config.h1_mode;
    opt.stage = i;
    if (auto it = config.overrides.find(i); it != config.overrides.end()) opt.overrides = it->second;
    LemmaStepResult step = lemma_step(prev, t.z, config.k[idx], i, R, opt);
    if (prepare) prepare(step.norm);
    LemmaCertificate cert = verify_lemma_conditions(step, config.verify_radius);
    const bool ok = cert.pass();
    prev = step.norm;
    t.stages.push_back(TowerStage{i, R, std::move(step), std::move(cert)});
    if (!ok) return t;
  }
  t.complete = true;
  return t;
}

LimitValue limit_norm(const TowerState& tower, const Element& x) {
  LimitValue out;
  out.per_stage.push_back(tower.base(x));
  for (const auto& st : tower.stages) out.per_stage.push_back(st.step.norm(x));
  out.value = out.per_stage.back();
  out.stabilized = x.is_identity() || (!tower.stages.empty() && out.value <= tower.stages.back().R);
  return out;
}

}  // namespace nagata

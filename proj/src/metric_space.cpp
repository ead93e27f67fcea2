#include "nagata/metric_space.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "nagata/parallel.hpp"

namespace nagata {
namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

FiniteMetricSpace::FiniteMetricSpace(std::vector<std::string> labels, std::vector<Rational> distances)
    : labels_(std::move(labels)), dist_(std::move(distances)) {
  if (dist_.size() != labels_.size() * labels_.size()) {
    throw std::invalid_argument("distance matrix must be n x n");
  }
}

FiniteMetricSpace FiniteMetricSpace::from_matrix(const std::vector<std::vector<Rational>>& rows) {
  std::vector<std::string> labels;
  std::vector<Rational> flat;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size()) throw std::invalid_argument("distance matrix must be square");
    labels.push_back(std::to_string(i));
    flat.insert(flat.end(), rows[i].begin(), rows[i].end());
  }
  return FiniteMetricSpace(std::move(labels), std::move(flat));
}

FiniteMetricSpace FiniteMetricSpace::from_points(const NormHandle& norm,
                                                 const std::vector<Element>& points) {
  const std::size_t n = points.size();
  std::vector<std::string> labels;
  for (const auto& p : points) labels.push_back(format_coords(p));
  std::vector<Rational> flat(n * n);
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      Integer d = norm.distance(points[i], points[j]);
      flat[i * n + j] = Rational(d);
      flat[j * n + i] = Rational(d);
    }
  });
  FiniteMetricSpace X(std::move(labels), std::move(flat));
  if (norm.group().is_abelian() && norm.provenance().kind == ProvenanceKind::Word) {
    std::vector<std::vector<Integer>> coords;
    for (const auto& p : points) coords.push_back(p.coords());
    X.lattice_ = std::move(coords);
  }
  return X;
}

FiniteMetricSpace FiniteMetricSpace::lattice_points(const std::vector<std::vector<Integer>>& points) {
  const std::size_t n = points.size();
  std::vector<std::string> labels;
  std::vector<Rational> flat(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string label;
    for (std::size_t k = 0; k < points[i].size(); ++k) {
      if (k) label += ',';
      label += to_string(points[i][k]);
    }
    labels.push_back(std::move(label));
    for (std::size_t j = 0; j < n; ++j) {
      if (points[j].size() != points[i].size()) {
        throw std::invalid_argument("lattice points must share a dimension");
      }
      Integer sum = 0;
      for (std::size_t k = 0; k < points[i].size(); ++k) sum += abs(points[i][k] - points[j][k]);
      flat[i * n + j] = Rational(sum);
    }
  }
  FiniteMetricSpace X(std::move(labels), std::move(flat));
  X.lattice_ = points;
  return X;
}

FiniteMetricSpace FiniteMetricSpace::parse_csv(std::istream& in) {
  std::vector<std::vector<Rational>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::vector<Rational> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      auto b = cell.find_first_not_of(" \t");
      auto e = cell.find_last_not_of(" \t");
      if (b == std::string::npos) throw std::invalid_argument("empty cell in distance matrix");
      row.push_back(parse_rational(cell.substr(b, e - b + 1)));
    }
    rows.push_back(std::move(row));
  }
  FiniteMetricSpace X = from_matrix(rows);
  if (auto problems = X.validate(); !problems.empty()) {
    throw std::invalid_argument("not a metric: " + problems.front());
  }
  return X;
}

FiniteMetricSpace FiniteMetricSpace::subspace(const std::vector<std::size_t>& indices) const {
  const std::size_t n = indices.size();
  std::vector<std::string> labels;
  std::vector<Rational> flat(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    labels.push_back(labels_.at(indices[a]));
    for (std::size_t b = 0; b < n; ++b) flat[a * n + b] = d(indices[a], indices[b]);
  }
  FiniteMetricSpace X(std::move(labels), std::move(flat));
  if (lattice_) {
    std::vector<std::vector<Integer>> coords;
    for (auto i : indices) coords.push_back((*lattice_)[i]);
    X.lattice_ = std::move(coords);
  }
  return X;
}

std::vector<std::string> FiniteMetricSpace::validate() const {
  std::vector<std::string> problems;
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    if (d(i, i) != 0) problems.push_back("nonzero diagonal at " + std::to_string(i));
    for (std::size_t j = 0; j < n; ++j) {
      if (d(i, j) < 0) problems.push_back("negative distance " + std::to_string(i) + "," + std::to_string(j));
      if (d(i, j) != d(j, i)) problems.push_back("asymmetric " + std::to_string(i) + "," + std::to_string(j));
      if (i != j && d(i, j) == 0) problems.push_back("distinct points at distance 0: " +
                                                     std::to_string(i) + "," + std::to_string(j));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        if (d(i, k) > d(i, j) + d(j, k)) {
          problems.push_back("triangle inequality fails at " + std::to_string(i) + "," +
                             std::to_string(j) + "," + std::to_string(k));
        }
      }
    }
  }
  return problems;
}

FiniteMetricSpace ball_space(const NormHandle& norm, const Integer& r) {
  return FiniteMetricSpace::from_points(norm, norm.ball(r));
}

std::vector<std::vector<std::size_t>> s_components(const FiniteMetricSpace& X, const Rational& s,
                                                   const std::vector<std::size_t>& subset) {
  UnionFind uf(subset.size());
  for (std::size_t a = 0; a < subset.size(); ++a) {
    for (std::size_t b = a + 1; b < subset.size(); ++b) {
      if (X.d(subset[a], subset[b]) < s) uf.unite(a, b);
    }
  }
  std::map<std::size_t, std::vector<std::size_t>> classes;
  for (std::size_t a = 0; a < subset.size(); ++a) classes[uf.find(a)].push_back(subset[a]);
  std::vector<std::vector<std::size_t>> out;
  for (auto& [root, members] : classes) {
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

std::vector<std::vector<std::size_t>> s_components(const FiniteMetricSpace& X, const Rational& s) {
  std::vector<std::size_t> all(X.size());
  std::iota(all.begin(), all.end(), 0);
  return s_components(X, s, all);
}

Rational diameter(const FiniteMetricSpace& X, const std::vector<std::size_t>& subset) {
  Rational best = 0;
  for (std::size_t a = 0; a < subset.size(); ++a) {
    for (std::size_t b = a + 1; b < subset.size(); ++b) {
      if (X.d(subset[a], subset[b]) > best) best = X.d(subset[a], subset[b]);
    }
  }
  return best;
}

std::vector<EnvelopeRow> coarse_envelopes(const NormHandle& a, const NormHandle& b,
                                          const Integer& radius) {
  if (!(a.group() == b.group())) throw std::invalid_argument("envelopes need norms on one group");
  const auto points = a.ball(radius);
  const Group& g = a.group();
  const std::size_t n = points.size();
  std::vector<std::map<Integer, EnvelopeRow>> partial(n);
  parallel_for(n, [&](std::size_t i) {
    auto& rows = partial[i];
    const Element inv = g.inverse(points[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      Element diff = g.mul(inv, points[j]);
      Integer t = a(diff);
      Integer u = b(diff);
      auto [it, inserted] = rows.try_emplace(t, EnvelopeRow{t, u, u, 0});
      if (!inserted) {
        if (u < it->second.lower) it->second.lower = u;
        if (u > it->second.upper) it->second.upper = u;
      }
      ++it->second.pairs;
    }
  });
  std::map<Integer, EnvelopeRow> merged;
  for (auto& rows : partial) {
    for (auto& [t, row] : rows) {
      auto [it, inserted] = merged.try_emplace(t, row);
      if (!inserted) {
        if (row.lower < it->second.lower) it->second.lower = row.lower;
        if (row.upper > it->second.upper) it->second.upper = row.upper;
        it->second.pairs += row.pairs;
      }
    }
  }
  std::vector<EnvelopeRow> out;
  for (auto& [t, row] : merged) out.push_back(row);
  return out;
}

ProperNormReport verify_proper_norm(const NormHandle& norm, const Integer& radius,
                                    std::size_t max_reported) {
  ProperNormReport report;
  report.radius = radius;
  const Group& g = norm.group();
  const auto points = norm.ball(radius);
  const std::size_t n = points.size();
  report.elements = n;

  std::vector<Integer> value(n);
  parallel_for(n, [&](std::size_t i) { value[i] = norm(points[i]); });

  std::vector<std::vector<NormViolation>> found(n);
  std::vector<std::size_t> counts(n, 0), pairs(n, 0);
  const bool abelian = g.is_abelian();
  parallel_for(n, [&](std::size_t i) {
    auto note = [&](NormViolation v) {
      ++counts[i];
      if (found[i].size() < max_reported) found[i].push_back(std::move(v));
    };
    const Element& x = points[i];
    if ((value[i] == 0) != x.is_identity()) {
      note({"identity", {x}, "||x|| = " + to_string(value[i])});
    }
    Integer inv = norm(g.inverse(x));
    if (inv != value[i]) {
      note({"symmetry", {x}, "||x|| = " + to_string(value[i]) + ", ||x^-1|| = " + to_string(inv)});
    }
    for (std::size_t j = abelian ? i : 0; j < n; ++j) {
      ++pairs[i];
      Integer limit = value[i] + value[j] + 1;
      if (!norm.below(g.mul(x, points[j]), limit)) {
        note({"subadditivity", {x, points[j]},
              "||xy|| > " + to_string(value[i]) + " + " + to_string(value[j])});
      }
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    report.violation_count += counts[i];
    report.pairs_checked += pairs[i];
    for (auto& v : found[i]) {
      if (report.violations.size() < max_reported) report.violations.push_back(std::move(v));
    }
  }
  std::vector<Integer> sorted = value;
  std::sort(sorted.begin(), sorted.end());
  for (Integer t = 0; t <= radius; ++t) {
    auto count = static_cast<std::size_t>(
        std::upper_bound(sorted.begin(), sorted.end(), t) - sorted.begin());
    report.sublevel_counts.emplace_back(t, count);
  }
  return report;
}

}  // namespace nagata

#pragma once

// Brute-force reference evaluations used only by tests. Everything here
// works on a dense 0/1 matrix and follows the formulas term by term; none
// of it touches the library's propagation code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <map>
#include <set>
#include <vector>

#include "pliers/graph.hpp"
#include "pliers/rng.hpp"

namespace pliers::oracle {

struct DenseGraph {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<std::vector<int>> a;  // a[user][item]

  int k_user(std::size_t l) const {
    int k = 0;
    for (std::size_t j = 0; j < m; ++j) k += a[l][j];
    return k;
  }
  int k_item(std::size_t j) const {
    int k = 0;
    for (std::size_t l = 0; l < n; ++l) k += a[l][j];
    return k;
  }
  std::set<std::size_t> users_of(std::size_t j) const {
    std::set<std::size_t> out;
    for (std::size_t l = 0; l < n; ++l) {
      if (a[l][j] != 0) out.insert(l);
    }
    return out;
  }
  std::set<std::size_t> items_of(std::size_t l) const {
    std::set<std::size_t> out;
    for (std::size_t j = 0; j < m; ++j) {
      if (a[l][j] != 0) out.insert(j);
    }
    return out;
  }
};

/// Dense matrix in `g`'s index space, filled from the raw edge list.
inline DenseGraph dense_from_edges(const BipartiteGraph& g, const std::vector<Edge>& edges) {
  DenseGraph d;
  d.n = g.num_users();
  d.m = g.num_items();
  d.a.assign(d.n, std::vector<int>(d.m, 0));
  for (const auto& e : edges) d.a[*g.find_user(e.user)][*g.find_item(e.item)] = 1;
  return d;
}

struct DiffusionScores {
  std::vector<double> probs, heats, pliers;
};

/// ProbS, HeatS and PLIERS for target t, straight from the double sums.
inline DiffusionScores diffusion(const DenseGraph& d, std::size_t t) {
  std::vector<int> ku(d.n), ki(d.m);
  for (std::size_t l = 0; l < d.n; ++l) ku[l] = d.k_user(l);
  for (std::size_t j = 0; j < d.m; ++j) ki[j] = d.k_item(j);
  // |U_s ∩ U_j| by counting over every user.
  std::vector<std::vector<int>> common(d.m, std::vector<int>(d.m, 0));
  for (std::size_t s = 0; s < d.m; ++s) {
    for (std::size_t j = 0; j < d.m; ++j) {
      for (std::size_t l = 0; l < d.n; ++l) common[s][j] += d.a[l][s] * d.a[l][j];
    }
  }
  DiffusionScores out;
  out.probs.assign(d.m, 0.0);
  out.heats.assign(d.m, 0.0);
  out.pliers.assign(d.m, 0.0);
  for (std::size_t j = 0; j < d.m; ++j) {
    double p = 0.0, h = 0.0, pl = 0.0;
    for (std::size_t l = 0; l < d.n; ++l) {
      if (d.a[l][j] == 0) continue;  // every term carries a_{l,j}
      for (std::size_t s = 0; s < d.m; ++s) {
        const int coeff = d.a[l][j] * d.a[l][s] * d.a[t][s];
        if (coeff == 0) continue;
        p += coeff / (static_cast<double>(ku[l]) * ki[s]);
        h += coeff / static_cast<double>(ku[l]);
        pl += coeff / (static_cast<double>(ku[l]) * ki[s]) * common[s][j] /
              static_cast<double>(ki[j]);
      }
    }
    out.probs[j] = p;
    out.heats[j] = ki[j] == 0 ? 0.0 : h / ki[j];
    out.pliers[j] = pl;
  }
  return out;
}

inline std::vector<double> hybrid(const DiffusionScores& s, double lambda) {
  std::vector<double> out(s.probs.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = lambda * s.probs[j] + (1.0 - lambda) * s.heats[j];
  }
  return out;
}

inline std::vector<double> degree_scaled(const DenseGraph& d, const std::vector<double>& base,
                                         double exponent) {
  std::vector<double> out(base.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    const int k = d.k_item(j);
    out[j] = k == 0 ? 0.0 : base[j] * std::pow(static_cast<double>(k), exponent);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Metrics straight from their definitions. Recommendation lists are plain
// item vectors keyed by user.

using Lists = std::map<std::size_t, std::vector<std::size_t>>;

inline double jaccard(const std::set<std::size_t>& a, const std::set<std::size_t>& b) {
  std::vector<std::size_t> inter, uni;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(inter));
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(uni));
  return uni.empty() ? 0.0 : static_cast<double>(inter.size()) / static_cast<double>(uni.size());
}

inline double variance(const DenseGraph& d, const Lists& recs) {
  double total = 0.0;
  int users = 0;
  for (const auto& [u, items] : recs) {
    if (items.empty()) continue;
    const auto owned = d.items_of(u);
    double p = 0.0;
    for (std::size_t k : owned) p += d.k_item(k);
    p /= static_cast<double>(owned.size());
    double sum = 0.0;
    for (std::size_t q : items) {
      const double diff = d.k_item(q) - p;
      sum += std::sqrt(diff * diff);
    }
    total += sum / static_cast<double>(items.size());
    ++users;
  }
  return users == 0 ? 0.0 : total / users;
}

inline double overlap(const DenseGraph& d, const Lists& recs) {
  double total = 0.0;
  int users = 0;
  for (const auto& [u, items] : recs) {
    if (items.empty()) continue;
    const auto owned = d.items_of(u);
    double sum = 0.0;
    for (std::size_t q : items) {
      double per_item = 0.0;
      for (std::size_t k : owned) per_item += jaccard(d.users_of(q), d.users_of(k));
      sum += per_item / static_cast<double>(owned.size());
    }
    total += sum / static_cast<double>(items.size());
    ++users;
  }
  return users == 0 ? 0.0 : total / users;
}

inline double overlap_product(const DenseGraph& d, const Lists& recs) {
  double total = 0.0;
  int users = 0;
  for (const auto& [u, items] : recs) {
    if (items.empty()) continue;
    const auto owned = d.items_of(u);
    double sum = 0.0;
    for (std::size_t q : items) {
      double prod = 1.0;
      for (std::size_t k : owned) prod *= jaccard(d.users_of(q), d.users_of(k));
      sum += prod / static_cast<double>(owned.size());
    }
    total += sum / static_cast<double>(items.size());
    ++users;
  }
  return users == 0 ? 0.0 : total / users;
}

struct LinkPred {
  double r = 0.0, p = 0.0, n = 0.0;
};

/// R, P, N at list length l; probe maps user -> held-out items.
inline LinkPred link_prediction(const DenseGraph& train, const std::map<std::size_t, std::set<std::size_t>>& probe,
                                const Lists& recs, std::size_t l) {
  LinkPred out;
  int probe_users = 0, rec_users = 0;
  for (const auto& [u, items] : recs) {
    const std::size_t top = std::min(l, items.size());
    auto held = probe.find(u);
    if (held != probe.end() && !held->second.empty()) {
      int hits = 0;
      for (std::size_t k = 0; k < top; ++k) hits += held->second.count(items[k]) ? 1 : 0;
      out.r += static_cast<double>(hits) / static_cast<double>(l);
      out.p += static_cast<double>(hits) / static_cast<double>(held->second.size());
      ++probe_users;
    }
    if (top > 0) {
      double deg = 0.0;
      for (std::size_t k = 0; k < top; ++k) deg += train.k_item(items[k]);
      out.n += deg / static_cast<double>(top);
      ++rec_users;
    }
  }
  if (probe_users > 0) {
    out.r /= probe_users;
    out.p /= probe_users;
  }
  if (rec_users > 0) out.n /= rec_users;
  return out;
}

// ---------------------------------------------------------------------------
// Random instances

struct RandomGraphSpec {
  std::size_t max_users = 50;
  std::size_t max_items = 100;
  double min_density = 0.02;
  double max_density = 0.3;
};

/// Bernoulli bipartite graph with random size and density.
inline std::vector<Edge> random_edges(std::uint64_t seed, const RandomGraphSpec& spec = {}) {
  Rng rng(seed);
  const std::size_t n = 2 + rng.below(spec.max_users - 1);
  const std::size_t m = 2 + rng.below(spec.max_items - 1);
  const double density = spec.min_density + (spec.max_density - spec.min_density) * rng.unit();
  std::vector<Edge> edges;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t i = 0; i < m; ++i) {
      if (rng.unit() < density) {
        edges.push_back({static_cast<ExternalId>(u), static_cast<ExternalId>(i)});
      }
    }
  }
  if (edges.empty()) edges.push_back({0, 0});
  return edges;
}

}  // namespace pliers::oracle

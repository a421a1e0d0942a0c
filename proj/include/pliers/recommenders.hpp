#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "pliers/error.hpp"
#include "pliers/graph.hpp"

namespace pliers {

enum class Algorithm { pliers, probs, heats, hybrid, pd, bhc };

inline constexpr std::array<Algorithm, 6> kAllAlgorithms = {
    Algorithm::pliers, Algorithm::probs, Algorithm::heats,
    Algorithm::hybrid, Algorithm::pd,    Algorithm::bhc};

inline std::string_view to_string(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::pliers: return "pliers";
    case Algorithm::probs: return "probs";
    case Algorithm::heats: return "heats";
    case Algorithm::hybrid: return "hybrid";
    case Algorithm::pd: return "pd";
    case Algorithm::bhc: return "bhc";
  }
  return "?";
}

inline Algorithm parse_algorithm(std::string_view name) {
  for (Algorithm a : kAllAlgorithms) {
    if (to_string(a) == name) return a;
  }
  throw ConfigError("unknown algorithm '" + std::string(name) +
                    "' (expected one of pliers, probs, heats, hybrid, pd, bhc)");
}

/// Tuning knobs of the parameterised baselines.
struct ScorerParams {
  double lambda = 0.5;     // Hybrid: weight of ProbS
  double epsilon = -0.85;  // PD: exponent on item degree
  double gamma = 0.8;      // BHC: exponent on item degree

  void validate() const {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
      throw ConfigError("lambda must lie in [0, 1], got " + std::to_string(lambda));
    }
    if (!std::isfinite(epsilon)) throw ConfigError("epsilon must be finite");
    if (!std::isfinite(gamma)) throw ConfigError("gamma must be finite");
  }

  friend bool operator==(const ScorerParams&, const ScorerParams&) = default;
};

/// Dense per-item scores for one target user.
struct ScoreVector {
  std::vector<double> scores;

  std::size_t size() const noexcept { return scores.size(); }
  double operator[](std::size_t j) const noexcept { return scores[j]; }

  friend bool operator==(const ScoreVector&, const ScoreVector&) = default;
};

struct Recommendation {
  ItemIndex item = 0;
  double score = 0.0;

  friend bool operator==(const Recommendation&, const Recommendation&) = default;
};

/// Top-L items for one user: scores non-increasing, ties by ascending item.
struct RankedList {
  UserIndex target = 0;
  std::vector<Recommendation> entries;

  std::size_t size() const noexcept { return entries.size(); }
  bool empty() const noexcept { return entries.empty(); }

  friend bool operator==(const RankedList&, const RankedList&) = default;
};

/**
 * Diffusion scorers over a fixed graph.
 *
 * A Scorer owns per-query scratch (one slot per user and per item plus
 * touched-index lists), so each worker thread should hold its own. All
 * scores are accumulated in a fixed order: ascending source item, then
 * ascending neighbour, which makes results bitwise reproducible.
 */
class Scorer {
 public:
  explicit Scorer(const BipartiteGraph& g)
      : g_(&g),
        user_mass_(g.num_users(), 0.0),
        user_seen_(g.num_users(), 0),
        weight_(g.num_items(), 0.0),
        count_(g.num_items(), 0),
        owned_(g.num_items(), 0) {}

  const BipartiteGraph& graph() const noexcept { return *g_; }

  /// Probabilistic spreading: unit resource per owned item, split item→users→items.
  ScoreVector probs(UserIndex t) {
    g_->check_user(t);
    ScoreVector out{std::vector<double>(g_->num_items(), 0.0)};
    for (ItemIndex s : g_->items_of(t)) {
      const double share = 1.0 / static_cast<double>(g_->users_of(s).size());
      for (UserIndex l : g_->users_of(s)) touch_user(l, share);
    }
    for (UserIndex l : sorted_touched_users()) {
      const auto items = g_->items_of(l);
      const double share = user_mass_[l] / static_cast<double>(items.size());
      for (ItemIndex j : items) out.scores[j] += share;
    }
    reset_users();
    return out;
  }

  /// Heat conduction: each item averages the fraction of owned items among its users.
  ScoreVector heats(UserIndex t) {
    g_->check_user(t);
    ScoreVector out{std::vector<double>(g_->num_items(), 0.0)};
    for (ItemIndex s : g_->items_of(t)) {
      for (UserIndex l : g_->users_of(s)) touch_user(l, 1.0);
    }
    for (UserIndex l : sorted_touched_users()) {
      const auto items = g_->items_of(l);
      const double share = user_mass_[l] / static_cast<double>(items.size());
      for (ItemIndex j : items) {
        if (count_[j] == 0) {
          count_[j] = 1;
          touched_items_.push_back(j);
        }
        out.scores[j] += share;
      }
    }
    for (ItemIndex j : touched_items_) {
      out.scores[j] /= static_cast<double>(g_->users_of(j).size());
      count_[j] = 0;
    }
    touched_items_.clear();
    reset_users();
    return out;
  }

  ScoreVector hybrid(UserIndex t, double lambda) {
    ScoreVector p = probs(t);
    const ScoreVector h = heats(t);
    for (std::size_t j = 0; j < p.scores.size(); ++j) {
      p.scores[j] = lambda * p.scores[j] + (1.0 - lambda) * h.scores[j];
    }
    return p;
  }

  /// ProbS scores times k(i_j)^epsilon.
  ScoreVector pd(UserIndex t, double epsilon) {
    ScoreVector p = probs(t);
    scale_by_degree_power(p, epsilon);
    return p;
  }

  /// HeatS scores times k(i_j)^gamma.
  ScoreVector bhc(UserIndex t, double gamma) {
    ScoreVector h = heats(t);
    scale_by_degree_power(h, gamma);
    return h;
  }

  /**
   * ProbS with each (source s, target j) contribution scaled by
   * |U_s ∩ U_j| / k(i_j). One two-hop walk per owned item s accumulates the
   * diffusion weight w_sj = sum over shared users of 1/k(u) together with
   * the co-count c_sj = |U_s ∩ U_j|.
   */
  ScoreVector pliers(UserIndex t) {
    g_->check_user(t);
    ScoreVector out{std::vector<double>(g_->num_items(), 0.0)};
    for (ItemIndex s : g_->items_of(t)) {
      for (UserIndex l : g_->users_of(s)) {
        const auto items = g_->items_of(l);
        const double inv_degree = 1.0 / static_cast<double>(items.size());
        for (ItemIndex j : items) {
          if (count_[j] == 0) touched_items_.push_back(j);
          weight_[j] += inv_degree;
          ++count_[j];
        }
      }
      const double source_degree = static_cast<double>(g_->users_of(s).size());
      for (ItemIndex j : touched_items_) {
        const double target_degree = static_cast<double>(g_->users_of(j).size());
        out.scores[j] +=
            weight_[j] * static_cast<double>(count_[j]) / (source_degree * target_degree);
        weight_[j] = 0.0;
        count_[j] = 0;
      }
      touched_items_.clear();
    }
    return out;
  }

  ScoreVector score(Algorithm algorithm, UserIndex t, const ScorerParams& params = {}) {
    switch (algorithm) {
      case Algorithm::pliers: return pliers(t);
      case Algorithm::probs: return probs(t);
      case Algorithm::heats: return heats(t);
      case Algorithm::hybrid: return hybrid(t, params.lambda);
      case Algorithm::pd: return pd(t, params.epsilon);
      case Algorithm::bhc: return bhc(t, params.gamma);
    }
    throw ConfigError("unknown algorithm");
  }

  /**
   * Top-`length` items for `t`, excluding items `t` already holds and
   * items with zero score. Ties go to the lower item index.
   */
  RankedList rank(UserIndex t, const ScoreVector& scores, std::size_t length) {
    if (length == 0) throw ConfigError("recommendation list length must be at least 1");
    g_->check_user(t);
    for (ItemIndex i : g_->items_of(t)) owned_[i] = 1;
    RankedList list{t, {}};
    for (ItemIndex j = 0; j < scores.size(); ++j) {
      if (scores.scores[j] > 0.0 && owned_[j] == 0) list.entries.push_back({j, scores.scores[j]});
    }
    for (ItemIndex i : g_->items_of(t)) owned_[i] = 0;

    auto better = [](const Recommendation& a, const Recommendation& b) {
      return a.score > b.score || (a.score == b.score && a.item < b.item);
    };
    const std::size_t keep = std::min(length, list.entries.size());
    std::partial_sort(list.entries.begin(), list.entries.begin() + keep, list.entries.end(),
                      better);
    list.entries.resize(keep);
    return list;
  }

  RankedList recommend(UserIndex t, Algorithm algorithm, const ScorerParams& params,
                       std::size_t length) {
    if (length == 0) throw ConfigError("recommendation list length must be at least 1");
    return rank(t, score(algorithm, t, params), length);
  }

 private:
  void touch_user(UserIndex l, double mass) {
    if (user_seen_[l] == 0) {
      user_seen_[l] = 1;
      touched_users_.push_back(l);
    }
    user_mass_[l] += mass;
  }

  const std::vector<UserIndex>& sorted_touched_users() {
    std::sort(touched_users_.begin(), touched_users_.end());
    return touched_users_;
  }

  void reset_users() {
    for (UserIndex l : touched_users_) {
      user_mass_[l] = 0.0;
      user_seen_[l] = 0;
    }
    touched_users_.clear();
  }

  void scale_by_degree_power(ScoreVector& v, double exponent) const {
    for (ItemIndex j = 0; j < v.scores.size(); ++j) {
      const std::size_t k = g_->users_of(j).size();
      v.scores[j] = k == 0 ? 0.0 : v.scores[j] * std::pow(static_cast<double>(k), exponent);
    }
  }

  const BipartiteGraph* g_;
  std::vector<double> user_mass_;
  std::vector<unsigned char> user_seen_;
  std::vector<UserIndex> touched_users_;
  std::vector<double> weight_;
  std::vector<std::size_t> count_;
  std::vector<ItemIndex> touched_items_;
  std::vector<unsigned char> owned_;
};

inline ScoreVector score_probs(const BipartiteGraph& g, UserIndex t) { return Scorer(g).probs(t); }
inline ScoreVector score_heats(const BipartiteGraph& g, UserIndex t) { return Scorer(g).heats(t); }
inline ScoreVector score_hybrid(const BipartiteGraph& g, UserIndex t, double lambda) {
  return Scorer(g).hybrid(t, lambda);
}
inline ScoreVector score_pd(const BipartiteGraph& g, UserIndex t, double epsilon) {
  return Scorer(g).pd(t, epsilon);
}
inline ScoreVector score_bhc(const BipartiteGraph& g, UserIndex t, double gamma) {
  return Scorer(g).bhc(t, gamma);
}
inline ScoreVector score_pliers(const BipartiteGraph& g, UserIndex t) {
  return Scorer(g).pliers(t);
}

inline RankedList recommend(const BipartiteGraph& g, UserIndex t, Algorithm algorithm,
                            const ScorerParams& params, std::size_t length) {
  return Scorer(g).recommend(t, algorithm, params, length);
}

inline RankedList recommend(const BipartiteGraph& g, UserIndex t, std::string_view algorithm,
                            const ScorerParams& params, std::size_t length) {
  return recommend(g, t, parse_algorithm(algorithm), params, length);
}

}  // namespace pliers

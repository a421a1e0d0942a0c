#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pliers/error.hpp"
#include "pliers/graph.hpp"
#include "pliers/recommenders.hpp"

namespace pliers {

/// Per-user sets of held-out items, indexed by user; each set sorted.
using ProbeSets = std::vector<std::vector<ItemIndex>>;

enum class OverlapForm {
  mean,     // average Jaccard over the user's items (default)
  product,  // (1/z) times the product of the Jaccard indices
};

struct PersonalizationScores {
  double v = 0.0;
  double o = 0.0;
  std::size_t users_counted = 0;

  friend bool operator==(const PersonalizationScores&, const PersonalizationScores&) = default;
};

/// Link-prediction scores at list length `l`. `recall` is hits / l and
/// `precision` is hits / probe-set size; see README for the naming.
struct LinkPredScores {
  std::size_t l = 0;
  double recall = 0.0;
  double precision = 0.0;
  double novelty = 0.0;
  std::size_t users_counted = 0;

  friend bool operator==(const LinkPredScores&, const LinkPredScores&) = default;
};

/// |a ∩ b| / |a ∪ b| over sorted, duplicate-free sets; 0 when both are empty.
template <class T>
double jaccard(std::span<const T> a, std::span<const T> b) noexcept {
  const std::size_t common = intersection_size(a, b);
  const std::size_t uni = a.size() + b.size() - common;
  return uni == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(uni);
}

inline double jaccard(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  return jaccard(std::span<const std::uint32_t>(a), std::span<const std::uint32_t>(b));
}

namespace detail {

inline double owned_popularity(const BipartiteGraph& g, UserIndex u) {
  auto p = mean_owned_item_degree(g, u);
  if (!p) {
    throw GraphError("user " + std::to_string(g.user_id(u)) +
                     " holds no items; popularity of owned items is undefined");
  }
  return *p;
}

inline double user_variance_term(const BipartiteGraph& g, const RankedList& list) {
  const double owned = owned_popularity(g, list.target);
  double sum = 0.0;
  for (const auto& r : list.entries) {
    sum += std::abs(static_cast<double>(g.users_of(r.item).size()) - owned);
  }
  return sum / static_cast<double>(list.entries.size());
}

inline double user_overlap_term(const BipartiteGraph& g, const RankedList& list,
                                OverlapForm form) {
  const auto owned = g.items_of(list.target);
  const double z = static_cast<double>(owned.size());
  double sum = 0.0;
  for (const auto& r : list.entries) {
    const auto audience = g.users_of(r.item);
    double acc = form == OverlapForm::mean ? 0.0 : 1.0;
    for (ItemIndex k : owned) {
      const double j = jaccard(audience, g.users_of(k));
      if (form == OverlapForm::mean) {
        acc += j;
      } else {
        acc *= j;
      }
    }
    sum += acc / z;
  }
  return sum / static_cast<double>(list.entries.size());
}

}  // namespace detail

/**
 * Popularity variance: for each user with at least one recommendation, the
 * mean absolute gap between each recommended item's degree and the mean
 * degree of the user's own items; then averaged over those users.
 */
inline double variance_v(const BipartiteGraph& g, std::span<const RankedList> recs) {
  double total = 0.0;
  std::size_t counted = 0;
  for (const auto& list : recs) {
    g.check_user(list.target);
    if (g.items_of(list.target).empty()) {
      throw GraphError("user " + std::to_string(g.user_id(list.target)) +
                       " holds no items; popularity of owned items is undefined");
    }
    if (list.empty()) continue;
    total += detail::user_variance_term(g, list);
    ++counted;
  }
  return counted == 0 ? 0.0 : total / static_cast<double>(counted);
}

/**
 * Overlap: for each recommended item, the Jaccard index between its user
 * set and each of the target's items' user sets, combined per `form`;
 * averaged over the list, then over users with at least one recommendation.
 */
inline double overlap_o(const BipartiteGraph& g, std::span<const RankedList> recs,
                        OverlapForm form = OverlapForm::mean) {
  double total = 0.0;
  std::size_t counted = 0;
  for (const auto& list : recs) {
    g.check_user(list.target);
    if (g.items_of(list.target).empty()) {
      throw GraphError("user " + std::to_string(g.user_id(list.target)) +
                       " holds no items; overlap is undefined");
    }
    if (list.empty()) continue;
    total += detail::user_overlap_term(g, list, form);
    ++counted;
  }
  return counted == 0 ? 0.0 : total / static_cast<double>(counted);
}

inline PersonalizationScores personalization(const BipartiteGraph& g,
                                             std::span<const RankedList> recs,
                                             OverlapForm form = OverlapForm::mean) {
  PersonalizationScores s;
  s.v = variance_v(g, recs);
  s.o = overlap_o(g, recs, form);
  s.users_counted = static_cast<std::size_t>(
      std::count_if(recs.begin(), recs.end(), [](const RankedList& r) { return !r.empty(); }));
  return s;
}

namespace detail {

inline std::size_t hits_at(const RankedList& list, const std::vector<ItemIndex>& probe,
                           std::size_t l) {
  std::size_t hits = 0;
  const std::size_t end = std::min(l, list.entries.size());
  for (std::size_t k = 0; k < end; ++k) {
    if (std::binary_search(probe.begin(), probe.end(), list.entries[k].item)) ++hits;
  }
  return hits;
}

inline void check_list_length(std::size_t l) {
  if (l == 0) throw ConfigError("list length l must be at least 1");
}

inline const std::vector<ItemIndex>* probe_for(const ProbeSets& probe, UserIndex u) {
  if (u >= probe.size() || probe[u].empty()) return nullptr;
  return &probe[u];
}

}  // namespace detail

/// Mean over users with at least one probe item of (hits in top l) / l.
inline double recall_at_l(const ProbeSets& probe, std::span<const RankedList> recs,
                          std::size_t l) {
  detail::check_list_length(l);
  double total = 0.0;
  std::size_t counted = 0;
  for (const auto& list : recs) {
    const auto* held = detail::probe_for(probe, list.target);
    if (held == nullptr) continue;
    total += static_cast<double>(detail::hits_at(list, *held, l)) / static_cast<double>(l);
    ++counted;
  }
  return counted == 0 ? 0.0 : total / static_cast<double>(counted);
}

/// Mean over users with at least one probe item of (hits in top l) / |probe set|.
inline double precision_at_l(const ProbeSets& probe, std::span<const RankedList> recs,
                             std::size_t l) {
  detail::check_list_length(l);
  double total = 0.0;
  std::size_t counted = 0;
  for (const auto& list : recs) {
    const auto* held = detail::probe_for(probe, list.target);
    if (held == nullptr) continue;
    total += static_cast<double>(detail::hits_at(list, *held, l)) /
             static_cast<double>(held->size());
    ++counted;
  }
  return counted == 0 ? 0.0 : total / static_cast<double>(counted);
}

/// Mean train-graph degree of the first l recommendations, averaged over
/// users with at least one recommendation.
inline double novelty_at_l(const BipartiteGraph& train, std::span<const RankedList> recs,
                           std::size_t l) {
  detail::check_list_length(l);
  double total = 0.0;
  std::size_t counted = 0;
  for (const auto& list : recs) {
    if (list.empty()) continue;
    const std::size_t end = std::min(l, list.entries.size());
    std::size_t degree_sum = 0;
    for (std::size_t k = 0; k < end; ++k) {
      train.check_item(list.entries[k].item);
      degree_sum += train.users_of(list.entries[k].item).size();
    }
    total += static_cast<double>(degree_sum) / static_cast<double>(end);
    ++counted;
  }
  return counted == 0 ? 0.0 : total / static_cast<double>(counted);
}

inline LinkPredScores link_prediction_scores(const BipartiteGraph& train, const ProbeSets& probe,
                                             std::span<const RankedList> recs, std::size_t l) {
  LinkPredScores s;
  s.l = l;
  s.recall = recall_at_l(probe, recs, l);
  s.precision = precision_at_l(probe, recs, l);
  s.novelty = novelty_at_l(train, recs, l);
  s.users_counted = static_cast<std::size_t>(
      std::count_if(recs.begin(), recs.end(), [&](const RankedList& r) {
        return detail::probe_for(probe, r.target) != nullptr;
      }));
  return s;
}

}  // namespace pliers

#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pliers/error.hpp"

namespace pliers {

using UserIndex = std::uint32_t;
using ItemIndex = std::uint32_t;
using ExternalId = std::int64_t;

/// A raw link as it appears in a dataset: external (sparse) ids.
struct Edge {
  ExternalId user = 0;
  ExternalId item = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// A link expressed in a graph's dense index space.
struct IndexEdge {
  UserIndex user = 0;
  ItemIndex item = 0;

  friend auto operator<=>(const IndexEdge&, const IndexEdge&) = default;
};

/**
 * Immutable bipartite user-item graph.
 *
 * Both adjacency directions are stored in CSR form with strictly increasing
 * neighbour lists. Users and items are addressed by dense indices; the
 * external ids they were loaded with are kept in ascending order, so index
 * order and id order agree.
 */
class BipartiteGraph {
 public:
  BipartiteGraph() : user_offsets_{0}, item_offsets_{0} {}

  std::size_t num_users() const noexcept { return user_ids_.size(); }
  std::size_t num_items() const noexcept { return item_ids_.size(); }
  std::size_t num_edges() const noexcept { return user_items_.size(); }

  /// Unchecked neighbourhood access for hot loops.
  std::span<const ItemIndex> items_of(UserIndex u) const noexcept {
    return {user_items_.data() + user_offsets_[u], user_items_.data() + user_offsets_[u + 1]};
  }
  std::span<const UserIndex> users_of(ItemIndex i) const noexcept {
    return {item_users_.data() + item_offsets_[i], item_users_.data() + item_offsets_[i + 1]};
  }

  std::size_t user_degree(UserIndex u) const {
    check_user(u);
    return user_offsets_[u + 1] - user_offsets_[u];
  }
  std::size_t item_degree(ItemIndex i) const {
    check_item(i);
    return item_offsets_[i + 1] - item_offsets_[i];
  }

  ExternalId user_id(UserIndex u) const {
    check_user(u);
    return user_ids_[u];
  }
  ExternalId item_id(ItemIndex i) const {
    check_item(i);
    return item_ids_[i];
  }

  std::optional<UserIndex> find_user(ExternalId id) const { return find(user_ids_, id); }
  std::optional<ItemIndex> find_item(ExternalId id) const { return find(item_ids_, id); }

  bool has_edge(UserIndex u, ItemIndex i) const {
    check_user(u);
    check_item(i);
    auto items = items_of(u);
    return std::binary_search(items.begin(), items.end(), i);
  }

  const std::vector<ExternalId>& user_ids() const noexcept { return user_ids_; }
  const std::vector<ExternalId>& item_ids() const noexcept { return item_ids_; }

  /// Number of duplicate input records dropped when the graph was built.
  std::size_t collapsed_duplicates() const noexcept { return collapsed_duplicates_; }

  void check_user(UserIndex u) const {
    if (u >= num_users()) {
      throw GraphError("user index " + std::to_string(u) + " out of range (n=" +
                       std::to_string(num_users()) + ")");
    }
  }
  void check_item(ItemIndex i) const {
    if (i >= num_items()) {
      throw GraphError("item index " + std::to_string(i) + " out of range (m=" +
                       std::to_string(num_items()) + ")");
    }
  }

  /// Builds from sorted, duplicate-free index edges over the given id maps.
  static BipartiteGraph from_sorted_edges(std::vector<ExternalId> user_ids,
                                          std::vector<ExternalId> item_ids,
                                          std::span<const IndexEdge> edges,
                                          std::size_t collapsed_duplicates = 0) {
    BipartiteGraph g;
    g.user_ids_ = std::move(user_ids);
    g.item_ids_ = std::move(item_ids);
    g.collapsed_duplicates_ = collapsed_duplicates;
    const std::size_t n = g.user_ids_.size();
    const std::size_t m = g.item_ids_.size();

    g.user_offsets_.assign(n + 1, 0);
    g.item_offsets_.assign(m + 1, 0);
    for (const auto& e : edges) {
      ++g.user_offsets_[e.user + 1];
      ++g.item_offsets_[e.item + 1];
    }
    for (std::size_t u = 0; u < n; ++u) g.user_offsets_[u + 1] += g.user_offsets_[u];
    for (std::size_t i = 0; i < m; ++i) g.item_offsets_[i + 1] += g.item_offsets_[i];

    // Edges arrive sorted by (user, item), so both fills stay sorted.
    g.user_items_.resize(edges.size());
    g.item_users_.resize(edges.size());
    std::vector<std::size_t> cursor(g.item_offsets_.begin(), g.item_offsets_.end() - 1);
    for (std::size_t k = 0; k < edges.size(); ++k) {
      g.user_items_[k] = edges[k].item;
      g.item_users_[cursor[edges[k].item]++] = edges[k].user;
    }
    return g;
  }

 private:
  static std::optional<std::uint32_t> find(const std::vector<ExternalId>& ids, ExternalId id) {
    auto it = std::lower_bound(ids.begin(), ids.end(), id);
    if (it == ids.end() || *it != id) return std::nullopt;
    return static_cast<std::uint32_t>(it - ids.begin());
  }

  std::vector<ExternalId> user_ids_;
  std::vector<ExternalId> item_ids_;
  std::vector<std::size_t> user_offsets_;
  std::vector<ItemIndex> user_items_;
  std::vector<std::size_t> item_offsets_;
  std::vector<UserIndex> item_users_;
  std::size_t collapsed_duplicates_ = 0;
};

/// Whole-graph summary in the shape of a dataset table row.
struct GraphStats {
  std::size_t n_users = 0;
  std::size_t n_items = 0;
  std::size_t n_links = 0;
  double mean_item_degree = 0.0;          // links / items
  double mean_user_tag_popularity = 0.0;  // mean over users of their items' mean degree
  std::size_t isolated_users = 0;
  std::size_t isolated_items = 0;

  friend bool operator==(const GraphStats&, const GraphStats&) = default;
};

namespace detail {

inline std::vector<ExternalId> sorted_unique(std::vector<ExternalId> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

inline std::uint32_t dense_index(const std::vector<ExternalId>& ids, ExternalId id) {
  return static_cast<std::uint32_t>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
}

}  // namespace detail

/**
 * Builds a graph from raw links. Duplicates collapse to a single edge
 * (their count is kept in `collapsed_duplicates()`); ids are compacted to
 * dense indices in ascending id order. Negative ids are rejected with the
 * offending record index.
 */
inline BipartiteGraph build_graph(std::span<const Edge> edges) {
  std::vector<ExternalId> users;
  std::vector<ExternalId> items;
  users.reserve(edges.size());
  items.reserve(edges.size());
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (edges[k].user < 0 || edges[k].item < 0) {
      throw GraphError("edge record " + std::to_string(k) + " has a negative id (" +
                       std::to_string(edges[k].user) + ", " + std::to_string(edges[k].item) +
                       ")");
    }
    users.push_back(edges[k].user);
    items.push_back(edges[k].item);
  }
  users = detail::sorted_unique(std::move(users));
  items = detail::sorted_unique(std::move(items));

  std::vector<IndexEdge> indexed;
  indexed.reserve(edges.size());
  for (const auto& e : edges) {
    indexed.push_back({detail::dense_index(users, e.user), detail::dense_index(items, e.item)});
  }
  std::sort(indexed.begin(), indexed.end());
  indexed.erase(std::unique(indexed.begin(), indexed.end()), indexed.end());
  const std::size_t collapsed = edges.size() - indexed.size();
  return BipartiteGraph::from_sorted_edges(std::move(users), std::move(items), indexed, collapsed);
}

inline BipartiteGraph build_graph(std::initializer_list<Edge> edges) {
  return build_graph(std::span<const Edge>(edges.begin(), edges.size()));
}

/// Edges in canonical (user, item) index order.
inline std::vector<IndexEdge> index_edges(const BipartiteGraph& g) {
  std::vector<IndexEdge> out;
  out.reserve(g.num_edges());
  for (UserIndex u = 0; u < g.num_users(); ++u) {
    for (ItemIndex i : g.items_of(u)) out.push_back({u, i});
  }
  return out;
}

/// Edges with external ids restored, in canonical order.
inline std::vector<Edge> edge_list(const BipartiteGraph& g) {
  std::vector<Edge> out;
  out.reserve(g.num_edges());
  for (UserIndex u = 0; u < g.num_users(); ++u) {
    for (ItemIndex i : g.items_of(u)) out.push_back({g.user_ids()[u], g.item_ids()[i]});
  }
  return out;
}

inline std::size_t user_degree(const BipartiteGraph& g, UserIndex u) { return g.user_degree(u); }
inline std::size_t item_degree(const BipartiteGraph& g, ItemIndex i) { return g.item_degree(i); }

/// Size of a sorted-list intersection by linear merge.
template <class T>
std::size_t intersection_size(std::span<const T> a, std::span<const T> b) noexcept {
  std::size_t count = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++count;
      ++ia;
      ++ib;
    }
  }
  return count;
}

/// |U_s ∩ U_j|: number of users holding both items.
inline std::size_t co_occurrence(const BipartiteGraph& g, ItemIndex s, ItemIndex j) {
  g.check_item(s);
  g.check_item(j);
  return intersection_size(g.users_of(s), g.users_of(j));
}

/**
 * Returns a copy of `g` without the listed edges. The node index space and
 * id maps are preserved, so nodes may become isolated.
 */
inline BipartiteGraph remove_edges(const BipartiteGraph& g, std::span<const IndexEdge> edges) {
  std::vector<IndexEdge> doomed(edges.begin(), edges.end());
  std::sort(doomed.begin(), doomed.end());
  doomed.erase(std::unique(doomed.begin(), doomed.end()), doomed.end());
  for (const auto& e : doomed) {
    if (e.user >= g.num_users() || e.item >= g.num_items() || !g.has_edge(e.user, e.item)) {
      std::string name = "(" + std::to_string(e.user) + ", " + std::to_string(e.item) + ")";
      if (e.user < g.num_users() && e.item < g.num_items()) {
        name = "(user " + std::to_string(g.user_id(e.user)) + ", item " +
               std::to_string(g.item_id(e.item)) + ")";
      }
      throw GraphError("cannot remove edge " + name + ": not present in graph");
    }
  }

  std::vector<IndexEdge> kept;
  kept.reserve(g.num_edges() - doomed.size());
  auto next = doomed.begin();
  for (UserIndex u = 0; u < g.num_users(); ++u) {
    for (ItemIndex i : g.items_of(u)) {
      const IndexEdge e{u, i};
      if (next != doomed.end() && *next == e) {
        ++next;
        continue;
      }
      kept.push_back(e);
    }
  }
  return BipartiteGraph::from_sorted_edges(g.user_ids(), g.item_ids(), kept);
}

/// Mean degree of the items held by `u`, or nullopt when `u` holds none.
inline std::optional<double> mean_owned_item_degree(const BipartiteGraph& g, UserIndex u) {
  auto items = g.items_of(u);
  if (items.empty()) return std::nullopt;
  std::size_t total = 0;
  for (ItemIndex i : items) total += g.users_of(i).size();
  return static_cast<double>(total) / static_cast<double>(items.size());
}

inline GraphStats stats(const BipartiteGraph& g) {
  GraphStats s;
  s.n_users = g.num_users();
  s.n_items = g.num_items();
  s.n_links = g.num_edges();
  if (s.n_items > 0) {
    s.mean_item_degree = static_cast<double>(s.n_links) / static_cast<double>(s.n_items);
  }
  double popularity_sum = 0.0;
  std::size_t counted = 0;
  for (UserIndex u = 0; u < g.num_users(); ++u) {
    if (auto p = mean_owned_item_degree(g, u)) {
      popularity_sum += *p;
      ++counted;
    } else {
      ++s.isolated_users;
    }
  }
  if (counted > 0) s.mean_user_tag_popularity = popularity_sum / static_cast<double>(counted);
  for (ItemIndex i = 0; i < g.num_items(); ++i) {
    if (g.users_of(i).empty()) ++s.isolated_items;
  }
  return s;
}

}  // namespace pliers

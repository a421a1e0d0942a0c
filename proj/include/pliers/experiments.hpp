#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "pliers/error.hpp"
#include "pliers/graph.hpp"
#include "pliers/metrics.hpp"
#include "pliers/recommenders.hpp"
#include "pliers/rng.hpp"

namespace pliers {

/// Train graph plus the held-out links, in the original graph's index space.
struct LinkSplit {
  BipartiteGraph train;
  ProbeSets probe;
  double fraction = 0.0;
  std::uint64_t seed = 0;
  /// Users that held items before the split and hold none after it.
  std::vector<UserIndex> isolated_users;

  std::size_t probe_edge_count() const noexcept {
    std::size_t n = 0;
    for (const auto& p : probe) n += p.size();
    return n;
  }
};

/// 1..20 in steps of 1, then 30..100 in steps of 10.
inline std::vector<std::size_t> default_l_sweep() {
  std::vector<std::size_t> sweep;
  for (std::size_t l = 1; l <= 20; ++l) sweep.push_back(l);
  for (std::size_t l = 30; l <= 100; l += 10) sweep.push_back(l);
  return sweep;
}

struct ExperimentConfig {
  std::vector<Algorithm> algorithms{kAllAlgorithms.begin(), kAllAlgorithms.end()};
  ScorerParams params;
  std::size_t list_length = 10;
  double removal_fraction = 0.10;
  std::vector<std::size_t> l_sweep = default_l_sweep();
  std::uint64_t seed = 1;
  OverlapForm overlap_form = OverlapForm::mean;
  /// Free-form description of where the graph came from (input, format, sampling).
  std::string dataset;

  void validate() const {
    if (algorithms.empty()) throw ConfigError("at least one algorithm is required");
    for (std::size_t a = 0; a < algorithms.size(); ++a) {
      for (std::size_t b = a + 1; b < algorithms.size(); ++b) {
        if (algorithms[a] == algorithms[b]) {
          throw ConfigError("algorithm '" + std::string(to_string(algorithms[a])) +
                            "' requested twice");
        }
      }
    }
    params.validate();
    if (list_length == 0) throw ConfigError("list length must be at least 1");
    if (!(removal_fraction > 0.0 && removal_fraction < 1.0)) {
      throw ConfigError("removal fraction must lie in (0, 1)");
    }
    if (l_sweep.empty()) throw ConfigError("l sweep must not be empty");
    if (l_sweep.front() == 0) throw ConfigError("l sweep values must be at least 1");
    for (std::size_t k = 1; k < l_sweep.size(); ++k) {
      if (l_sweep[k] <= l_sweep[k - 1]) throw ConfigError("l sweep must be strictly increasing");
    }
  }

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

inline std::string_view to_string(OverlapForm f) noexcept {
  return f == OverlapForm::mean ? "mean" : "product";
}

inline OverlapForm parse_overlap_form(std::string_view name) {
  if (name == "mean") return OverlapForm::mean;
  if (name == "product") return OverlapForm::product;
  throw ConfigError("unknown overlap form '" + std::string(name) + "' (expected mean or product)");
}

/// Canonical text form of a config; every field, doubles at full precision.
inline std::string canonical_string(const ExperimentConfig& c) {
  auto real = [](double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  std::string s = "algorithms=";
  for (std::size_t k = 0; k < c.algorithms.size(); ++k) {
    if (k > 0) s += ',';
    s += to_string(c.algorithms[k]);
  }
  s += ";lambda=" + real(c.params.lambda);
  s += ";epsilon=" + real(c.params.epsilon);
  s += ";gamma=" + real(c.params.gamma);
  s += ";list_length=" + std::to_string(c.list_length);
  s += ";removal_fraction=" + real(c.removal_fraction);
  s += ";l_sweep=";
  for (std::size_t k = 0; k < c.l_sweep.size(); ++k) {
    if (k > 0) s += ',';
    s += std::to_string(c.l_sweep[k]);
  }
  s += ";seed=" + std::to_string(c.seed);
  s += ";overlap_form=";
  s += to_string(c.overlap_form);
  s += ";dataset=" + c.dataset;
  return s;
}

/// 64-bit FNV-1a of the canonical config string.
inline std::uint64_t config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_string(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct PersonalizationRow {
  Algorithm algorithm = Algorithm::pliers;
  PersonalizationScores scores;

  friend bool operator==(const PersonalizationRow&, const PersonalizationRow&) = default;
};

struct MetricsReport {
  ExperimentConfig config;
  std::uint64_t config_hash = 0;
  GraphStats graph;
  std::vector<PersonalizationRow> rows;
  /// Only filled when timing is requested; keeps reports byte-stable by default.
  std::optional<double> wall_time_seconds;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

struct CurveRow {
  Algorithm algorithm = Algorithm::pliers;
  std::vector<LinkPredScores> points;

  friend bool operator==(const CurveRow&, const CurveRow&) = default;
};

struct CurveReport {
  ExperimentConfig config;
  std::uint64_t config_hash = 0;
  GraphStats graph;
  /// Mean popularity of users' items on the unsplit graph; the novelty reference line.
  double reference_popularity = 0.0;
  std::size_t probe_edges = 0;
  std::size_t evaluated_users = 0;
  std::size_t isolated_users = 0;
  std::vector<CurveRow> rows;
  std::optional<double> wall_time_seconds;

  friend bool operator==(const CurveReport&, const CurveReport&) = default;
};

struct RunOptions {
  /// Worker cap; 0 means hardware concurrency. Never affects results.
  unsigned threads = 1;
  bool record_timing = false;
};

/**
 * Calls `fn(worker, k)` for k in [0, count) across up to `threads`
 * workers. Worker w handles k = w, w + T, ...; callers write results into
 * slot k so output does not depend on the schedule. The first exception
 * thrown by any worker is rethrown.
 */
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(threads, std::max<std::size_t>(count, 1));
  if (workers <= 1) {
    for (std::size_t k = 0; k < count; ++k) fn(std::size_t{0}, k);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t k = w; k < count; k += workers) fn(w, k);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

/// Top-`length` lists for `users` (in the given order) on `g`.
inline std::vector<RankedList> recommend_all(const BipartiteGraph& g,
                                             std::span<const UserIndex> users, Algorithm algorithm,
                                             const ScorerParams& params, std::size_t length,
                                             unsigned threads) {
  std::vector<RankedList> out(users.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(threads, std::max<std::size_t>(users.size(), 1));
  std::vector<std::optional<Scorer>> scorers(workers);
  parallel_for(users.size(), static_cast<unsigned>(workers), [&](std::size_t w, std::size_t k) {
    if (!scorers[w]) scorers[w].emplace(g);
    out[k] = scorers[w]->recommend(users[k], algorithm, params, length);
  });
  return out;
}

/**
 * Holds out round(fraction * L) links chosen uniformly without replacement.
 * The sample is a partial Fisher-Yates shuffle of the edges in canonical
 * (user, item) order, driven by `Rng(seed)`.
 */
inline LinkSplit split_links(const BipartiteGraph& g, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ConfigError("split fraction must lie in (0, 1), got " + std::to_string(fraction));
  }
  if (g.num_edges() < 10) {
    throw ConfigError("split requires at least 10 edges, graph has " +
                      std::to_string(g.num_edges()));
  }
  std::vector<IndexEdge> edges = index_edges(g);
  const auto count = static_cast<std::size_t>(
      std::llround(fraction * static_cast<double>(edges.size())));
  Rng rng(seed);
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t pick = k + static_cast<std::size_t>(rng.below(edges.size() - k));
    std::swap(edges[k], edges[pick]);
  }

  LinkSplit split;
  split.fraction = fraction;
  split.seed = seed;
  const std::span<const IndexEdge> held(edges.data(), count);
  split.train = remove_edges(g, held);
  split.probe.assign(g.num_users(), {});
  for (const auto& e : held) split.probe[e.user].push_back(e.item);
  for (auto& p : split.probe) std::sort(p.begin(), p.end());
  for (UserIndex u = 0; u < g.num_users(); ++u) {
    if (!g.items_of(u).empty() && split.train.items_of(u).empty()) {
      split.isolated_users.push_back(u);
    }
  }
  return split;
}

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace detail

/**
 * For every algorithm, recommends `list_length` items to every user holding
 * at least one item and measures popularity variance and overlap on `g`.
 */
inline MetricsReport run_personalization(const BipartiteGraph& g, const ExperimentConfig& config,
                                         const RunOptions& options = {}) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  MetricsReport report;
  report.config = config;
  report.config_hash = config_hash(config);
  report.graph = stats(g);

  std::vector<UserIndex> users;
  for (UserIndex u = 0; u < g.num_users(); ++u) {
    if (!g.items_of(u).empty()) users.push_back(u);
  }
  for (Algorithm a : config.algorithms) {
    const auto recs =
        recommend_all(g, users, a, config.params, config.list_length, options.threads);
    report.rows.push_back({a, personalization(g, recs, config.overlap_form)});
  }
  if (options.record_timing) report.wall_time_seconds = detail::seconds_since(start);
  return report;
}

/**
 * Splits `g` with the config's seed and fraction, ranks items for every
 * user that keeps training evidence and has held-out links, and computes
 * recall, precision and novelty at every l of the sweep.
 */
inline CurveReport run_link_prediction(const BipartiteGraph& g, const ExperimentConfig& config,
                                       const RunOptions& options = {}) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const LinkSplit split = split_links(g, config.removal_fraction, config.seed);
  if (split.probe_edge_count() == 0) {
    throw ConfigError("no links held out: fraction " + std::to_string(config.removal_fraction) +
                      " of " + std::to_string(g.num_edges()) + " edges rounds to zero");
  }

  CurveReport report;
  report.config = config;
  report.config_hash = config_hash(config);
  report.graph = stats(g);
  report.reference_popularity = report.graph.mean_user_tag_popularity;
  report.probe_edges = split.probe_edge_count();
  report.isolated_users = split.isolated_users.size();

  std::vector<UserIndex> users;
  for (UserIndex u = 0; u < g.num_users(); ++u) {
    if (!split.train.items_of(u).empty() && !split.probe[u].empty()) users.push_back(u);
  }
  report.evaluated_users = users.size();

  const std::size_t longest = config.l_sweep.back();
  for (Algorithm a : config.algorithms) {
    const auto recs = recommend_all(split.train, users, a, config.params, longest, options.threads);
    CurveRow row{a, {}};
    for (std::size_t l : config.l_sweep) {
      row.points.push_back(link_prediction_scores(split.train, split.probe, recs, l));
    }
    report.rows.push_back(std::move(row));
  }
  if (options.record_timing) report.wall_time_seconds = detail::seconds_since(start);
  return report;
}

/// Median of a non-empty sample; mean of the middle pair for even sizes.
inline double median(std::vector<double> values) {
  if (values.empty()) throw ConfigError("median of an empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

}  // namespace pliers

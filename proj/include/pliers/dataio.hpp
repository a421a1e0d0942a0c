#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "pliers/error.hpp"
#include "pliers/experiments.hpp"
#include "pliers/graph.hpp"
#include "pliers/rng.hpp"

namespace pliers {

// ---------------------------------------------------------------------------
// Edge-list input

/// Layout of a delimited edge-list file. A space delimiter matches any run
/// of spaces and tabs.
struct EdgeListFormat {
  char delimiter = '\t';
  std::size_t user_column = 0;
  std::size_t item_column = 1;
  std::size_t header_lines = 0;
  std::optional<char> comment_prefix = '#';

  void validate() const {
    if (user_column == item_column) {
      throw ConfigError("user and item columns must differ (both are " +
                        std::to_string(user_column) + ")");
    }
  }
};

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line, char delimiter) {
  std::vector<std::string_view> fields;
  if (delimiter == ' ') {
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
      if (pos == line.size()) break;
      std::size_t end = pos;
      while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
      fields.push_back(line.substr(pos, end - pos));
      pos = end;
    }
    return fields;
  }
  std::size_t start = 0;
  for (;;) {
    const std::size_t end = line.find(delimiter, start);
    fields.push_back(line.substr(start, end == std::string_view::npos ? end : end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return fields;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline ExternalId parse_id(std::string_view field, const char* what, std::size_t line) {
  field = trim(field);
  ExternalId value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError(std::string(what) + " id '" + std::string(field) + "' is not an integer",
                     line);
  }
  if (value < 0) {
    throw ParseError(std::string(what) + " id " + std::to_string(value) + " is negative", line);
  }
  return value;
}

}  // namespace detail

/// Parses an edge list; duplicates are kept (graph construction collapses them).
inline std::vector<Edge> parse_edge_list(std::istream& in, const EdgeListFormat& format) {
  format.validate();
  std::vector<Edge> edges;
  std::string line;
  std::size_t line_no = 0;
  const std::size_t needed = std::max(format.user_column, format.item_column) + 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no <= format.header_lines) continue;
    const std::string_view text = detail::trim(line);
    if (text.empty()) continue;
    if (format.comment_prefix && text.front() == *format.comment_prefix) continue;
    const auto fields = detail::split_fields(text, format.delimiter);
    if (fields.size() < needed) {
      throw ParseError("expected at least " + std::to_string(needed) + " fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    }
    edges.push_back({detail::parse_id(fields[format.user_column], "user", line_no),
                     detail::parse_id(fields[format.item_column], "item", line_no)});
  }
  return edges;
}

inline std::vector<Edge> load_edge_list(const std::string& path, const EdgeListFormat& format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return parse_edge_list(in, format);
}

/// Writes `user<TAB>item` lines with external ids in canonical order.
inline void write_edge_list(const BipartiteGraph& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (const auto& e : edge_list(g)) out << e.user << '\t' << e.item << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// Sampling

enum class SampleMethod { snowball, uniform_users };

inline std::string_view to_string(SampleMethod m) noexcept {
  return m == SampleMethod::snowball ? "snowball" : "uniform-users";
}

inline SampleMethod parse_sample_method(std::string_view name) {
  if (name == "snowball") return SampleMethod::snowball;
  if (name == "uniform-users" || name == "uniform") return SampleMethod::uniform_users;
  throw ConfigError("unknown sampling method '" + std::string(name) +
                    "' (expected snowball or uniform-users)");
}

struct SampleSpec {
  std::size_t max_users = 5000;
  SampleMethod method = SampleMethod::snowball;
  std::uint64_t seed = 1;
};

/**
 * Order in which snowball sampling admits users: breadth-first over the
 * user-item-user projection from a seeded random start, admitting users
 * as they are discovered. When a component is exhausted the walk restarts
 * from a uniformly chosen unvisited user. Stops after `budget` users.
 */
inline std::vector<UserIndex> snowball_order(const BipartiteGraph& g, std::size_t budget,
                                             std::uint64_t seed) {
  const std::size_t n = g.num_users();
  budget = std::min(budget, n);
  std::vector<UserIndex> order;
  order.reserve(budget);
  std::vector<unsigned char> seen(n, 0);
  std::vector<unsigned char> item_done(g.num_items(), 0);
  Rng rng(seed);
  std::size_t head = 0;
  while (order.size() < budget) {
    if (head == order.size()) {
      auto skip = rng.below(n - order.size());
      UserIndex start = 0;
      for (;; ++start) {
        if (seen[start] != 0) continue;
        if (skip == 0) break;
        --skip;
      }
      seen[start] = 1;
      order.push_back(start);
      continue;
    }
    const UserIndex u = order[head++];
    for (ItemIndex i : g.items_of(u)) {
      if (item_done[i] != 0) continue;
      item_done[i] = 1;
      for (UserIndex v : g.users_of(i)) {
        if (seen[v] != 0) continue;
        seen[v] = 1;
        order.push_back(v);
        if (order.size() == budget) return order;
      }
    }
  }
  return order;
}

/// Subgraph induced by `users`: each keeps its full item set.
inline BipartiteGraph induced_subgraph(const BipartiteGraph& g, std::vector<UserIndex> users) {
  std::sort(users.begin(), users.end());
  users.erase(std::unique(users.begin(), users.end()), users.end());
  std::vector<unsigned char> keep_item(g.num_items(), 0);
  for (UserIndex u : users) {
    for (ItemIndex i : g.items_of(u)) keep_item[i] = 1;
  }
  std::vector<ItemIndex> remap(g.num_items(), 0);
  std::vector<ExternalId> item_ids;
  for (ItemIndex i = 0; i < g.num_items(); ++i) {
    if (keep_item[i] != 0) {
      remap[i] = static_cast<ItemIndex>(item_ids.size());
      item_ids.push_back(g.item_ids()[i]);
    }
  }
  std::vector<ExternalId> user_ids;
  std::vector<IndexEdge> edges;
  for (UserIndex u : users) {
    const auto local = static_cast<UserIndex>(user_ids.size());
    user_ids.push_back(g.user_ids()[u]);
    for (ItemIndex i : g.items_of(u)) edges.push_back({local, remap[i]});
  }
  return BipartiteGraph::from_sorted_edges(std::move(user_ids), std::move(item_ids), edges);
}

/// Restricts `g` to at most `spec.max_users` users. Deterministic given the seed.
inline BipartiteGraph sample_users(const BipartiteGraph& g, const SampleSpec& spec) {
  if (spec.max_users == 0) throw ConfigError("max_users must be at least 1");
  if (spec.max_users >= g.num_users()) return g;
  if (spec.method == SampleMethod::snowball) {
    return induced_subgraph(g, snowball_order(g, spec.max_users, spec.seed));
  }
  std::vector<UserIndex> users(g.num_users());
  for (UserIndex u = 0; u < users.size(); ++u) users[u] = u;
  Rng rng(spec.seed);
  for (std::size_t k = 0; k < spec.max_users; ++k) {
    std::swap(users[k], users[k + rng.below(users.size() - k)]);
  }
  users.resize(spec.max_users);
  return induced_subgraph(g, std::move(users));
}

// ---------------------------------------------------------------------------
// Synthetic fixtures

/// Target shape of a synthetic power-law bipartite graph. The defaults give
/// roughly 20K distinct items, mean item degree 5.6 and mean owned-item
/// degree 125, close to the published Delicious user-tag sample.
struct FixtureSpec {
  std::size_t n_users = 2000;
  /// Item id range; not every id ends up linked.
  std::size_t n_items = 23500;
  std::size_t n_links = 113400;
  /// Zipf exponents of the user and item attachment weights (rank r gets (r+1)^-x).
  double user_exponent = 0.3;
  double item_exponent = 0.81;
  std::uint64_t seed = 1;
};

namespace detail {

class WeightedPicker {
 public:
  WeightedPicker(std::size_t count, double exponent) : cumulative_(count) {
    double total = 0.0;
    for (std::size_t r = 0; r < count; ++r) {
      total += std::pow(static_cast<double>(r + 1), -exponent);
      cumulative_[r] = total;
    }
  }

  std::size_t pick(Rng& rng) const {
    const double x = rng.unit() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), x);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                                 cumulative_.size() - 1);
  }

 private:
  std::vector<double> cumulative_;
};

}  // namespace detail

/**
 * Chung-Lu style bipartite graph: every user first receives one item, then
 * the remaining links join a Zipf-weighted user to a Zipf-weighted item,
 * rejecting duplicates. User ids are 0..n_users-1; item ids are drawn from
 * 0..n_items-1, and items never picked do not appear.
 */
inline std::vector<Edge> generate_power_law_edges(const FixtureSpec& spec) {
  if (spec.n_users == 0 || spec.n_items == 0) {
    throw ConfigError("fixture needs at least one user and one item");
  }
  if (spec.n_links < spec.n_users) {
    throw ConfigError("fixture needs at least one link per user");
  }
  if (static_cast<double>(spec.n_links) >
      0.5 * static_cast<double>(spec.n_users) * static_cast<double>(spec.n_items)) {
    throw ConfigError("fixture link count exceeds half of all possible links");
  }
  Rng rng(spec.seed);
  const detail::WeightedPicker users(spec.n_users, spec.user_exponent);
  const detail::WeightedPicker items(spec.n_items, spec.item_exponent);
  std::unordered_set<std::uint64_t> present;
  present.reserve(spec.n_links * 2);
  std::vector<Edge> edges;
  edges.reserve(spec.n_links);
  auto add = [&](std::size_t u, std::size_t i) {
    const std::uint64_t key = static_cast<std::uint64_t>(u) * spec.n_items + i;
    if (!present.insert(key).second) return false;
    edges.push_back({static_cast<ExternalId>(u), static_cast<ExternalId>(i)});
    return true;
  };
  for (std::size_t u = 0; u < spec.n_users; ++u) add(u, items.pick(rng));
  while (edges.size() < spec.n_links) {
    const std::size_t u = users.pick(rng);
    const std::size_t i = items.pick(rng);
    add(u, i);
  }
  return edges;
}

// ---------------------------------------------------------------------------
// Reports

enum class ReportFormat { csv, json };

inline ReportFormat parse_report_format(std::string_view name) {
  if (name == "csv") return ReportFormat::csv;
  if (name == "json") return ReportFormat::json;
  throw ConfigError("unknown output format '" + std::string(name) + "' (expected csv or json)");
}

namespace detail {

inline std::string fixed6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

inline std::uint64_t parse_hex64(const std::string& s) {
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x, 16);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("bad config hash '" + s + "'", 0);
  }
  return x;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

using nlohmann::json;

inline json to_json(const ExperimentConfig& c) {
  json algorithms = json::array();
  for (Algorithm a : c.algorithms) algorithms.push_back(std::string(to_string(a)));
  return json{{"algorithms", algorithms},
              {"lambda", c.params.lambda},
              {"epsilon", c.params.epsilon},
              {"gamma", c.params.gamma},
              {"list_length", c.list_length},
              {"removal_fraction", c.removal_fraction},
              {"l_sweep", c.l_sweep},
              {"seed", c.seed},
              {"overlap_form", std::string(to_string(c.overlap_form))},
              {"dataset", c.dataset}};
}

inline ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  c.algorithms.clear();
  for (const auto& a : j.at("algorithms")) c.algorithms.push_back(parse_algorithm(a.get<std::string>()));
  c.params.lambda = j.at("lambda").get<double>();
  c.params.epsilon = j.at("epsilon").get<double>();
  c.params.gamma = j.at("gamma").get<double>();
  c.list_length = j.at("list_length").get<std::size_t>();
  c.removal_fraction = j.at("removal_fraction").get<double>();
  c.l_sweep = j.at("l_sweep").get<std::vector<std::size_t>>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.overlap_form = parse_overlap_form(j.at("overlap_form").get<std::string>());
  c.dataset = j.at("dataset").get<std::string>();
  return c;
}

inline json to_json(const GraphStats& s) {
  return json{{"n_users", s.n_users},
              {"n_items", s.n_items},
              {"n_links", s.n_links},
              {"mean_item_degree", s.mean_item_degree},
              {"mean_user_tag_popularity", s.mean_user_tag_popularity},
              {"isolated_users", s.isolated_users},
              {"isolated_items", s.isolated_items}};
}

inline GraphStats stats_from_json(const json& j) {
  GraphStats s;
  s.n_users = j.at("n_users").get<std::size_t>();
  s.n_items = j.at("n_items").get<std::size_t>();
  s.n_links = j.at("n_links").get<std::size_t>();
  s.mean_item_degree = j.at("mean_item_degree").get<double>();
  s.mean_user_tag_popularity = j.at("mean_user_tag_popularity").get<double>();
  s.isolated_users = j.at("isolated_users").get<std::size_t>();
  s.isolated_items = j.at("isolated_items").get<std::size_t>();
  return s;
}

inline json to_json(const MetricsReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back(json{{"algorithm", std::string(to_string(row.algorithm))},
                        {"V", row.scores.v},
                        {"O", row.scores.o},
                        {"users_counted", row.scores.users_counted}});
  }
  json j{{"kind", "personalization"},
         {"config", to_json(r.config)},
         {"config_hash", detail::hex64(r.config_hash)},
         {"graph", to_json(r.graph)},
         {"rows", rows}};
  if (r.wall_time_seconds) j["wall_time_seconds"] = *r.wall_time_seconds;
  return j;
}

inline MetricsReport metrics_report_from_json(const json& j) {
  if (j.at("kind").get<std::string>() != "personalization") {
    throw ParseError("not a personalization report", 0);
  }
  MetricsReport r;
  r.config = config_from_json(j.at("config"));
  r.config_hash = detail::parse_hex64(j.at("config_hash").get<std::string>());
  r.graph = stats_from_json(j.at("graph"));
  for (const auto& row : j.at("rows")) {
    r.rows.push_back({parse_algorithm(row.at("algorithm").get<std::string>()),
                      {row.at("V").get<double>(), row.at("O").get<double>(),
                       row.at("users_counted").get<std::size_t>()}});
  }
  if (j.contains("wall_time_seconds")) r.wall_time_seconds = j.at("wall_time_seconds").get<double>();
  return r;
}

/// R and P keep the method's own naming, which is swapped relative to common IR usage.
inline json link_metric_names() {
  return json{{"R", {{"name", "recall"}, {"conventional_name", "precision@L"},
                     {"definition", "hits in top L / L"}}},
              {"P", {{"name", "precision"}, {"conventional_name", "recall@L"},
                     {"definition", "hits in top L / held-out links of the user"}}},
              {"N", {{"name", "novelty"}, {"conventional_name", "mean popularity@L"},
                     {"definition", "mean train degree of the top L items"}}}};
}

inline json to_json(const CurveReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json points = json::array();
    for (const auto& p : row.points) {
      points.push_back(json{{"L", p.l},
                            {"R", p.recall},
                            {"P", p.precision},
                            {"N", p.novelty},
                            {"users_counted", p.users_counted}});
    }
    rows.push_back(json{{"algorithm", std::string(to_string(row.algorithm))}, {"points", points}});
  }
  json j{{"kind", "link_prediction"},
         {"config", to_json(r.config)},
         {"config_hash", detail::hex64(r.config_hash)},
         {"graph", to_json(r.graph)},
         {"reference_popularity", r.reference_popularity},
         {"probe_edges", r.probe_edges},
         {"evaluated_users", r.evaluated_users},
         {"isolated_users", r.isolated_users},
         {"metric_names", link_metric_names()},
         {"rows", rows}};
  if (r.wall_time_seconds) j["wall_time_seconds"] = *r.wall_time_seconds;
  return j;
}

inline CurveReport curve_report_from_json(const json& j) {
  if (j.at("kind").get<std::string>() != "link_prediction") {
    throw ParseError("not a link-prediction report", 0);
  }
  CurveReport r;
  r.config = config_from_json(j.at("config"));
  r.config_hash = detail::parse_hex64(j.at("config_hash").get<std::string>());
  r.graph = stats_from_json(j.at("graph"));
  r.reference_popularity = j.at("reference_popularity").get<double>();
  r.probe_edges = j.at("probe_edges").get<std::size_t>();
  r.evaluated_users = j.at("evaluated_users").get<std::size_t>();
  r.isolated_users = j.at("isolated_users").get<std::size_t>();
  for (const auto& row : j.at("rows")) {
    CurveRow out{parse_algorithm(row.at("algorithm").get<std::string>()), {}};
    for (const auto& p : row.at("points")) {
      out.points.push_back({p.at("L").get<std::size_t>(), p.at("R").get<double>(),
                            p.at("P").get<double>(), p.at("N").get<double>(),
                            p.at("users_counted").get<std::size_t>()});
    }
    r.rows.push_back(std::move(out));
  }
  if (j.contains("wall_time_seconds")) r.wall_time_seconds = j.at("wall_time_seconds").get<double>();
  return r;
}

/// algorithm,V,O
inline std::string to_csv(const MetricsReport& r) {
  std::string out = "algorithm,V,O\n";
  for (const auto& row : r.rows) {
    out += detail::csv_field(to_string(row.algorithm)) + ',' + detail::fixed6(row.scores.v) + ',' +
           detail::fixed6(row.scores.o) + '\n';
  }
  return out;
}

inline constexpr std::string_view kReferenceRowName = "reference_popularity";

/// algorithm,L,R,P,N with a final reference row carrying p̄(T_U) in the N column.
inline std::string to_csv(const CurveReport& r) {
  std::string out = "algorithm,L,R,P,N\n";
  for (const auto& row : r.rows) {
    for (const auto& p : row.points) {
      out += detail::csv_field(to_string(row.algorithm)) + ',' + std::to_string(p.l) + ',' +
             detail::fixed6(p.recall) + ',' + detail::fixed6(p.precision) + ',' +
             detail::fixed6(p.novelty) + '\n';
    }
  }
  out += std::string(kReferenceRowName) + ",,,," + detail::fixed6(r.reference_popularity) + '\n';
  return out;
}

inline std::string render(const json& j) { return j.dump(2) + '\n'; }

template <class Report>
std::string render_report(const Report& r, ReportFormat format) {
  return format == ReportFormat::csv ? to_csv(r) : render(to_json(r));
}

inline void write_report(const MetricsReport& r, const std::string& path, ReportFormat format) {
  detail::write_text(path, render_report(r, format));
}

inline void write_report(const CurveReport& r, const std::string& path, ReportFormat format) {
  detail::write_text(path, render_report(r, format));
}

inline MetricsReport read_metrics_report(const std::string& path) {
  try {
    return metrics_report_from_json(json::parse(detail::read_text(path)));
  } catch (const json::exception& e) {
    throw ParseError("'" + path + "': " + e.what(), 0);
  }
}

inline CurveReport read_curve_report(const std::string& path) {
  try {
    return curve_report_from_json(json::parse(detail::read_text(path)));
  } catch (const json::exception& e) {
    throw ParseError("'" + path + "': " + e.what(), 0);
  }
}

// ---------------------------------------------------------------------------
// Multi-seed summaries

/// Median and range of one metric across seeds.
struct Spread {
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
};

inline Spread spread_of(const std::vector<double>& xs) {
  return {pliers::median(xs), *std::min_element(xs.begin(), xs.end()),
          *std::max_element(xs.begin(), xs.end())};
}

namespace detail {

template <class Report>
void check_aligned(const std::vector<Report>& runs) {
  if (runs.empty()) throw ConfigError("no runs to summarise");
  for (const auto& r : runs) {
    if (r.rows.size() != runs.front().rows.size()) {
      throw ConfigError("runs disagree on the algorithm set");
    }
    for (std::size_t k = 0; k < r.rows.size(); ++k) {
      if (r.rows[k].algorithm != runs.front().rows[k].algorithm) {
        throw ConfigError("runs disagree on the algorithm order");
      }
    }
  }
}

inline json to_json(const Spread& s) {
  return json{{"median", s.median}, {"min", s.min}, {"max", s.max}};
}

inline constexpr std::array<const char*, 3> kSpreadStats = {"median", "min", "max"};

inline double pick(const Spread& s, std::string_view stat) {
  return stat == "median" ? s.median : stat == "min" ? s.min : s.max;
}

}  // namespace detail

struct PersonalizationSummary {
  Algorithm algorithm = Algorithm::pliers;
  Spread v;
  Spread o;
};

inline std::vector<PersonalizationSummary> summarize(const std::vector<MetricsReport>& runs) {
  detail::check_aligned(runs);
  std::vector<PersonalizationSummary> out;
  for (std::size_t k = 0; k < runs.front().rows.size(); ++k) {
    std::vector<double> vs, os;
    for (const auto& r : runs) {
      vs.push_back(r.rows[k].scores.v);
      os.push_back(r.rows[k].scores.o);
    }
    out.push_back({runs.front().rows[k].algorithm, spread_of(vs), spread_of(os)});
  }
  return out;
}

struct CurvePointSummary {
  std::size_t l = 0;
  Spread recall;
  Spread precision;
  Spread novelty;
};

struct CurveSummary {
  std::vector<std::pair<Algorithm, std::vector<CurvePointSummary>>> rows;
  Spread reference_popularity;
};

inline CurveSummary summarize(const std::vector<CurveReport>& runs) {
  detail::check_aligned(runs);
  CurveSummary out;
  for (std::size_t k = 0; k < runs.front().rows.size(); ++k) {
    const auto& first = runs.front().rows[k];
    std::vector<CurvePointSummary> points;
    for (std::size_t p = 0; p < first.points.size(); ++p) {
      std::vector<double> rs, ps, ns;
      for (const auto& r : runs) {
        const auto& point = r.rows[k].points.at(p);
        if (point.l != first.points[p].l) throw ConfigError("runs disagree on the l sweep");
        rs.push_back(point.recall);
        ps.push_back(point.precision);
        ns.push_back(point.novelty);
      }
      points.push_back({first.points[p].l, spread_of(rs), spread_of(ps), spread_of(ns)});
    }
    out.rows.emplace_back(first.algorithm, std::move(points));
  }
  std::vector<double> refs;
  for (const auto& r : runs) refs.push_back(r.reference_popularity);
  out.reference_popularity = spread_of(refs);
  return out;
}

/// seed,algorithm,V,O for every run, then median/min/max rows across runs.
inline std::string to_csv(const std::vector<MetricsReport>& runs) {
  const auto summary = summarize(runs);
  std::string out = "seed,algorithm,V,O\n";
  for (const auto& r : runs) {
    for (const auto& row : r.rows) {
      out += std::to_string(r.config.seed) + ',' + std::string(to_string(row.algorithm)) + ',' +
             detail::fixed6(row.scores.v) + ',' + detail::fixed6(row.scores.o) + '\n';
    }
  }
  for (const char* stat : detail::kSpreadStats) {
    for (const auto& s : summary) {
      out += std::string(stat) + ',' + std::string(to_string(s.algorithm)) + ',' +
             detail::fixed6(detail::pick(s.v, stat)) + ',' +
             detail::fixed6(detail::pick(s.o, stat)) + '\n';
    }
  }
  return out;
}

/// seed,algorithm,L,R,P,N for every run, then median/min/max rows.
inline std::string to_csv(const std::vector<CurveReport>& runs) {
  const auto summary = summarize(runs);
  std::string out = "seed,algorithm,L,R,P,N\n";
  for (const auto& r : runs) {
    const std::string seed = std::to_string(r.config.seed);
    for (const auto& row : r.rows) {
      for (const auto& p : row.points) {
        out += seed + ',' + std::string(to_string(row.algorithm)) + ',' + std::to_string(p.l) +
               ',' + detail::fixed6(p.recall) + ',' + detail::fixed6(p.precision) + ',' +
               detail::fixed6(p.novelty) + '\n';
      }
    }
    out += seed + ',' + std::string(kReferenceRowName) + ",,,," +
           detail::fixed6(r.reference_popularity) + '\n';
  }
  for (const char* stat : detail::kSpreadStats) {
    for (const auto& [algorithm, points] : summary.rows) {
      for (const auto& p : points) {
        out += std::string(stat) + ',' + std::string(to_string(algorithm)) + ',' +
               std::to_string(p.l) + ',' + detail::fixed6(detail::pick(p.recall, stat)) + ',' +
               detail::fixed6(detail::pick(p.precision, stat)) + ',' +
               detail::fixed6(detail::pick(p.novelty, stat)) + '\n';
      }
    }
    out += std::string(stat) + ',' + std::string(kReferenceRowName) + ",,,," +
           detail::fixed6(detail::pick(summary.reference_popularity, stat)) + '\n';
  }
  return out;
}

inline json to_json(const std::vector<MetricsReport>& runs) {
  json all = json::array();
  for (const auto& r : runs) all.push_back(to_json(r));
  json summary = json::array();
  for (const auto& s : summarize(runs)) {
    summary.push_back(json{{"algorithm", std::string(to_string(s.algorithm))},
                           {"V", detail::to_json(s.v)},
                           {"O", detail::to_json(s.o)}});
  }
  return json{{"kind", "personalization_seeds"}, {"runs", all}, {"summary", summary}};
}

inline json to_json(const std::vector<CurveReport>& runs) {
  json all = json::array();
  for (const auto& r : runs) all.push_back(to_json(r));
  const auto s = summarize(runs);
  json rows = json::array();
  for (const auto& [algorithm, points] : s.rows) {
    json ps = json::array();
    for (const auto& p : points) {
      ps.push_back(json{{"L", p.l},
                        {"R", detail::to_json(p.recall)},
                        {"P", detail::to_json(p.precision)},
                        {"N", detail::to_json(p.novelty)}});
    }
    rows.push_back(json{{"algorithm", std::string(to_string(algorithm))}, {"points", ps}});
  }
  return json{{"kind", "link_prediction_seeds"},
              {"runs", all},
              {"summary", {{"rows", rows},
                           {"reference_popularity", detail::to_json(s.reference_popularity)}}}};
}

/// A single run renders as a plain report; several add seed columns and a summary.
template <class Report>
std::string render_runs(const std::vector<Report>& runs, ReportFormat format) {
  if (runs.size() == 1) return render_report(runs.front(), format);
  return format == ReportFormat::csv ? to_csv(runs) : render(to_json(runs));
}

}  // namespace pliers

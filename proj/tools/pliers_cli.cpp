// Command-line front end: dataset statistics, sampling, single-user
// recommendations, the two evaluation studies, and fixture generation.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pliers/pliers.hpp"

namespace {

using namespace pliers;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct InputOptions {
  std::string path;
  std::string delimiter = "tab";
  std::size_t user_column = 0;
  std::size_t item_column = 1;
  std::size_t header_lines = 0;
  std::string comment = "#";

  EdgeListFormat format() const {
    EdgeListFormat f;
    if (delimiter == "tab" || delimiter == "\\t") {
      f.delimiter = '\t';
    } else if (delimiter == "space" || delimiter == "whitespace") {
      f.delimiter = ' ';
    } else if (delimiter == "comma") {
      f.delimiter = ',';
    } else if (delimiter.size() == 1) {
      f.delimiter = delimiter[0];
    } else {
      throw ConfigError("delimiter must be a single character, tab, space or comma");
    }
    f.user_column = user_column;
    f.item_column = item_column;
    f.header_lines = header_lines;
    if (comment == "none" || comment.empty()) {
      f.comment_prefix.reset();
    } else if (comment.size() == 1) {
      f.comment_prefix = comment[0];
    } else {
      throw ConfigError("comment prefix must be a single character or 'none'");
    }
    f.validate();
    return f;
  }

  std::string describe() const {
    return "input=" + path + ";delimiter=" + delimiter + ";user_column=" +
           std::to_string(user_column) + ";item_column=" + std::to_string(item_column) +
           ";header_lines=" + std::to_string(header_lines) + ";comment=" + comment;
  }
};

void add_input_options(CLI::App* cmd, InputOptions& in) {
  cmd->add_option("-i,--input", in.path, "Edge-list file")->required();
  cmd->add_option("--delimiter", in.delimiter,
                  "Field delimiter: tab, space (any whitespace run), comma, or one character")
      ->capture_default_str();
  cmd->add_option("--user-column", in.user_column, "0-based user column")->capture_default_str();
  cmd->add_option("--item-column", in.item_column, "0-based item/tag column")
      ->capture_default_str();
  cmd->add_option("--header-lines", in.header_lines, "Lines to skip at the top")
      ->capture_default_str();
  cmd->add_option("--comment", in.comment, "Comment prefix character, or 'none'")
      ->capture_default_str();
}

BipartiteGraph load_graph(const InputOptions& in) {
  return build_graph(load_edge_list(in.path, in.format()));
}

/// Accepts comma-separated tokens, each N, A..B, or A..B:STEP.
std::vector<std::size_t> parse_count_list(const std::string& text, const char* what) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  auto number = [&](const std::string& s) -> std::size_t {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (s.empty() || pos != s.size() || s[0] == '-') {
      throw ConfigError(std::string("bad ") + what + " value '" + s + "'");
    }
    return static_cast<std::size_t>(v);
  };
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    const std::string token = text.substr(start, end - start);
    const auto dots = token.find("..");
    if (dots == std::string::npos) {
      out.push_back(number(token));
    } else {
      std::string hi = token.substr(dots + 2);
      std::size_t step = 1;
      if (const auto colon = hi.find(':'); colon != std::string::npos) {
        step = number(hi.substr(colon + 1));
        hi = hi.substr(0, colon);
      }
      const std::size_t a = number(token.substr(0, dots));
      const std::size_t b = number(hi);
      if (step == 0 || b < a) throw ConfigError(std::string("bad ") + what + " range '" + token + "'");
      for (std::size_t v = a; v <= b; v += step) out.push_back(v);
    }
    start = end + 1;
  }
  return out;
}

std::vector<Algorithm> parse_algorithms(const std::string& text) {
  std::vector<Algorithm> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    out.push_back(parse_algorithm(text.substr(start, end - start)));
    start = end + 1;
  }
  return out;
}

std::string fixed6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

// ---------------------------------------------------------------------------

struct StatsCommand {
  InputOptions input;
  std::string output_format = "text";

  int run() const {
    const auto edges = load_edge_list(input.path, input.format());
    const auto g = build_graph(edges);
    const auto s = stats(g);
    if (output_format == "json") {
      auto j = to_json(s);
      j["collapsed_duplicates"] = g.collapsed_duplicates();
      std::cout << render(j);
      return 0;
    }
    std::cout << "users\t" << s.n_users << '\n'
              << "items\t" << s.n_items << '\n'
              << "links\t" << s.n_links << '\n'
              << "mean_item_degree\t" << fixed6(s.mean_item_degree) << '\n'
              << "mean_user_tag_popularity\t" << fixed6(s.mean_user_tag_popularity) << '\n'
              << "isolated_users\t" << s.isolated_users << '\n'
              << "isolated_items\t" << s.isolated_items << '\n'
              << "collapsed_duplicates\t" << g.collapsed_duplicates() << '\n';
    return 0;
  }
};

struct SampleCommand {
  InputOptions input;
  std::size_t max_users = 5000;
  std::string method = "snowball";
  std::uint64_t seed = 1;
  std::string output;

  int run() const {
    const auto g = load_graph(input);
    const auto sampled = sample_users(g, {max_users, parse_sample_method(method), seed});
    write_edge_list(sampled, output);
    const auto s = stats(sampled);
    std::cerr << "sampled " << s.n_users << " users, " << s.n_items << " items, " << s.n_links
              << " links -> " << output << '\n';
    return 0;
  }
};

struct RecommendCommand {
  InputOptions input;
  ExternalId user = 0;
  std::string algorithm = "pliers";
  ScorerParams params;
  std::size_t top = 10;

  int run() const {
    const Algorithm a = parse_algorithm(algorithm);
    params.validate();
    const auto g = load_graph(input);
    const auto u = g.find_user(user);
    if (!u) throw GraphError("unknown user id " + std::to_string(user));
    const auto list = recommend(g, *u, a, params, top);
    for (const auto& r : list.entries) {
      std::cout << g.item_id(r.item) << '\t' << fixed6(r.score) << '\n';
    }
    return 0;
  }
};

struct EvalOptions {
  InputOptions input;
  std::string algorithms = "pliers,probs,heats,hybrid,pd,bhc";
  ScorerParams params;
  std::size_t top = 10;
  std::string overlap_form = "mean";
  double fraction = 0.10;
  std::string l_sweep = "1..20,30..100:10";
  std::optional<std::uint64_t> seed;
  std::string seeds;
  std::optional<std::size_t> max_users;
  std::optional<std::string> method;
  std::string output;
  std::string output_format = "csv";
  unsigned threads = 0;
  bool timing = false;

  std::vector<std::uint64_t> seed_list() const {
    if (seed && !seeds.empty()) throw ConfigError("--seed and --seeds are mutually exclusive");
    if (seeds.empty()) return {seed.value_or(1)};
    std::vector<std::uint64_t> out;
    for (auto s : parse_count_list(seeds, "seed")) out.push_back(s);
    return out;
  }

  ExperimentConfig config(std::uint64_t run_seed) const {
    ExperimentConfig c;
    c.algorithms = parse_algorithms(algorithms);
    c.params = params;
    c.list_length = top;
    c.removal_fraction = fraction;
    c.l_sweep = parse_count_list(l_sweep, "l-sweep");
    c.seed = run_seed;
    c.overlap_form = parse_overlap_form(overlap_form);
    c.dataset = input.describe() + ";sample=";
    if (max_users) {
      c.dataset += std::string(to_string(parse_sample_method(method.value_or("snowball")))) +
                   ":max_users=" + std::to_string(*max_users) + ":seed=" + std::to_string(run_seed);
    } else {
      c.dataset += "none";
    }
    c.validate();
    return c;
  }

  BipartiteGraph graph_for(const BipartiteGraph& full, std::uint64_t run_seed) const {
    if (!max_users) return full;
    return sample_users(full, {*max_users, parse_sample_method(method.value_or("snowball")), run_seed});
  }

  void check() const {
    if (method && !max_users) throw ConfigError("--method requires --max-users");
    parse_report_format(output_format);
  }
};

void add_eval_options(CLI::App* cmd, EvalOptions& o, bool curves) {
  add_input_options(cmd, o.input);
  cmd->add_option("--algorithms", o.algorithms,
                  "Comma-separated subset of pliers,probs,heats,hybrid,pd,bhc")
      ->capture_default_str();
  cmd->add_option("--lambda", o.params.lambda, "Hybrid weight of ProbS, in [0,1]")
      ->capture_default_str();
  cmd->add_option("--epsilon", o.params.epsilon, "PD degree exponent")->capture_default_str();
  cmd->add_option("--gamma", o.params.gamma, "BHC degree exponent")->capture_default_str();
  auto* seed = cmd->add_option("--seed", o.seed, "Seed for splitting and sampling [1]");
  auto* seeds = cmd->add_option("--seeds", o.seeds,
                                "Several seeds (e.g. 1..5); output gains a seed column and "
                                "median/min/max rows");
  seed->excludes(seeds);
  cmd->add_option("--max-users", o.max_users, "Sample the input down to this many users first")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--method", o.method, "Sampling method: snowball or uniform-users [snowball]");
  cmd->add_option("-o,--output", o.output, "Report file")->required();
  cmd->add_option("--output-format", o.output_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--threads", o.threads, "Worker cap, 0 = all cores; never changes output")
      ->capture_default_str();
  cmd->add_flag("--timing", o.timing, "Record wall time in the report (breaks byte-identity)");
  if (curves) {
    cmd->add_option("--fraction", o.fraction, "Fraction of links held out, in (0,1)")
        ->capture_default_str();
    cmd->add_option("--l-sweep", o.l_sweep, "List lengths: comma list of N, A..B or A..B:STEP")
        ->capture_default_str();
  } else {
    cmd->add_option("--top", o.top, "Recommendation list length L")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--overlap-form", o.overlap_form, "mean (default) or product")
        ->check(CLI::IsMember({"mean", "product"}))
        ->capture_default_str();
  }
}

/// Writes the report and, for csv, a json sidecar carrying config and metadata.
template <class Report>
void emit(const std::vector<Report>& runs, const EvalOptions& o) {
  const auto format = parse_report_format(o.output_format);
  detail::write_text(o.output, render_runs(runs, format));
  if (format == ReportFormat::csv) {
    detail::write_text(o.output + ".meta.json", render_runs(runs, ReportFormat::json));
  }
}

struct EvalPersonalizationCommand {
  EvalOptions opts;

  int run() const {
    opts.check();
    const auto seeds = opts.seed_list();
    const auto full = load_graph(opts.input);
    std::vector<MetricsReport> runs;
    for (auto s : seeds) {
      const auto config = opts.config(s);
      runs.push_back(run_personalization(opts.graph_for(full, s), config,
                                         {opts.threads, opts.timing}));
    }
    emit(runs, opts);
    return 0;
  }
};

struct EvalLinkPredCommand {
  EvalOptions opts;

  int run() const {
    opts.check();
    const auto seeds = opts.seed_list();
    const auto full = load_graph(opts.input);
    std::vector<CurveReport> runs;
    for (auto s : seeds) {
      const auto config = opts.config(s);
      runs.push_back(run_link_prediction(opts.graph_for(full, s), config,
                                         {opts.threads, opts.timing}));
    }
    emit(runs, opts);
    return 0;
  }
};

struct GenFixtureCommand {
  FixtureSpec spec;
  std::string output;
  std::string manifest;

  int run() const {
    const auto edges = generate_power_law_edges(spec);
    const auto g = build_graph(edges);
    write_edge_list(g, output);
    if (!manifest.empty()) {
      json m{{"generator",
              {{"n_users", spec.n_users},
               {"n_items", spec.n_items},
               {"n_links", spec.n_links},
               {"user_exponent", spec.user_exponent},
               {"item_exponent", spec.item_exponent},
               {"seed", spec.seed}}},
             {"stats", to_json(stats(g))}};
      detail::write_text(manifest, render(m));
    }
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diffusion-based recommenders on bipartite user-tag graphs"};
  app.require_subcommand(1);
  app.footer(
      "Exit status: 0 when the requested output was produced, 1 on runtime errors,\n"
      "2 on usage errors. Invalid combinations: --seed with --seeds; --method\n"
      "without --max-users; --top 0; --fraction outside (0,1); a non-increasing\n"
      "--l-sweep; repeated or unknown --algorithms entries.");

  StatsCommand stats_cmd;
  auto* stats = app.add_subcommand("stats", "Print users, items, links and degree averages");
  add_input_options(stats, stats_cmd.input);
  stats->add_option("--output-format", stats_cmd.output_format, "text or json")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();

  SampleCommand sample_cmd;
  auto* sample = app.add_subcommand("sample", "Restrict a graph to a user budget");
  add_input_options(sample, sample_cmd.input);
  sample->add_option("--max-users", sample_cmd.max_users, "User budget")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sample->add_option("--method", sample_cmd.method, "snowball or uniform-users")
      ->capture_default_str();
  sample->add_option("--seed", sample_cmd.seed, "Sampling seed")->capture_default_str();
  sample->add_option("-o,--output", sample_cmd.output, "Edge-list output")->required();

  RecommendCommand rec_cmd;
  auto* rec = app.add_subcommand("recommend", "Top items for one user");
  add_input_options(rec, rec_cmd.input);
  rec->add_option("--user", rec_cmd.user, "External user id")->required();
  rec->add_option("--algorithm", rec_cmd.algorithm, "pliers, probs, heats, hybrid, pd or bhc")
      ->capture_default_str();
  rec->add_option("--lambda", rec_cmd.params.lambda, "Hybrid weight of ProbS")->capture_default_str();
  rec->add_option("--epsilon", rec_cmd.params.epsilon, "PD exponent")->capture_default_str();
  rec->add_option("--gamma", rec_cmd.params.gamma, "BHC exponent")->capture_default_str();
  rec->add_option("--top", rec_cmd.top, "List length")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  EvalPersonalizationCommand pers_cmd;
  auto* pers = app.add_subcommand("eval-personalization",
                                  "Popularity variance V and overlap O per algorithm");
  add_eval_options(pers, pers_cmd.opts, false);

  EvalLinkPredCommand link_cmd;
  auto* link = app.add_subcommand("eval-linkpred", "Recall, precision and novelty curves");
  add_eval_options(link, link_cmd.opts, true);

  GenFixtureCommand gen_cmd;
  auto* gen = app.add_subcommand("gen-fixture", "Write a synthetic power-law edge list");
  gen->add_option("--users", gen_cmd.spec.n_users, "Users")->capture_default_str();
  gen->add_option("--items", gen_cmd.spec.n_items, "Item id range")->capture_default_str();
  gen->add_option("--links", gen_cmd.spec.n_links, "Distinct links")->capture_default_str();
  gen->add_option("--user-exponent", gen_cmd.spec.user_exponent, "Zipf exponent for users")
      ->capture_default_str();
  gen->add_option("--item-exponent", gen_cmd.spec.item_exponent, "Zipf exponent for items")
      ->capture_default_str();
  gen->add_option("--seed", gen_cmd.spec.seed, "Generator seed")->capture_default_str();
  gen->add_option("-o,--output", gen_cmd.output, "Edge-list output")->required();
  gen->add_option("--manifest", gen_cmd.manifest, "Also write expected stats as json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*stats) return stats_cmd.run();
    if (*sample) return sample_cmd.run();
    if (*rec) return rec_cmd.run();
    if (*pers) return pers_cmd.run();
    if (*link) return link_cmd.run();
    if (*gen) return gen_cmd.run();
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

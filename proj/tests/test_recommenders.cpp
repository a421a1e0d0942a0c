#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "oracle.hpp"
#include "pliers/experiments.hpp"
#include "pliers/recommenders.hpp"

using namespace pliers;

namespace {

// Users u1{i1,i2}, u2{i2,i3}; external ids equal the subscripts.
BipartiteGraph micro() { return build_graph({{1, 1}, {1, 2}, {2, 2}, {2, 3}}); }
constexpr UserIndex kU1 = 0;

void expect_scores(const ScoreVector& got, const std::vector<double>& want, double tol = 1e-15) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t j = 0; j < want.size(); ++j) EXPECT_NEAR(got[j], want[j], tol) << "item " << j;
}

BipartiteGraph complete(std::size_t users, std::size_t items) {
  std::vector<Edge> edges;
  for (std::size_t u = 0; u < users; ++u) {
    for (std::size_t i = 0; i < items; ++i) {
      edges.push_back({static_cast<ExternalId>(u), static_cast<ExternalId>(i)});
    }
  }
  return build_graph(edges);
}

}  // namespace

TEST(ProbS, MicroGraph) { expect_scores(score_probs(micro(), kU1), {0.75, 1.0, 0.25}); }

TEST(ProbS, SingleUserSingleItem) { expect_scores(score_probs(build_graph({{0, 0}}), 0), {1.0}); }

TEST(ProbS, TargetWithoutItems) {
  auto g = build_graph({{1, 1}, {1, 2}, {2, 2}, {2, 3}, {3, 3}});
  std::vector<IndexEdge> drop = {{2, 2}};
  auto h = remove_edges(g, drop);
  expect_scores(score_probs(h, 2), {0.0, 0.0, 0.0});
  expect_scores(score_heats(h, 2), {0.0, 0.0, 0.0});
  expect_scores(score_pliers(h, 2), {0.0, 0.0, 0.0});
}

TEST(HeatS, MicroGraph) { expect_scores(score_heats(micro(), kU1), {1.0, 0.75, 0.5}); }

TEST(HeatS, CompleteGraphIsFlat) {
  auto g = complete(4, 5);
  auto h = score_heats(g, 2);
  for (std::size_t j = 1; j < h.size(); ++j) EXPECT_DOUBLE_EQ(h[j], h[0]);
}

TEST(Hybrid, MicroGraphHalf) {
  expect_scores(score_hybrid(micro(), kU1, 0.5), {0.875, 0.875, 0.375});
}

TEST(Hybrid, EndpointsAreExact) {
  auto g = micro();
  EXPECT_EQ(score_hybrid(g, kU1, 1.0), score_probs(g, kU1));
  EXPECT_EQ(score_hybrid(g, kU1, 0.0), score_heats(g, kU1));
}

TEST(PreferentialDiffusion, MicroGraph) {
  expect_scores(score_pd(micro(), kU1, -1.0), {0.75, 0.5, 0.25});
  EXPECT_EQ(score_pd(micro(), kU1, 0.0), score_probs(micro(), kU1));
  EXPECT_DOUBLE_EQ(ScorerParams{}.epsilon, -0.85);
}

TEST(BiasedHeatConduction, MicroGraph) {
  expect_scores(score_bhc(micro(), kU1, 1.0), {1.0, 1.5, 0.5});
  EXPECT_EQ(score_bhc(micro(), kU1, 0.0), score_heats(micro(), kU1));
  EXPECT_DOUBLE_EQ(ScorerParams{}.gamma, 0.8);
}

TEST(Pliers, MicroGraph) {
  auto pl = score_pliers(micro(), kU1);
  expect_scores(pl, {0.75, 0.75, 0.25});
  EXPECT_LT(pl[1], score_probs(micro(), kU1)[1]);
}

TEST(Pliers, EqualsProbsOnCompleteGraph) {
  auto g = complete(5, 7);
  for (UserIndex t = 0; t < 5; ++t) expect_scores(score_pliers(g, t), score_probs(g, t).scores, 1e-14);
}

TEST(Scorers, MatchBruteForceOnRandomGraphs) {
  const ScorerParams params{0.3, -0.85, 0.8};
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const auto edges = oracle::random_edges(seed);
    const auto g = build_graph(edges);
    const auto d = oracle::dense_from_edges(g, edges);
    Scorer scorer(g);
    for (UserIndex t = 0; t < g.num_users(); ++t) {
      const auto want = oracle::diffusion(d, t);
      expect_scores(scorer.probs(t), want.probs, 1e-10);
      expect_scores(scorer.heats(t), want.heats, 1e-10);
      expect_scores(scorer.pliers(t), want.pliers, 1e-10);
      expect_scores(scorer.hybrid(t, params.lambda), oracle::hybrid(want, params.lambda), 1e-10);
      expect_scores(scorer.pd(t, params.epsilon), oracle::degree_scaled(d, want.probs, params.epsilon),
                    1e-10);
      expect_scores(scorer.bhc(t, params.gamma), oracle::degree_scaled(d, want.heats, params.gamma),
                    1e-10);
    }
  }
}

TEST(Scorers, PliersDominatedByProbs) {
  for (std::uint64_t seed = 30; seed < 50; ++seed) {
    const auto g = build_graph(oracle::random_edges(seed));
    Scorer scorer(g);
    for (UserIndex t = 0; t < g.num_users(); ++t) {
      const auto p = scorer.probs(t);
      const auto pl = scorer.pliers(t);
      for (std::size_t j = 0; j < p.size(); ++j) EXPECT_LE(pl[j], p[j] + 1e-15);
    }
  }
}

// Every owned item injects one unit, so the scores sum to k(u_t).
TEST(Scorers, ProbsConservesInjectedResource) {
  for (std::uint64_t seed = 50; seed < 70; ++seed) {
    const auto g = build_graph(oracle::random_edges(seed));
    Scorer scorer(g);
    for (UserIndex t = 0; t < g.num_users(); ++t) {
      const auto p = scorer.probs(t);
      const double sum = std::accumulate(p.scores.begin(), p.scores.end(), 0.0);
      EXPECT_NEAR(sum, static_cast<double>(g.user_degree(t)), 1e-9);
    }
  }
}

TEST(Scorers, NonNegativeAndZeroOutsideTwoHops) {
  const auto g = build_graph(oracle::random_edges(77));
  Scorer scorer(g);
  for (UserIndex t = 0; t < g.num_users(); ++t) {
    std::vector<bool> reach(g.num_items(), false);
    for (ItemIndex s : g.items_of(t)) {
      for (UserIndex l : g.users_of(s)) {
        for (ItemIndex j : g.items_of(l)) reach[j] = true;
      }
    }
    for (Algorithm a : kAllAlgorithms) {
      const auto v = scorer.score(a, t);
      for (std::size_t j = 0; j < v.size(); ++j) {
        EXPECT_TRUE(std::isfinite(v[j]));
        EXPECT_GE(v[j], 0.0);
        if (!reach[j]) {
          EXPECT_EQ(v[j], 0.0);
        }
      }
    }
  }
}

TEST(Scorers, ItemRelabelingPermutesScores) {
  const auto edges = oracle::random_edges(91);
  const auto g = build_graph(edges);
  // Reverse item ids; the graph's item index order reverses with them.
  std::vector<Edge> flipped;
  const ExternalId top = g.item_ids().back();
  for (const auto& e : edges) flipped.push_back({e.user, top - e.item});
  const auto h = build_graph(flipped);
  for (Algorithm a : kAllAlgorithms) {
    for (UserIndex t = 0; t < g.num_users(); ++t) {
      const auto x = Scorer(g).score(a, t);
      const auto y = Scorer(h).score(a, t);
      for (ItemIndex j = 0; j < g.num_items(); ++j) {
        const ItemIndex mapped = *h.find_item(top - g.item_id(j));
        EXPECT_NEAR(x[j], y[mapped], 1e-12);
      }
    }
  }
}

TEST(Recommend, MicroGraphTopOne) {
  auto list = recommend(micro(), kU1, Algorithm::probs, {}, 1);
  ASSERT_EQ(list.size(), 1u);
  EXPECT_EQ(list.entries[0].item, 2u);  // i3
  EXPECT_DOUBLE_EQ(list.entries[0].score, 0.25);
}

TEST(Recommend, ShortListWithoutPadding) {
  auto list = recommend(micro(), kU1, "pliers", {}, 10);
  EXPECT_EQ(list.size(), 1u);
}

TEST(Recommend, TiesGoToLowerIndex) {
  // u0 holds i0; u1 holds i0,i1,i2: i1 and i2 tie for u0.
  auto g = build_graph({{0, 0}, {1, 0}, {1, 1}, {1, 2}});
  auto list = recommend(g, 0, Algorithm::probs, {}, 2);
  ASSERT_EQ(list.size(), 2u);
  EXPECT_EQ(list.entries[0].item, 1u);
  EXPECT_EQ(list.entries[1].item, 2u);
  EXPECT_EQ(list.entries[0].score, list.entries[1].score);
}

TEST(Recommend, Errors) {
  EXPECT_THROW(recommend(micro(), kU1, Algorithm::probs, {}, 0), ConfigError);
  EXPECT_THROW(recommend(micro(), kU1, "slope-one", {}, 3), ConfigError);
  EXPECT_THROW(recommend(micro(), 9, Algorithm::probs, {}, 3), GraphError);
}

TEST(Recommend, ListsAreOrderedNovelAndPositive) {
  const auto g = build_graph(oracle::random_edges(123));
  Scorer scorer(g);
  for (Algorithm a : kAllAlgorithms) {
    for (UserIndex t = 0; t < g.num_users(); ++t) {
      auto list = scorer.recommend(t, a, {}, 15);
      for (std::size_t k = 0; k < list.size(); ++k) {
        EXPECT_GT(list.entries[k].score, 0.0);
        EXPECT_FALSE(g.has_edge(t, list.entries[k].item));
        if (k > 0) {
          const auto& prev = list.entries[k - 1];
          const auto& cur = list.entries[k];
          EXPECT_TRUE(prev.score > cur.score || (prev.score == cur.score && prev.item < cur.item));
        }
      }
    }
  }
}

TEST(Recommend, ParallelMatchesSequential) {
  const auto g = build_graph(oracle::random_edges(5));
  std::vector<UserIndex> users(g.num_users());
  std::iota(users.begin(), users.end(), 0);
  for (Algorithm a : kAllAlgorithms) {
    EXPECT_EQ(recommend_all(g, users, a, {}, 10, 1), recommend_all(g, users, a, {}, 10, 4));
  }
}

TEST(ScorerParams, Validation) {
  EXPECT_NO_THROW(ScorerParams{}.validate());
  EXPECT_THROW((ScorerParams{1.5, -0.85, 0.8}.validate()), ConfigError);
  EXPECT_THROW((ScorerParams{0.5, NAN, 0.8}.validate()), ConfigError);
  EXPECT_THROW((ScorerParams{0.5, -0.85, INFINITY}.validate()), ConfigError);
}

TEST(Algorithm, NamesRoundTrip) {
  for (Algorithm a : kAllAlgorithms) EXPECT_EQ(parse_algorithm(to_string(a)), a);
}

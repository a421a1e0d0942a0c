#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "pliers/dataio.hpp"

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(PLIERS_CLI_PATH) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string data(const char* name) { return std::string(PLIERS_TEST_DATA) + "/" + name; }

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "pliers_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(Cli, StatsOnMicroGraph) {
  auto r = run("stats -i " + data("micro.tsv"));
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("users\t2\n"), std::string::npos);
  EXPECT_NE(r.out.find("items\t3\n"), std::string::npos);
  EXPECT_NE(r.out.find("links\t4\n"), std::string::npos);
}

TEST(Cli, RecommendTopOne) {
  auto r = run("recommend -i " + data("micro.tsv") + " --user 1 --algorithm probs --top 1");
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_EQ(r.out, "3\t0.250000\n");
}

TEST(Cli, UnknownUserNamesTheId) {
  auto r = run("recommend -i " + data("micro.tsv") + " --user 9 --algorithm probs");
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.out.find("9"), std::string::npos);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run("recommend -i " + data("micro.tsv") + " --user 1 --top 0").status, 2);
  EXPECT_EQ(run("recommend -i " + data("micro.tsv") + " --user 1 --algorithm nope").status, 2);
  EXPECT_EQ(run("eval-linkpred -i " + data("micro.tsv") + " -o x.csv --seed 1 --seeds 1,2").status, 2);
  EXPECT_EQ(run("eval-linkpred -i " + data("micro.tsv") + " -o x.csv --fraction 1.5").status, 2);
  EXPECT_EQ(run("bogus").status, 2);
}

TEST(Cli, MissingInputIsRuntimeError) {
  EXPECT_EQ(run("stats -i /nonexistent/edges.tsv").status, 1);
}

TEST(Cli, LinkPredictionCsvHasOneBlockPerAlgorithm) {
  const auto out = scratch("two.csv");
  auto r = run("eval-linkpred -i " + data("powerlaw_small.tsv") +
               " --algorithms pliers,probs --l-sweep 1..3 --threads 1 -o " + out.string());
  ASSERT_EQ(r.status, 0) << r.out;
  const auto text = pliers::detail::read_text(out.string());
  EXPECT_EQ(text.rfind("algorithm,L,R,P,N\npliers,1,", 0), 0u);
  EXPECT_NE(text.find("\nprobs,3,"), std::string::npos);
  EXPECT_NE(text.find("\nreference_popularity,,,,"), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(out.string() + ".meta.json"));
}

TEST(Cli, ThreadCountDoesNotChangeReports) {
  const auto a = scratch("t1.json"), b = scratch("t4.json");
  const std::string common = "eval-personalization -i " + data("powerlaw_small.tsv") +
                             " --output-format json --seed 5 -o ";
  ASSERT_EQ(run(common + a.string() + " --threads 1").status, 0);
  ASSERT_EQ(run(common + b.string() + " --threads 4").status, 0);
  EXPECT_EQ(pliers::detail::read_text(a.string()), pliers::detail::read_text(b.string()));
}

TEST(Cli, GeneratedFixtureMatchesItsManifest) {
  const auto edges = scratch("gen.tsv"), manifest = scratch("gen.json");
  ASSERT_EQ(run("gen-fixture --users 50 --items 400 --links 300 --seed 3 -o " + edges.string() +
                " --manifest " + manifest.string())
                .status,
            0);
  auto r = run("stats --output-format json -i " + edges.string());
  ASSERT_EQ(r.status, 0) << r.out;
  const auto expected = nlohmann::json::parse(pliers::detail::read_text(manifest.string()));
  auto got = nlohmann::json::parse(r.out);
  EXPECT_EQ(got.at("collapsed_duplicates"), 0);
  got.erase("collapsed_duplicates");
  EXPECT_EQ(got, expected.at("stats"));
}

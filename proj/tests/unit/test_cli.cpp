#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "iotnames/corpus.hpp"
#include "iotnames/csv.hpp"
#include "iotnames_cli/cli.hpp"
#include "iotnames_cli/pipeline_config.hpp"
#include "support/fixtures.hpp"
#include "support/stub_resolver.hpp"

namespace iotnames {
namespace {

namespace fs = std::filesystem;
using test::TempDir;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

using Snapshot = std::map<std::string, std::string>;

Snapshot snapshot(const fs::path& root) {
  Snapshot files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file()) files[fs::relative(entry.path(), root).string()] = test::read_file(entry.path());
  }
  return files;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

void write_fixture_list(const fs::path& path, FixtureKind kind, std::size_t n, std::uint64_t seed) {
  std::ofstream out(path);
  write_list(out, generate_fixtures(kind, n, seed));
}

/// Two fixture lists and a small config beside them.
struct Workspace {
  TempDir dir{"cli"};

  explicit Workspace(const std::string& extra = "eval.mode = holdout\n", bool with_seed = true) {
    write_fixture_list(dir / "iot.txt", FixtureKind::IotLike, 300, 1);
    write_fixture_list(dir / "top.txt", FixtureKind::ToplistLike, 300, 2);
    std::string conf = "# small run\nlists.positive = iot.txt\nlists.negative = top.txt\nselect.n = 250\n"
                       "model.algorithm = rf\nmodel.trees = 20\n";
    if (with_seed) conf += "seed = 11\n";
    test::write_file(dir / "run.conf", conf + extra);
  }

  std::string path(const std::string& name) const { return (dir / name).string(); }
};

TEST(Cli, HelpExitsZero) {
  const auto r = cli({"--help"});
  EXPECT_EQ(r.code, cli::kExitOk);
  EXPECT_NE(r.out.find("pipeline"), std::string::npos);
}

TEST(Cli, UnknownSubcommandIsUsageError) {
  const auto r = cli({"frobnicate"});
  EXPECT_EQ(r.code, cli::kExitInput);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
}

TEST(Cli, UnknownFlagIsUsageError) {
  Workspace ws;
  EXPECT_EQ(cli({"stats", "--input", ws.path("iot.txt"), "--bogus"}).code, cli::kExitInput);
}

TEST(Cli, MissingSubcommandIsUsageError) { EXPECT_EQ(cli({"--quiet"}).code, cli::kExitInput); }

TEST(Cli, MissingListNamesThePath) {
  Workspace ws;
  test::write_file(ws.dir / "broken.conf", "seed = 1\nlists.positive = iot.txt\nlists.negative = absent.txt\n");
  const auto r = cli({"pipeline", "--config", ws.path("broken.conf"), "--output-dir", ws.path("out")});
  EXPECT_EQ(r.code, cli::kExitInput);
  EXPECT_NE(r.err.find((ws.dir / "absent.txt").string()), std::string::npos) << r.err;
}

TEST(Cli, MissingInputFileIsInputError) {
  Workspace ws;
  const auto r = cli({"stats", "--input", ws.path("nothing.txt"), "--output-dir", ws.path("out")});
  EXPECT_EQ(r.code, cli::kExitInput);
  EXPECT_NE(r.err.find("nothing.txt"), std::string::npos);
}

TEST(Cli, PipelineRequiresSeed) {
  Workspace ws("", false);
  const auto r = cli({"pipeline", "--config", ws.path("run.conf"), "--output-dir", ws.path("out")});
  EXPECT_EQ(r.code, cli::kExitInput);
  EXPECT_NE(r.err.find("seed"), std::string::npos);
  EXPECT_EQ(cli({"pipeline", "--config", ws.path("run.conf"), "--seed", "3", "--output-dir", ws.path("out"),
                 "--quiet"})
                .code,
            cli::kExitOk);
}

TEST(Cli, UnknownConfigKeyRejected) {
  Workspace ws;
  test::write_file(ws.dir / "bad.conf", "seed = 1\nlists.positive = iot.txt\nlists.negative = top.txt\nembed.size = 3\n");
  const auto r = cli({"pipeline", "--config", ws.path("bad.conf"), "--output-dir", ws.path("out")});
  EXPECT_EQ(r.code, cli::kExitInput);
  EXPECT_NE(r.err.find("embed.size"), std::string::npos);
}

TEST(Cli, UnwritableOutputDirIsRuntimeError) {
  Workspace ws;
  test::write_file(ws.dir / "plain", "x");
  const auto r = cli({"fixtures", "--kind", "iot-like", "--n", "5", "--output-dir", ws.path("plain/sub")});
  EXPECT_EQ(r.code, cli::kExitRuntime);
}

TEST(Cli, OversizedSelectionIsInputError) {
  Workspace ws;
  const auto r = cli({"prepare", "--positive", ws.path("iot.txt"), "--negative", ws.path("top.txt"), "--n", "5000",
                      "--output-dir", ws.path("out")});
  EXPECT_EQ(r.code, cli::kExitInput);
}

TEST(Cli, CvWritesOneRowPerFoldPlusMeanAndStd) {
  Workspace ws;
  const auto out = ws.path("out");
  ASSERT_EQ(cli({"prepare", "--positive", ws.path("iot.txt"), "--negative", ws.path("top.txt"), "--n", "250",
                 "--seed", "5", "--output-dir", out, "--quiet"})
                .code,
            0);
  ASSERT_EQ(cli({"embed", "--dataset", ws.path("out/dataset.csv"), "--seed", "5", "--output-dir", out, "--quiet"}).code,
            0);
  const auto r = cli({"cv", "--dataset", ws.path("out/dataset.csv"), "--embedding", ws.path("out/embedding.txt"),
                      "--k", "5", "--model", "dt", "--seed", "5", "--output-dir", out, "--quiet"});
  ASSERT_EQ(r.code, 0) << r.err;

  const auto rows = lines_of(test::read_file(ws.dir / "out/cv.csv"));
  ASSERT_EQ(rows.size(), 1u + 5u + 2u);
  const auto header = csv::split_record(rows[0]);
  EXPECT_EQ(header[0], "fold");
  for (std::size_t i = 1; i <= 5; ++i) {
    const auto cells = csv::split_record(rows[i]);
    ASSERT_EQ(cells.size(), header.size());
    EXPECT_EQ(cells[0], std::to_string(i));
    // tp+tn+fp+fn is the fold size: 500 names over 5 folds.
    std::size_t total = 0;
    for (std::size_t c = header.size() - 4; c < header.size(); ++c) total += std::stoul(cells[c]);
    EXPECT_EQ(total, 100u);
  }
  EXPECT_EQ(csv::split_record(rows[6])[0], "mean");
  EXPECT_EQ(csv::split_record(rows[7])[0], "std");

  // Mean row recomputed from the fold rows.
  double sum = 0;
  for (std::size_t i = 1; i <= 5; ++i) sum += std::stod(csv::split_record(rows[i])[2]);
  EXPECT_NEAR(std::stod(csv::split_record(rows[6])[2]), sum / 5, 1e-12);

  const auto roc = lines_of(test::read_file(ws.dir / "out/cv_roc.csv"));
  EXPECT_EQ(roc.front(), "fold,fpr,tpr");
}

TEST(Cli, OutputStaysInsideOutputDir) {
  Workspace ws;
  const auto before = snapshot(ws.dir.path());
  const auto out = ws.path("out");
  const std::vector<std::vector<std::string>> runs = {
      {"fixtures", "--kind", "mixed", "--n", "50", "--seed", "1"},
      {"sanitize", "--input", ws.path("iot.txt"), "--accepted", "ok.txt"},
      {"stats", "--input", ws.path("iot.txt")},
      {"pipeline", "--config", ws.path("run.conf")},
      {"extract", "--pcap", (test::data_dir() / "three_responses.pcap").string(), "--devices",
       (test::data_dir() / "three_responses_devices.csv").string()},
  };
  for (auto args : runs) {
    args.insert(args.end(), {"--output-dir", out, "--quiet"});
    const auto r = cli(args);
    EXPECT_EQ(r.code, 0) << args[0] << ": " << r.err;
  }
  auto after = snapshot(ws.dir.path());
  for (auto it = after.begin(); it != after.end();) {
    it = it->first.rfind("out/", 0) == 0 ? after.erase(it) : std::next(it);
  }
  EXPECT_EQ(after, before);
  EXPECT_TRUE(fs::exists(ws.dir / "out/metrics.csv"));

  // Names that would climb out are refused before anything is written.
  for (const std::string escape : {std::string("../escaped.txt"), (ws.dir / "abs.txt").string()}) {
    const auto r = cli({"fixtures", "--kind", "mixed", "--n", "5", "--output", escape, "--output-dir", out});
    EXPECT_EQ(r.code, cli::kExitInput) << escape;
  }
  EXPECT_FALSE(fs::exists(ws.dir / "escaped.txt"));
  EXPECT_FALSE(fs::exists(ws.dir / "abs.txt"));
}

TEST(Cli, QuietLeavesResultsUnchanged) {
  Workspace ws;
  const auto loud = cli({"pipeline", "--config", ws.path("run.conf"), "--output-dir", ws.path("loud")});
  const auto quiet = cli({"pipeline", "--config", ws.path("run.conf"), "--output-dir", ws.path("quiet"), "--quiet"});
  ASSERT_EQ(loud.code, 0) << loud.err;
  ASSERT_EQ(quiet.code, 0) << quiet.err;
  EXPECT_FALSE(loud.err.empty());
  EXPECT_TRUE(quiet.err.empty());
  EXPECT_EQ(snapshot(ws.dir / "loud"), snapshot(ws.dir / "quiet"));
}

TEST(Cli, PipelineIsDeterministic) {
  for (const std::string mode : {"holdout", "cv"}) {
    Workspace ws("eval.mode = " + mode + "\neval.k = 3\n");
    ASSERT_EQ(cli({"pipeline", "--config", ws.path("run.conf"), "--output-dir", ws.path("a"), "--quiet"}).code, 0);
    ASSERT_EQ(cli({"pipeline", "--config", ws.path("run.conf"), "--output-dir", ws.path("b"), "--quiet"}).code, 0);
    const auto a = snapshot(ws.dir / "a");
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, snapshot(ws.dir / "b")) << mode;
  }
}

TEST(Cli, SeedFlagOverridesConfigSeed) {
  Workspace ws;
  ASSERT_EQ(cli({"pipeline", "--config", ws.path("run.conf"), "--output-dir", ws.path("a"), "--quiet"}).code, 0);
  ASSERT_EQ(cli({"pipeline", "--config", ws.path("run.conf"), "--seed", "12", "--output-dir", ws.path("b"), "--quiet"})
                .code,
            0);
  EXPECT_NE(test::read_file(ws.dir / "a/embedding.txt"), test::read_file(ws.dir / "b/embedding.txt"));
}

TEST(Cli, StagesReproducePipeline) {
  Workspace ws;
  const auto seed = "11";
  ASSERT_EQ(cli({"pipeline", "--config", ws.path("run.conf"), "--output-dir", ws.path("p"), "--quiet"}).code, 0);
  const auto out = ws.path("s");
  const auto conf = ws.path("run.conf");
  ASSERT_EQ(cli({"prepare", "--positive", ws.path("iot.txt"), "--negative", ws.path("top.txt"), "--n", "250",
                 "--seed", seed, "--output-dir", out, "--quiet"})
                .code,
            0);
  ASSERT_EQ(cli({"embed", "--dataset", ws.path("s/dataset.csv"), "--seed", seed, "--output-dir", out, "--quiet"}).code,
            0);
  ASSERT_EQ(cli({"train", "--dataset", ws.path("s/dataset.csv"), "--embedding", ws.path("s/embedding.txt"), "--config",
                 conf, "--output-dir", out, "--quiet"})
                .code,
            0);
  ASSERT_EQ(cli({"evaluate", "--dataset", ws.path("s/dataset.csv"), "--embedding", ws.path("s/embedding.txt"),
                 "--model-file", ws.path("s/model.txt"), "--config", conf, "--output-dir", out, "--quiet"})
                .code,
            0);
  for (const auto* name : {"dataset.csv", "embedding.txt", "model.txt", "metrics.csv", "roc.csv"}) {
    EXPECT_EQ(test::read_file(ws.dir / "p" / name), test::read_file(ws.dir / "s" / name)) << name;
  }
}

TEST(Cli, SanitizeSplitsAcceptedAndDiscarded) {
  TempDir dir("cli-sanitize");
  test::write_file(dir / "in.txt", "# comment\nExample.COM.\nbad..name\nsingle\nexample.com\n-x.org\n");
  const auto r = cli({"sanitize", "--input", (dir / "in.txt").string(), "--output-dir", (dir / "out").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "example.com\n");
  EXPECT_EQ(test::read_file(dir / "out/discarded.csv"),
            "raw,rule\nbad..name,ConsecutiveDots\nsingle,SingleLabel\n-x.org,HyphenEdge\n");
}

TEST(Cli, ProbeReportsThreeWayVerdicts) {
  test::StubResolver stub;
  stub.script("up.example.com", {test::StubAction::reply(0, 1)});
  stub.script("gone.example.com", {test::StubAction::reply(3)});
  stub.script("quiet.example.com", {test::StubAction::drop()});
  TempDir dir("cli-probe");
  test::write_file(dir / "names.txt", "up.example.com\ngone.example.com\nquiet.example.com\n");
  const auto ep = stub.endpoint();
  const auto r = cli({"probe", "--input", (dir / "names.txt").string(), "--server",
                      ep.host + ":" + std::to_string(ep.port), "--timeout-ms", "100", "--retries", "1",
                      "--output-dir", (dir / "out").string(), "--quiet"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(test::read_file(dir / "out/probe.csv"),
            "name,status,rcode,attempts\n"
            "up.example.com,resolvable,0,1\n"
            "gone.example.com,unresolvable,3,1\n"
            "quiet.example.com,indeterminate,,2\n");
}

TEST(Cli, ExtractWritesOneListPerClass) {
  TempDir dir("cli-extract");
  const auto r = cli({"extract", "--pcap", (test::data_dir() / "three_responses.pcap").string(), "--devices",
                      (test::data_dir() / "three_responses_devices.csv").string(), "--output-dir",
                      dir.path().string(), "--quiet"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(test::read_file(dir / "iot-m2m.txt"), "cam.example.com\n");
  EXPECT_EQ(test::read_file(dir / "other.txt"), "");
}

TEST(PipelineConfig, ParsesKeysAndResolvesPaths) {
  const auto c = cli::parse_pipeline_config(
      "seed = 9  # trailing comment\nlists.positive = a.txt\nlists.negative = b.txt, /abs/c.txt\n"
      "select.mode = mix\nembed.window = 2\nmodel.algorithm = knn\nmodel.neighbors = 3\neval.mode = cv\neval.k = 4\n",
      "/base");
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.positive, fs::path("/base/a.txt"));
  ASSERT_EQ(c.negatives.size(), 2u);
  EXPECT_EQ(c.negatives[1], fs::path("/abs/c.txt"));
  EXPECT_EQ(c.selection, cli::SelectionMode::Mix);
  EXPECT_EQ(c.embedding.window, 2u);
  EXPECT_EQ(c.model.algorithm, Algorithm::KNN);
  EXPECT_EQ(c.model.knn.k, 3u);
  EXPECT_EQ(c.eval, cli::EvalMode::Cv);
  EXPECT_EQ(c.k, 4u);
}

TEST(PipelineConfig, RejectsMalformedInput) {
  const std::string lists = "lists.positive = a\nlists.negative = b\n";
  for (const std::string bad : {"seed 9\n", "seed = x\n", "seed = 1\nseed = 2\n", "select.mode = best\n",
                                "eval.train_fraction = 1.5\n", "eval.k = 1\n", "nope = 1\n", "embed.dim = 0\n"}) {
    EXPECT_THROW(cli::parse_pipeline_config(lists + bad, "/"), InputError) << bad;
  }
  EXPECT_THROW(cli::parse_pipeline_config("lists.positive = a\n", "/"), InputError);
}

TEST(PipelineConfig, EveryKeyIsDocumented) {
  for (const auto& [key, help] : cli::pipeline_config_keys()) EXPECT_FALSE(help.empty()) << key;
  EXPECT_TRUE(cli::pipeline_config_keys().contains("embed.train_only"));
}

TEST(PipelineConfig, StageSeedsAreDistinct) {
  const auto s = cli::stage_seeds(7);
  const std::set<std::uint64_t> all = {s.dataset, s.selection, s.embedding, s.split, s.folds, s.model};
  EXPECT_EQ(all.size(), 6u);
}

}  // namespace
}  // namespace iotnames

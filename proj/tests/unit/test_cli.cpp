#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>

#include "opinion/labels.hpp"
#include "proc.hpp"
#include "synth.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kExe = OPINIONKIT_EXE;
const fs::path kData = OPINION_DATA_DIR;
const fs::path kTestData = OPINION_TEST_DATA_DIR;

proc::Result kit(const std::vector<std::string>& args, const std::string& input = {}) {
  return proc::run(kExe, args, input);
}

std::size_t line_count(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

std::vector<std::string> entries(const fs::path& dir) {
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) out.push_back(e.path().filename().string());
  std::sort(out.begin(), out.end());
  return out;
}

void write_labels(const fs::path& p, std::size_t n, std::uint64_t seed) {
  std::ofstream out(p, std::ios::binary);
  opinion::write_labeled(out, synth::separable(n, seed));
}

}  // namespace

TEST(Cli, FilterFiveMessages) {
  synth::TempDir dir;
  const auto r = kit({"filter", "--in", (kTestData / "five_messages.jsonl").string(), "--query",
                      (kData / "queries/table2.json").string(), "--out",
                      (dir / "hits.jsonl").string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(line_count(synth::read_file(dir / "hits.jsonl")), 2u);
  EXPECT_NE(r.out.find("matched=2 unmatched=3"), std::string::npos) << r.out;
}

TEST(Cli, FilterWithoutRepostsDropsRetweet) {
  synth::TempDir dir;
  const auto r = kit({"filter", "--in", (kTestData / "five_messages.jsonl").string(), "--query",
                      (kData / "queries/table2.json").string(), "--out",
                      (dir / "hits.jsonl").string(), "--no-reposts"});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(line_count(synth::read_file(dir / "hits.jsonl")), 1u);
}

TEST(Cli, KappaPrintsHalf) {
  const auto r = kit({"kappa", "--a", (kTestData / "ann1.tsv").string(), "--b",
                      (kTestData / "ann2.tsv").string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "kappa=0.5");
}

TEST(Cli, HelpDocumentsEveryFlag) {
  const std::map<std::string, std::vector<std::string>> flags = {
      {"filter", {"--in", "--query", "--out", "--unmatched", "--out-format", "--stats", "--lang",
                  "--lang-heuristic", "--dedup", "--no-reposts", "--seed", "--log"}},
      {"expand-query", {"--in", "--query", "--rounds", "--min-count", "--top-k", "--accept",
                        "--interactive", "--out", "--query-out"}},
      {"sentiment", {"--in", "--lexicon", "--query", "--out", "--summary", "--series",
                     "--nonzero-only", "--tz", "--bucket"}},
      {"annotate-sample", {"--in", "--query", "--out", "--rate", "--n", "--seed"}},
      {"kappa", {"--a", "--b", "--out"}},
      {"train", {"--labels", "--out", "--dim", "--epochs", "--lr", "--minn", "--maxn",
                 "--hash-buckets", "--seed"}},
      {"cross-validate", {"--labels", "--folds", "--threads", "--out"}},
      {"grid-search", {"--labels", "--objective", "--dims", "--epochs", "--lrs", "--out",
                       "--model-out", "--threads"}},
      {"learning-curve", {"--labels", "--sizes", "--repeats", "--test-size", "--out"}},
      {"predict", {"--model", "--in", "--out"}},
      {"evaluate", {"--model", "--labels", "--out"}},
      {"timeseries", {"--in", "--scores", "--series", "--column", "--out", "--ma", "--centered", "--nonzero-only",
                      "--events", "--events-out", "--tz", "--bucket"}},
      {"stance-series", {"--in", "--out", "--tz", "--bucket"}},
      {"correlate", {"--a", "--b", "--column-a", "--column-b", "--out"}},
  };
  const auto root = kit({"--help"});
  EXPECT_EQ(root.exit_code, 0);
  for (const auto& [cmd, expected] : flags) {
    EXPECT_NE(root.out.find(cmd), std::string::npos) << cmd;
    const auto r = kit({cmd, "--help"});
    EXPECT_EQ(r.exit_code, 0) << cmd;
    for (const auto& f : expected) EXPECT_NE(r.out.find(f), std::string::npos) << cmd << " " << f;
  }
}

TEST(Cli, UsageErrorsExitOne) {
  synth::TempDir dir;
  EXPECT_EQ(kit({"filter", "--query", (kData / "queries/table2.json").string(), "--out",
                 (dir / "x").string()})
                .exit_code,
            1);
  EXPECT_EQ(kit({"filter", "--in", (dir / "missing.jsonl").string(), "--query",
                 (kData / "queries/table2.json").string(), "--out", (dir / "x").string()})
                .exit_code,
            1);
  EXPECT_EQ(kit({"no-such-command"}).exit_code, 1);
  EXPECT_EQ(kit({"timeseries", "--out", (dir / "x").string()}).exit_code, 1);
  EXPECT_TRUE(entries(dir.path()).empty());
}

TEST(Cli, DataErrorsExitTwoWithoutPartialOutput) {
  synth::TempDir dir;
  synth::write_file(dir / "bad.json", R"({"name":"bad","keywords":[],"regex":"(unclosed"})");
  synth::write_file(dir / "bad.tsv", "goed\t3.0\n");
  auto r = kit({"filter", "--in", (kTestData / "five_messages.jsonl").string(), "--query",
                (dir / "bad.json").string(), "--out", (dir / "out.jsonl").string()});
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_FALSE(r.err.empty());
  r = kit({"sentiment", "--in", (kTestData / "five_messages.jsonl").string(), "--lexicon",
           (dir / "bad.tsv").string(), "--out", (dir / "scores.csv").string()});
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("line 1"), std::string::npos) << r.err;
  EXPECT_EQ(entries(dir.path()), (std::vector<std::string>{"bad.json", "bad.tsv"}));
}

TEST(Cli, DegenerateTrainingSetExitsTwo) {
  synth::TempDir dir;
  synth::write_file(dir / "one.tsv", "other\ta\nother\tb\n");
  const auto r = kit({"train", "--labels", (dir / "one.tsv").string(), "--out",
                      (dir / "m.bin").string()});
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("degenerate"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "m.bin"));
}

TEST(Cli, OutputsAreByteDeterministic) {
  synth::TempDir dir;
  synth::write_jsonl(dir / "corpus.jsonl", 3000, 4, 600);
  write_labels(dir / "labels.tsv", 150, 3);
  const auto corpus = (dir / "corpus.jsonl").string();
  const auto query = (kData / "queries/table2.json").string();
  const auto lexicon = (kData / "lexicon/toy_nl.tsv").string();
  auto run_all = [&](const std::string& tag) {
    const auto p = [&](const std::string& name) { return (dir / (tag + name)).string(); };
    std::vector<std::vector<std::string>> cmds = {
        {"filter", "--in", corpus, "--query", query, "--out", p("hits.jsonl"), "--stats",
         p("stats.json")},
        {"sentiment", "--in", corpus, "--lexicon", lexicon, "--out", p("scores.csv"),
         "--summary", p("summary.json"), "--series", p("series.csv")},
        {"annotate-sample", "--in", corpus, "--query", query, "--rate", "0.1", "--out",
         p("sample.tsv")},
        {"train", "--labels", (dir / "labels.tsv").string(), "--dim", "16", "--epochs", "10",
         "--hash-buckets", "50000", "--out", p("model.bin")},
        {"predict", "--model", p("model.bin"), "--in", corpus, "--out", p("pred.csv")},
        {"stance-series", "--in", p("pred.csv"), "--bucket", "week", "--out", p("stance.csv")},
        {"cross-validate", "--labels", (dir / "labels.tsv").string(), "--dim", "8", "--epochs",
         "5", "--hash-buckets", "50000", "--folds", "5", "--threads", "3", "--out", p("cv.json")},
    };
    for (auto& c : cmds) {
      c.push_back("--seed");
      c.push_back("42");
      const auto r = kit(c);
      ASSERT_EQ(r.exit_code, 0) << c[0] << ": " << r.err;
    }
  };
  run_all("a_");
  run_all("b_");
  for (const std::string name : {"hits.jsonl", "stats.json", "scores.csv", "summary.json",
                                 "series.csv", "sample.tsv", "model.bin", "pred.csv",
                                 "stance.csv", "cv.json"}) {
    const auto a = synth::read_file(dir / ("a_" + name));
    EXPECT_FALSE(a.empty()) << name;
    EXPECT_EQ(a, synth::read_file(dir / ("b_" + name))) << name;
  }
}

TEST(Cli, PipelineEqualsOneShot) {
  synth::TempDir dir;
  synth::write_jsonl(dir / "corpus.jsonl", 5000, 3, 300);
  const auto corpus = (dir / "corpus.jsonl").string();
  const auto query = (kData / "queries/table2.json").string();
  const auto lexicon = (kData / "lexicon/toy_nl.tsv").string();
  for (const std::string bucket : {"hour", "day", "week"}) {
    auto ok = [](const proc::Result& r) {
      ASSERT_EQ(r.exit_code, 0) << r.err;
    };
    ok(kit({"filter", "--in", corpus, "--query", query, "--out", (dir / "hits.jsonl").string()}));
    ok(kit({"sentiment", "--in", (dir / "hits.jsonl").string(), "--lexicon", lexicon, "--out",
            (dir / "scores.csv").string()}));
    ok(kit({"timeseries", "--scores", (dir / "scores.csv").string(), "--bucket", bucket, "--out",
            (dir / "three_step.csv").string()}));
    ok(kit({"sentiment", "--in", corpus, "--query", query, "--lexicon", lexicon, "--bucket",
            bucket, "--series", (dir / "one_shot.csv").string()}));
    const auto three = synth::read_file(dir / "three_step.csv");
    EXPECT_GT(line_count(three), 1u);
    EXPECT_EQ(three, synth::read_file(dir / "one_shot.csv")) << bucket;
  }
}

TEST(Cli, TimeseriesGapFillAndEvents) {
  synth::TempDir dir;
  const auto r = kit({"timeseries", "--in", (kTestData / "five_messages.jsonl").string(),
                      "--out", (dir / "freq.csv").string(), "--events",
                      (kData / "events/press_conferences.json").string(), "--events-out",
                      (dir / "events.json").string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(synth::read_file(dir / "freq.csv"),
            "bucket,n\n2020-03-12,2\n2020-03-13,1\n2020-03-14,0\n2020-03-15,2\n");
  const auto events = synth::read_file(dir / "events.json");
  EXPECT_NE(events.find("\"markers\""), std::string::npos);
  EXPECT_NE(events.find("\"out_of_range\""), std::string::npos);
}

TEST(Cli, TimeseriesSmoothsExternalSeries) {
  synth::TempDir dir;
  synth::write_file(dir / "ext.csv", "date,value\n2020-03-01,1\n2020-03-02,2\n2020-03-03,6\n");
  const auto r = kit({"timeseries", "--series", (dir / "ext.csv").string(), "--ma", "3", "--out",
                      (dir / "ma.csv").string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(synth::read_file(dir / "ma.csv"),
            "bucket,value,n,partial\n2020-03-01,1,1,1\n2020-03-02,1.5,2,1\n2020-03-03,3,3,0\n");
}

TEST(Cli, CorrelatePrintsR) {
  synth::TempDir dir;
  synth::write_file(dir / "a.csv", "bucket,mean,n\n2020-03-01,1,1\n2020-03-02,2,1\n2020-03-03,3,1\n");
  synth::write_file(dir / "b.csv", "date,value\n2020-03-01,2\n2020-03-02,4\n2020-03-03,7\n");
  const auto r = kit({"correlate", "--a", (dir / "a.csv").string(), "--b",
                      (dir / "b.csv").string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  double value = 0;
  unsigned overlap = 0;
  ASSERT_EQ(std::sscanf(r.out.c_str(), "r=%lf n_overlap=%u", &value, &overlap), 2) << r.out;
  EXPECT_NEAR(value, 0.99339926779878, 1e-12);
  EXPECT_EQ(overlap, 3u);
}

TEST(Cli, GridSearchExample) {
  synth::TempDir dir;
  write_labels(dir / "labels.tsv", 120, 7);
  const auto r = kit({"grid-search", "--labels", (dir / "labels.tsv").string(), "--objective",
                      "accuracy", "--dims", "8,16", "--epochs", "1,20", "--lrs", "0.5",
                      "--hash-buckets", "50000", "--out", (dir / "grid.json").string(),
                      "--model-out", (dir / "best.bin").string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto report = nlohmann::json::parse(synth::read_file(dir / "grid.json"));
  EXPECT_EQ(report["objective"], "accuracy");
  EXPECT_EQ(report["best"]["epochs"], 20);
  EXPECT_EQ(report["best"]["dim"], 8);
  EXPECT_EQ(report["grid"].size(), 4u);
  EXPECT_TRUE(fs::exists(dir / "best.bin"));
  const auto eval = kit({"evaluate", "--model", (dir / "best.bin").string(), "--labels",
                         (dir / "labels.tsv").string()});
  EXPECT_EQ(eval.exit_code, 0) << eval.err;
}

TEST(Cli, ExpandQueryNonInteractiveAccept) {
  synth::TempDir dir;
  synth::write_jsonl(dir / "corpus.jsonl", 2000, 5);
  const auto r = kit({"expand-query", "--in", (dir / "corpus.jsonl").string(), "--query",
                      (kData / "queries/table2.json").string(), "--rounds", "1", "--accept", "",
                      "--out", (dir / "report.json").string(), "--query-out",
                      (dir / "q.json").string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "report.json"));
  EXPECT_TRUE(fs::exists(dir / "q.json"));
}

TEST(Cli, RunLogIsJsonLines) {
  synth::TempDir dir;
  const auto r = kit({"filter", "--in", (kTestData / "five_messages.jsonl").string(), "--query",
                      (kData / "queries/table2.json").string(), "--out",
                      (dir / "hits.jsonl").string(), "--log"});
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_NE(r.err.find("\"event\":\"start\""), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("\"seed\":42"), std::string::npos);
  EXPECT_NE(r.err.find("\"event\":\"done\""), std::string::npos);
}

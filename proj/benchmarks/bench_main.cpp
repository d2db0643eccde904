#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "opinion/classifier.hpp"
#include "opinion/polarity.hpp"
#include "opinion/query.hpp"
#include "opinion/rng.hpp"
#include "opinion/text.hpp"

using namespace opinion;

namespace {

const std::filesystem::path kData = OPINION_DATA_DIR;

const std::vector<std::string> kWords = {
    "vandaag", "morgen", "mensen", "straat", "winkel", "school", "werk",  "thuis",
    "fiets",   "regen",  "zon",    "koffie", "goed",   "slecht", "mooi",  "bang",
    "de",      "het",    "een",    "en",     "steun",  "onzin",  "weer",  "trein"};

// Roughly 100-character messages; every tenth mentions a topic keyword.
std::vector<std::string> messages(std::size_t n) {
  Rng rng(1);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::string text;
    while (text.size() < 100) {
      if (!text.empty()) text += ' ';
      text += kWords[rng.below(kWords.size())];
    }
    if (i % 10 == 0) text += " corona";
    out.push_back(std::move(text));
  }
  return out;
}

void BM_KeywordFilter(benchmark::State& state) {
  const auto query = TopicQuery::load(kData / "queries/table2.json");
  const auto msgs = messages(10000);
  for (auto _ : state) {
    std::size_t hits = 0;
    for (const auto& m : msgs) hits += query.matches(m);
    benchmark::DoNotOptimize(hits);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * msgs.size()));
}
BENCHMARK(BM_KeywordFilter);

void BM_RegexFilter(benchmark::State& state) {
  const auto query = TopicQuery::load(kData / "queries/socialdistancing.json");
  const auto msgs = messages(10000);
  for (auto _ : state) {
    std::size_t hits = 0;
    for (const auto& m : msgs) hits += query.matches(m);
    benchmark::DoNotOptimize(hits);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * msgs.size()));
}
BENCHMARK(BM_RegexFilter);

void BM_Tokenize(benchmark::State& state) {
  const auto msgs = messages(10000);
  std::vector<std::string> toks;
  for (auto _ : state) {
    for (const auto& m : msgs) {
      text::tokenize(m, toks);
      benchmark::DoNotOptimize(toks.data());
    }
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * msgs.size()));
}
BENCHMARK(BM_Tokenize);

void BM_PolarityScore(benchmark::State& state) {
  const auto lexicon = PolarityLexicon::load(kData / "lexicon/toy_nl.tsv");
  const auto msgs = messages(10000);
  for (auto _ : state) {
    double total = 0;
    for (const auto& m : msgs) total += score(lexicon, m).value;
    benchmark::DoNotOptimize(total);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * msgs.size()));
}
BENCHMARK(BM_PolarityScore);

std::vector<LabeledExample> labeled(std::size_t n) {
  const auto msgs = messages(n);
  std::vector<LabeledExample> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back({msgs[i] + (i % 3 == 0 ? " steun" : i % 3 == 1 ? " onzin" : " weer"),
                   kLabelOrder[i % 3]});
  return out;
}

void BM_TrainEpoch(benchmark::State& state) {
  const auto data = labeled(1000);
  Hyperparams hp;
  hp.dim = static_cast<int>(state.range(0));
  hp.epochs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(train(data, hp).stored_rows());
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * data.size()));
}
BENCHMARK(BM_TrainEpoch)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_Predict(benchmark::State& state) {
  const auto data = labeled(1000);
  Hyperparams hp;
  hp.epochs = 5;
  const auto model = train(data, hp);
  for (auto _ : state) {
    for (const auto& ex : data) benchmark::DoNotOptimize(model.predict(ex.text).label);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * data.size()));
}
BENCHMARK(BM_Predict)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

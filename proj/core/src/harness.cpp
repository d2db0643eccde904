#include "opinion/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <nlohmann/json.hpp>
#include <numeric>
#include <sstream>
#include <thread>

#include "opinion/error.hpp"
#include "opinion/format.hpp"
#include "opinion/rng.hpp"

namespace opinion {

using nlohmann::ordered_json;

namespace {

// Runs body(i) for i in [0, n) on up to `threads` workers and rethrows the
// first failure.
template <typename Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::vector<std::jthread> workers;
  for (unsigned t = 0; t < threads; ++t) {
    workers.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  workers.clear();
  if (failure) std::rethrow_exception(failure);
}

ordered_json hp_json(const Hyperparams& hp) {
  ordered_json j;
  j["dim"] = hp.dim;
  j["epochs"] = hp.epochs;
  j["lr"] = hp.lr;
  j["char_ngram_min"] = hp.char_ngram_min;
  j["char_ngram_max"] = hp.char_ngram_max;
  j["bucket"] = hp.bucket;
  j["seed"] = hp.seed;
  return j;
}

ordered_json report_json(const EvaluationReport& r) {
  return ordered_json::parse(r.to_json());
}

ordered_json mean_std_json(const MeanStd& m) {
  ordered_json j;
  j["mean"] = m.mean;
  j["stddev"] = m.stddev;
  j["n"] = m.n;
  return j;
}

std::vector<LabeledExample> gather(std::span<const LabeledExample> all,
                                   std::span<const std::size_t> idx) {
  std::vector<LabeledExample> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(all[i]);
  return out;
}

}  // namespace

EvaluationReport evaluate(const StanceModel& model, std::span<const LabeledExample> test) {
  const auto predicted = predict_labels(model, test);
  const auto gold = labels_of(test);
  return evaluate_predictions(gold, predicted);
}

MeanStd mean_std(std::span<const double> values) {
  MeanStd out;
  out.n = values.size();
  if (values.empty()) return out;
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(out.n);
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.stddev = std::sqrt(ss / static_cast<double>(out.n));
  return out;
}

std::vector<std::size_t> fold_assignment(std::size_t n, int folds, std::uint64_t seed) {
  if (folds < 2) throw UsageError("cross-validation needs folds >= 2");
  if (n < static_cast<std::size_t>(folds)) {
    throw DataError("cannot split " + std::to_string(n) + " examples into " +
                    std::to_string(folds) + " folds");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));

  const std::size_t k = static_cast<std::size_t>(folds);
  const std::size_t base = n / k;
  const std::size_t extra = n % k;
  std::vector<std::size_t> fold_of(n);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    for (std::size_t i = 0; i < size; ++i) fold_of[order[pos++]] = f;
  }
  return fold_of;
}

CrossValidationResult cross_validate(std::span<const LabeledExample> examples,
                                     const Hyperparams& hp, int folds, std::uint64_t seed,
                                     unsigned threads) {
  hp.validate();
  CrossValidationResult result;
  result.fold_of = fold_assignment(examples.size(), folds, seed);
  result.folds.resize(static_cast<std::size_t>(folds));

  parallel_for(result.folds.size(), threads, [&](std::size_t f) {
    std::vector<LabeledExample> train_set, test_set;
    for (std::size_t i = 0; i < examples.size(); ++i) {
      (result.fold_of[i] == f ? test_set : train_set).push_back(examples[i]);
    }
    Hyperparams fold_hp = hp;
    fold_hp.seed = hp.seed + f;
    const auto model = train(train_set, fold_hp);
    result.folds[f] = evaluate(model, test_set);
  });

  std::vector<double> acc, frac;
  for (const auto& r : result.folds) {
    acc.push_back(r.accuracy);
    if (r.fraction_score) frac.push_back(*r.fraction_score);
  }
  result.accuracy = mean_std(acc);
  result.fraction_score = mean_std(frac);
  return result;
}

std::string CrossValidationResult::to_json() const {
  ordered_json j;
  j["folds"] = folds.size();
  j["accuracy"] = mean_std_json(accuracy);
  j["fraction_score"] = mean_std_json(fraction_score);
  ordered_json per = ordered_json::array();
  for (const auto& r : folds) per.push_back(report_json(r));
  j["per_fold"] = std::move(per);
  return j.dump(2);
}

Grid Grid::default_bounds() {
  return Grid{{10, 50, 100, 200, 300}, {10, 50, 100, 200, 500}, {0.05, 0.1, 0.2, 0.5, 1.0}};
}

SplitSizes split_80_10_10(std::size_t n) {
  if (n < 3) throw DataError("an 80/10/10 split needs at least 3 examples, got " + std::to_string(n));
  std::size_t validation = std::max<std::size_t>(1, (n + 5) / 10);
  std::size_t test = std::max<std::size_t>(1, (n + 5) / 10);
  if (validation + test >= n) validation = test = 1;
  return {n - validation - test, validation, test};
}

GridSearchResult grid_search(std::span<const LabeledExample> examples, const Grid& grid,
                             Objective objective, const Hyperparams& base, std::uint64_t seed,
                             unsigned threads, StanceModel* best_model) {
  if (grid.size() == 0) throw UsageError("grid search needs a non-empty grid");

  const auto sizes = split_80_10_10(examples.size());
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  const std::span<const std::size_t> all(order);
  const auto train_set = gather(examples, all.subspan(0, sizes.train));
  const auto val_set = gather(examples, all.subspan(sizes.train, sizes.validation));
  const auto test_set = gather(examples, all.subspan(sizes.train + sizes.validation));

  // Preference order doubles as the tie-break order.
  std::vector<Hyperparams> configs;
  auto dims = grid.dims;
  auto epochs = grid.epochs;
  auto lrs = grid.lrs;
  std::sort(dims.begin(), dims.end());
  std::sort(epochs.begin(), epochs.end());
  std::sort(lrs.begin(), lrs.end());
  for (int d : dims) {
    for (int e : epochs) {
      for (double lr : lrs) {
        Hyperparams hp = base;
        hp.dim = d;
        hp.epochs = e;
        hp.lr = lr;
        hp.seed = seed;
        hp.validate();
        configs.push_back(hp);
      }
    }
  }
  configs.erase(std::unique(configs.begin(), configs.end()), configs.end());

  GridSearchResult result;
  result.objective = objective;
  result.n_train = train_set.size();
  result.n_validation = val_set.size();
  result.n_test = test_set.size();
  result.table.resize(configs.size());
  parallel_for(configs.size(), threads, [&](std::size_t i) {
    const auto model = train(train_set, configs[i]);
    auto report = evaluate(model, val_set);
    result.table[i] = {configs[i], report, objective_value(report, objective)};
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < result.table.size(); ++i) {
    if (result.table[i].objective > result.table[best].objective) best = i;
  }
  result.best = result.table[best].hp;
  result.validation = result.table[best].validation;
  const auto model = train(train_set, result.best);
  result.test = evaluate(model, test_set);
  if (best_model) *best_model = model;
  return result;
}

std::string GridSearchResult::to_json() const {
  ordered_json j;
  j["objective"] = std::string(to_string(objective));
  j["best"] = hp_json(best);
  j["split"] = {{"train", n_train}, {"validation", n_validation}, {"test", n_test}};
  j["validation"] = report_json(validation);
  j["test"] = report_json(test);
  ordered_json rows = ordered_json::array();
  for (const auto& p : table) {
    ordered_json row;
    row["dim"] = p.hp.dim;
    row["epochs"] = p.hp.epochs;
    row["lr"] = p.hp.lr;
    row["objective"] = p.objective;
    row["accuracy"] = p.validation.accuracy;
    row["fraction_score"] = p.validation.fraction_score ? ordered_json(*p.validation.fraction_score)
                                                        : ordered_json(nullptr);
    rows.push_back(std::move(row));
  }
  j["grid"] = std::move(rows);
  return j.dump(2);
}

LearningCurve learning_curve(std::span<const LabeledExample> examples, const Hyperparams& hp,
                             std::span<const std::size_t> train_sizes, int repeats,
                             std::uint64_t seed, std::size_t test_size) {
  if (repeats < 1) throw UsageError("learning curve needs repeats >= 1");
  if (train_sizes.empty()) throw UsageError("learning curve needs at least one training size");
  for (std::size_t i = 0; i < train_sizes.size(); ++i) {
    if (train_sizes[i] == 0 || (i > 0 && train_sizes[i] <= train_sizes[i - 1])) {
      throw UsageError("training sizes must be positive and strictly increasing");
    }
  }
  if (test_size == 0) test_size = std::max<std::size_t>(1, examples.size() / 10);
  const std::size_t largest = train_sizes.back();
  if (largest + test_size > examples.size()) {
    throw DataError("training size " + std::to_string(largest) + " plus test size " +
                    std::to_string(test_size) + " exceeds the " +
                    std::to_string(examples.size()) + " available examples");
  }

  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  const std::span<const std::size_t> all(order);
  const auto test_set = gather(examples, all.subspan(0, test_size));
  const std::vector<std::size_t> pool(all.begin() + static_cast<std::ptrdiff_t>(test_size),
                                      all.end());

  LearningCurve curve;
  curve.test_size = test_size;
  curve.repeats = repeats;
  std::vector<std::vector<double>> acc(train_sizes.size()), frac(train_sizes.size());
  for (int r = 0; r < repeats; ++r) {
    auto shuffled = pool;
    Rng repeat_rng(seed + 1 + static_cast<std::uint64_t>(r));
    repeat_rng.shuffle(std::span<std::size_t>(shuffled));
    Hyperparams repeat_hp = hp;
    repeat_hp.seed = hp.seed + static_cast<std::uint64_t>(r);
    for (std::size_t s = 0; s < train_sizes.size(); ++s) {
      const auto train_set =
          gather(examples, std::span<const std::size_t>(shuffled).subspan(0, train_sizes[s]));
      const auto report = evaluate(train(train_set, repeat_hp), test_set);
      acc[s].push_back(report.accuracy);
      if (report.fraction_score) frac[s].push_back(*report.fraction_score);
    }
  }
  for (std::size_t s = 0; s < train_sizes.size(); ++s) {
    const auto f = mean_std(frac[s]);
    curve.points.push_back({train_sizes[s], mean_std(acc[s]).mean, f.mean, f.n});
  }
  return curve;
}

std::string LearningCurve::to_csv() const {
  std::ostringstream out;
  out << "size,accuracy,fraction_score,fraction_defined\n";
  for (const auto& p : points) {
    out << p.size << ',' << format_double(p.accuracy) << ',' << format_double(p.fraction_score)
        << ',' << p.fraction_defined << '\n';
  }
  return out.str();
}

}  // namespace opinion

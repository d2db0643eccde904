#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "opinion/classifier.hpp"
#include "opinion/metrics.hpp"

namespace opinion {

EvaluationReport evaluate(const StanceModel& model, std::span<const LabeledExample> test);

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation
  std::size_t n = 0;    // number of defined values that entered
};

MeanStd mean_std(std::span<const double> values);

struct CrossValidationResult {
  std::vector<EvaluationReport> folds;
  std::vector<std::size_t> fold_of;  // example index -> fold
  MeanStd accuracy;
  MeanStd fraction_score;  // over folds where it is defined

  std::string to_json() const;
};

// Seeded shuffle, then contiguous folds whose sizes differ by at most one.
// Fold i trains with seed hp.seed + i. `threads` > 1 trains folds
// concurrently; results do not depend on it.
CrossValidationResult cross_validate(std::span<const LabeledExample> examples,
                                     const Hyperparams& hp, int folds, std::uint64_t seed,
                                     unsigned threads = 1);

// Fold index per example for the split above.
std::vector<std::size_t> fold_assignment(std::size_t n, int folds, std::uint64_t seed);

struct Grid {
  std::vector<int> dims;
  std::vector<int> epochs;
  std::vector<double> lrs;

  // Five points per axis inside dim 10-300, epochs 10-500, lr 0.05-1.0.
  static Grid default_bounds();
  std::size_t size() const { return dims.size() * epochs.size() * lrs.size(); }
};

struct GridPoint {
  Hyperparams hp;
  EvaluationReport validation;
  double objective = 0.0;
};

struct GridSearchResult {
  Objective objective = Objective::accuracy;
  Hyperparams best;
  EvaluationReport validation;
  EvaluationReport test;
  std::size_t n_train = 0, n_validation = 0, n_test = 0;
  std::vector<GridPoint> table;  // every configuration, in preference order

  std::string to_json() const;
};

struct SplitSizes {
  std::size_t train, validation, test;
};

// 80/10/10 with validation and test each at least one example.
SplitSizes split_80_10_10(std::size_t n);

// Trains every configuration on the training split and scores it on the
// validation split. The fraction objective maximizes min(f, 1/f). Ties go to
// the smaller dim, then fewer epochs, then the smaller lr. The winner is
// scored once on the held-out test split. `base` supplies the fields the
// grid does not vary.
GridSearchResult grid_search(std::span<const LabeledExample> examples, const Grid& grid,
                             Objective objective, const Hyperparams& base, std::uint64_t seed,
                             unsigned threads = 1, StanceModel* best_model = nullptr);

struct CurvePoint {
  std::size_t size = 0;
  double accuracy = 0.0;
  double fraction_score = 0.0;    // mean over repeats where defined
  std::size_t fraction_defined = 0;
};

struct LearningCurve {
  std::size_t test_size = 0;
  int repeats = 0;
  std::vector<CurvePoint> points;

  std::string to_csv() const;
};

// A held-out test set is drawn once and kept for every size and repeat.
// Each repeat reshuffles the remaining pool (seed + repeat) and trains on
// nested prefixes of it, so smaller training sets are subsets of larger
// ones. test_size = 0 means n / 10.
LearningCurve learning_curve(std::span<const LabeledExample> examples, const Hyperparams& hp,
                             std::span<const std::size_t> train_sizes, int repeats,
                             std::uint64_t seed, std::size_t test_size = 0);

}  // namespace opinion

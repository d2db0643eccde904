#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "opinion/labels.hpp"

namespace opinion {

struct Hyperparams {
  int dim = 100;
  int epochs = 5;
  double lr = 0.1;
  int char_ngram_min = 3;
  int char_ngram_max = 6;
  std::uint64_t bucket = 2'000'000;
  std::uint64_t seed = 42;

  // Throws UsageError on non-positive sizes or an inverted n-gram range.
  // char_ngram_min = char_ngram_max = 0 disables subword features.
  void validate() const;
  bool uses_subwords() const { return char_ngram_max > 0; }

  friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

// Bag-of-features linear text classifier with subword hashing.
//
// A text is represented by the mean of the embedding rows of its word tokens
// and of the hashed character n-grams of each token ("<word>" padded,
// lengths char_ngram_min..char_ngram_max, counted in code points). The mean
// feeds a 3-way linear layer with biases and a softmax.
//
// The embedding table is logically (|vocab| + bucket) x dim. Rows hold a
// deterministic pseudo-random initial value derived from (seed, row) until
// training first touches them; only touched rows are stored, so a 2M-row
// bucket costs nothing for rows that never occur.
class StanceModel {
 public:
  using Probabilities = std::array<double, kNumLabels>;

  struct Prediction {
    Label label = Label::supports;
    Probabilities probabilities{};
  };

  StanceModel(Hyperparams hp, std::vector<std::string> vocab);

  const Hyperparams& hyperparams() const { return hp_; }
  const std::vector<std::string>& vocab() const { return words_; }
  std::size_t dim() const { return static_cast<std::size_t>(hp_.dim); }
  std::uint64_t row_count() const { return words_.size() + (hp_.uses_subwords() ? hp_.bucket : 0); }
  std::size_t stored_rows() const { return row_ids_.size(); }

  // Row ids of every feature of `text`, in token order.
  std::vector<std::uint64_t> features(std::string_view text) const;

  Prediction predict(std::string_view text) const;
  Prediction predict_features(std::span<const std::uint64_t> features) const;

  // Cross-entropy -log p(label | text).
  double loss(std::string_view text, Label label) const;

  struct Gradient {
    std::vector<double> output;         // 3 x dim, row-major by label
    std::array<double, kNumLabels> bias{};
    // d loss / d row for each distinct feature row.
    std::unordered_map<std::uint64_t, std::vector<double>> rows;
  };
  Gradient gradient(std::string_view text, Label label) const;

  // One SGD step on cross-entropy; returns the loss before the step.
  double sgd_step(std::span<const std::uint64_t> features, Label label, double lr);

  // Parameter access. Reading a row never materializes it; the mutable
  // accessor does.
  std::vector<double> input_row(std::uint64_t row) const;
  double* mutable_input_row(std::uint64_t row);
  std::span<const double> output_weights() const { return output_; }
  std::span<double> mutable_output_weights() { return output_; }
  const std::array<double, kNumLabels>& bias() const { return bias_; }
  std::array<double, kNumLabels>& mutable_bias() { return bias_; }

  // Rounds every parameter to float precision so the stored form is exact.
  void round_to_float();

  // Header line of JSON, then raw little-endian float32 arrays.
  void save(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;
  static StanceModel load(std::istream& in, const std::string& name = "model");
  static StanceModel load(const std::filesystem::path& path);

  friend bool operator==(const StanceModel&, const StanceModel&);

 private:
  double init_value(std::uint64_t row, std::size_t col) const;
  const double* find_row(std::uint64_t row) const;
  void hidden(std::span<const std::uint64_t> features, std::vector<double>& h) const;
  void logits_to_probs(const std::vector<double>& h, Probabilities& p) const;

  Hyperparams hp_;
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::uint64_t> word_rows_;
  std::unordered_map<std::uint64_t, std::size_t> slot_of_;
  std::vector<std::uint64_t> row_ids_;  // slot -> row
  std::vector<double> slots_;           // slot-major, dim each
  std::vector<double> output_;          // kNumLabels x dim
  std::array<double, kNumLabels> bias_{};
};

// 32-bit FNV-1a over the bytes of s.
std::uint32_t fnv1a(std::string_view s);

// Character n-grams of "<token>" with lengths in [min_n, max_n] code points.
std::vector<std::string> char_ngrams(std::string_view token, int min_n, int max_n);

struct TrainOptions {
  // Called after every epoch with the mean training-set loss.
  std::function<void(int epoch, double mean_loss)> on_epoch;
};

// Supervised SGD on cross-entropy. The learning rate decays linearly from
// hp.lr to 0 over epochs x n updates; example order is reshuffled each epoch
// from hp.seed. Single-threaded and deterministic for fixed (examples, hp).
// Throws DataError("degenerate training set") unless at least two distinct
// labels are present.
StanceModel train(std::span<const LabeledExample> examples, const Hyperparams& hp,
                  const TrainOptions& options = {});

std::vector<Label> predict_labels(const StanceModel& model,
                                  std::span<const LabeledExample> examples);

}  // namespace opinion

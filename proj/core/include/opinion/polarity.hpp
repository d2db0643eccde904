#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "opinion/message.hpp"

namespace opinion {

// Term and emoji scores in [-1, 1].
class PolarityLexicon {
 public:
  PolarityLexicon() = default;
  explicit PolarityLexicon(std::string name) : name_(std::move(name)) {}

  // TSV: term<TAB>score, UTF-8, '#' starts a comment line. Entries whose
  // first code point is pictographic go to the emoji table; all other terms
  // are lowercased into the word table. Out-of-range scores and duplicate
  // terms throw ParseError with the line number.
  static PolarityLexicon load(const std::filesystem::path& path);
  static PolarityLexicon parse(std::string_view tsv, std::string name = "lexicon");

  // Both throw DataError on out-of-range scores or duplicates.
  void add_word(std::string_view term, double score);
  void add_emoji(std::string_view emoji, double score);

  const std::string& name() const { return name_; }
  const std::unordered_map<std::string, double>& words() const { return words_; }
  const std::unordered_map<std::string, double>& emoji() const { return emoji_; }
  std::size_t entry_count() const { return words_.size() + emoji_.size(); }

  // Emoji entries sharing a first code point, longest first.
  const std::vector<std::pair<std::string, double>>* emoji_candidates(char32_t first) const;

 private:
  std::string name_;
  std::unordered_map<std::string, double> words_;
  std::unordered_map<std::string, double> emoji_;
  std::unordered_map<char32_t, std::vector<std::pair<std::string, double>>> emoji_index_;
};

struct PolarityScore {
  double value = 0.0;
  std::uint32_t hits = 0;
  bool is_zero = true;
};

// Unweighted mean over matched word tokens and emoji occurrences. Words are
// looked up per token (each occurrence counts); emoji are found by exact,
// longest-first string match anywhere in the raw text.
PolarityScore score(const PolarityLexicon& lexicon, std::string_view text);

// Running aggregate over scored messages.
class PolaritySummary {
 public:
  void add(const PolarityScore& s);
  void merge(const PolaritySummary& other);

  std::uint64_t count() const { return n_; }
  std::uint64_t nonzero_count() const { return nonzero_; }
  // Mean over every message (zeros included), or over non-zero scores only.
  double mean(bool nonzero_only = false) const;
  double nonzero_fraction() const;

 private:
  // Neumaier-compensated sums keep merges order-independent to ~1 ulp.
  struct Sum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x);
    double value() const { return sum + comp; }
  };
  std::uint64_t n_ = 0;
  std::uint64_t nonzero_ = 0;
  Sum total_;
};

// Scores each message pulled from `next` and hands (message, score) to
// `sink` in input order.
template <typename Source, typename Sink>
PolaritySummary score_stream(const PolarityLexicon& lexicon, Source&& next, Sink&& sink) {
  PolaritySummary summary;
  Message m;
  while (next(m)) {
    const PolarityScore s = score(lexicon, m.text);
    summary.add(s);
    sink(m, s);
  }
  return summary;
}

}  // namespace opinion

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "opinion/message.hpp"
#include "opinion/query.hpp"

namespace opinion {

struct TokenCounts {
  std::unordered_map<std::string, std::uint64_t> counts;
  std::uint64_t total = 0;

  void add(std::string_view token, std::uint64_t n = 1);
  void add_text(std::string_view text);
  void merge(const TokenCounts& other);
  std::uint64_t count(std::string_view token) const;
};

struct CollocationStats {
  std::string token;
  std::uint64_t count_matched = 0;
  std::uint64_t count_unmatched = 0;
  std::uint64_t n_matched = 0;
  std::uint64_t n_unmatched = 0;
  double t = 0.0;
};

// Difference of proportions p1 - p2 over its standard error
// sqrt(p1/n1 + p2/n2). Zero when the token occurs on neither side.
double tscore(std::uint64_t count_matched, std::uint64_t n_matched,
              std::uint64_t count_unmatched, std::uint64_t n_unmatched);

struct RankOptions {
  std::uint64_t min_count = 5;
  std::size_t top_k = 20;  // 0 keeps every candidate
};

// Tokens with count_matched >= min_count, by t descending; ties go to the
// higher matched count, then the lexicographically smaller token.
// Throws DataError("no matched tokens") when the matched side is empty.
std::vector<CollocationStats> tscore_rank(const TokenCounts& matched, const TokenCounts& unmatched,
                                          const RankOptions& options = {},
                                          const std::unordered_set<std::string>& exclude = {});

struct ExpansionRound {
  int round = 0;
  std::vector<std::string> query_keywords;
  std::size_t matched_messages = 0;
  std::size_t unmatched_messages = 0;
  std::vector<CollocationStats> candidates;
  std::vector<std::string> accepted;
};

// Decides which candidates of a round join the query for the next round.
// The default (no reviewer) accepts nothing.
using ExpansionReviewer =
    std::function<std::vector<std::string>(const ExpansionRound& round)>;

// Iterative query expansion. Each round splits the corpus with the current
// query and ranks tokens of matched vs unmatched messages. Tokens that equal
// a query keyword, or contain one (they cannot widen the selection), are
// excluded. Terms only join the query through the reviewer.
std::vector<ExpansionRound> expand_query(const TopicQuery& query, std::span<const Message> msgs,
                                         int rounds, const RankOptions& options = {},
                                         const ExpansionReviewer& reviewer = {});

}  // namespace opinion

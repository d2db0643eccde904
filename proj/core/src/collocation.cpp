#include "opinion/collocation.hpp"

#include <algorithm>
#include <cmath>

#include "opinion/error.hpp"
#include "opinion/text.hpp"

namespace opinion {

void TokenCounts::add(std::string_view token, std::uint64_t n) {
  auto it = counts.find(std::string(token));
  if (it == counts.end()) {
    counts.emplace(std::string(token), n);
  } else {
    it->second += n;
  }
  total += n;
}

void TokenCounts::add_text(std::string_view text) {
  thread_local std::vector<std::string> tokens;
  text::tokenize(text, tokens);
  for (auto& t : tokens) {
    ++counts[std::move(t)];
    ++total;
  }
}

void TokenCounts::merge(const TokenCounts& other) {
  for (const auto& [tok, n] : other.counts) counts[tok] += n;
  total += other.total;
}

std::uint64_t TokenCounts::count(std::string_view token) const {
  auto it = counts.find(std::string(token));
  return it == counts.end() ? 0 : it->second;
}

double tscore(std::uint64_t count_matched, std::uint64_t n_matched,
              std::uint64_t count_unmatched, std::uint64_t n_unmatched) {
  if (n_matched == 0 || n_unmatched == 0) {
    throw UsageError("tscore needs non-empty matched and unmatched totals");
  }
  const double p1 = static_cast<double>(count_matched) / static_cast<double>(n_matched);
  const double p2 = static_cast<double>(count_unmatched) / static_cast<double>(n_unmatched);
  const double var = p1 / static_cast<double>(n_matched) + p2 / static_cast<double>(n_unmatched);
  if (var == 0.0) return 0.0;
  return (p1 - p2) / std::sqrt(var);
}

std::vector<CollocationStats> tscore_rank(const TokenCounts& matched, const TokenCounts& unmatched,
                                          const RankOptions& options,
                                          const std::unordered_set<std::string>& exclude) {
  if (matched.total == 0) throw DataError("no matched tokens");

  std::vector<CollocationStats> out;
  auto consider = [&](const std::string& token, std::uint64_t c1) {
    if (c1 < options.min_count || exclude.contains(token)) return;
    out.push_back({token, c1, unmatched.count(token), matched.total, unmatched.total, 0.0});
  };
  for (const auto& [token, c1] : matched.counts) consider(token, c1);
  if (options.min_count == 0) {
    for (const auto& [token, c2] : unmatched.counts) {
      if (!matched.counts.contains(token)) consider(token, 0);
    }
  }
  // Nothing left to rank is a valid (empty) answer even without a contrast set.
  if (out.empty()) return out;
  if (unmatched.total == 0) throw DataError("no unmatched tokens");
  for (auto& s : out) s.t = tscore(s.count_matched, s.n_matched, s.count_unmatched, s.n_unmatched);

  auto better = [](const CollocationStats& a, const CollocationStats& b) {
    if (a.t != b.t) return a.t > b.t;
    if (a.count_matched != b.count_matched) return a.count_matched > b.count_matched;
    return a.token < b.token;
  };
  if (options.top_k > 0 && out.size() > options.top_k) {
    std::partial_sort(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(options.top_k),
                      out.end(), better);
    out.resize(options.top_k);
  } else {
    std::sort(out.begin(), out.end(), better);
  }
  return out;
}

std::vector<ExpansionRound> expand_query(const TopicQuery& query, std::span<const Message> msgs,
                                         int rounds, const RankOptions& options,
                                         const ExpansionReviewer& reviewer) {
  if (rounds < 1) throw UsageError("expand_query needs rounds >= 1");
  std::vector<ExpansionRound> report;
  TopicQuery current = query;

  for (int r = 1; r <= rounds; ++r) {
    ExpansionRound round;
    round.round = r;
    round.query_keywords = current.keywords();

    TokenCounts matched, unmatched;
    for (const auto& m : msgs) {
      if (current.matches(m.text)) {
        matched.add_text(m.text);
        ++round.matched_messages;
      } else {
        unmatched.add_text(m.text);
        ++round.unmatched_messages;
      }
    }

    std::unordered_set<std::string> exclude;
    for (const auto& [token, n] : matched.counts) {
      for (const auto& k : current.keywords()) {
        if (token.find(k) != std::string::npos) {
          exclude.insert(token);
          break;
        }
      }
    }
    round.candidates = tscore_rank(matched, unmatched, options, exclude);
    if (reviewer) round.accepted = reviewer(round);
    if (!round.accepted.empty()) current = current.with_keywords(round.accepted);
    report.push_back(std::move(round));
  }
  return report;
}

}  // namespace opinion

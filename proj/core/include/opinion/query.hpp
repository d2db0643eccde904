#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "opinion/message.hpp"

namespace opinion {

enum class Combine { keywords_only, regex_only, keywords_or_regex };

std::string_view to_string(Combine c);
std::optional<Combine> parse_combine(std::string_view s);

// A topic selector: case-insensitive keyword substrings and/or a regular
// expression evaluated on the case-folded text.
//
// Keywords match anywhere, with no word-boundary requirement, so "corona"
// selects "coronavirus". The regex is searched unanchored (leftmost match) in
// Perl syntax, and '.' does not match a newline. A query is validated on
// construction: an invalid pattern throws DataError there, never at match
// time.
class TopicQuery {
 public:
  // When `combine` is not given it follows from which parts are present.
  TopicQuery(std::string name, std::vector<std::string> keywords,
             std::optional<std::string> regex = std::nullopt,
             std::optional<Combine> combine = std::nullopt);

  // {"name":..,"keywords":[..],"regex":..,"combine":..}
  static TopicQuery from_json(std::string_view json_text);
  static TopicQuery load(const std::filesystem::path& path);
  std::string to_json() const;

  const std::string& name() const { return name_; }
  // Lowercased, deduplicated, in first-seen order.
  const std::vector<std::string>& keywords() const { return keywords_; }
  const std::optional<std::string>& regex() const { return pattern_; }
  Combine combine() const { return combine_; }

  bool keyword_match(std::string_view text) const;
  bool regex_match(std::string_view text) const;
  bool matches(std::string_view text) const;

  // Same as above for text that is already case-folded.
  bool keyword_match_folded(std::string_view folded) const;
  bool regex_match_folded(std::string_view folded) const;
  bool matches_folded(std::string_view folded) const;

  // Copy with extra keywords appended (used when a reviewer accepts
  // expansion candidates).
  TopicQuery with_keywords(std::span<const std::string> extra) const;

 private:
  struct Compiled;

  std::string name_;
  std::vector<std::string> keywords_;
  std::optional<std::string> pattern_;
  Combine combine_;
  std::shared_ptr<const Compiled> compiled_;
};

struct Split {
  std::vector<Message> matched;
  std::vector<Message> unmatched;
};

// Partition by query; every message lands in exactly one side, order kept.
Split split_corpus(std::span<const Message> msgs, const TopicQuery& query);

// Streaming partition: calls exactly one of the sinks per message.
template <typename Source, typename OnMatch, typename OnMiss>
void split_stream(Source&& next, const TopicQuery& query, OnMatch&& on_match, OnMiss&& on_miss) {
  Message m;
  while (next(m)) {
    if (query.matches(m.text)) {
      on_match(m);
    } else {
      on_miss(m);
    }
  }
}

}  // namespace opinion

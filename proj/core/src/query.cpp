#include "opinion/query.hpp"

#include <algorithm>
#include <boost/regex.hpp>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "opinion/error.hpp"
#include "opinion/text.hpp"

namespace opinion {

using nlohmann::json;
using nlohmann::ordered_json;

struct TopicQuery::Compiled {
  boost::regex re;
};

std::string_view to_string(Combine c) {
  switch (c) {
    case Combine::keywords_only: return "keywords_only";
    case Combine::regex_only: return "regex_only";
    case Combine::keywords_or_regex: return "keywords_or_regex";
  }
  return "keywords_only";
}

std::optional<Combine> parse_combine(std::string_view s) {
  if (s == "keywords_only") return Combine::keywords_only;
  if (s == "regex_only") return Combine::regex_only;
  if (s == "keywords_or_regex") return Combine::keywords_or_regex;
  return std::nullopt;
}

TopicQuery::TopicQuery(std::string name, std::vector<std::string> keywords,
                       std::optional<std::string> regex, std::optional<Combine> combine)
    : name_(std::move(name)), pattern_(std::move(regex)) {
  for (const auto& k : keywords) {
    auto folded = text::fold_case(k);
    if (folded.empty()) throw DataError("query '" + name_ + "': empty keyword");
    if (std::find(keywords_.begin(), keywords_.end(), folded) == keywords_.end()) {
      keywords_.push_back(std::move(folded));
    }
  }
  if (pattern_ && pattern_->empty()) pattern_.reset();
  if (keywords_.empty() && !pattern_) {
    throw DataError("query '" + name_ + "' has neither keywords nor a regex");
  }

  if (combine) {
    combine_ = *combine;
  } else if (!pattern_) {
    combine_ = Combine::keywords_only;
  } else {
    combine_ = keywords_.empty() ? Combine::regex_only : Combine::keywords_or_regex;
  }
  if (combine_ != Combine::regex_only && keywords_.empty()) {
    throw DataError("query '" + name_ + "': combine=" + std::string(to_string(combine_)) +
                    " needs keywords");
  }
  if (combine_ != Combine::keywords_only && !pattern_) {
    throw DataError("query '" + name_ + "': combine=" + std::string(to_string(combine_)) +
                    " needs a regex");
  }

  if (pattern_) {
    auto compiled = std::make_shared<Compiled>();
    try {
      compiled->re.assign(*pattern_, boost::regex::perl);
    } catch (const boost::regex_error& e) {
      throw DataError("query '" + name_ + "': invalid regex '" + *pattern_ + "': " + e.what());
    }
    compiled_ = std::move(compiled);
  }
}

TopicQuery TopicQuery::from_json(std::string_view json_text) {
  json j = json::parse(json_text.begin(), json_text.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw DataError("query file is not a JSON object");
  std::string name = j.value("name", std::string("query"));
  std::vector<std::string> keywords;
  if (auto it = j.find("keywords"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw DataError("query '" + name + "': keywords must be an array");
    for (const auto& k : *it) {
      if (!k.is_string()) throw DataError("query '" + name + "': keywords must be strings");
      keywords.push_back(k.get<std::string>());
    }
  }
  std::optional<std::string> regex;
  if (auto it = j.find("regex"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw DataError("query '" + name + "': regex must be a string");
    regex = it->get<std::string>();
  }
  std::optional<Combine> combine;
  if (auto it = j.find("combine"); it != j.end() && !it->is_null()) {
    combine = it->is_string() ? parse_combine(it->get_ref<const std::string&>()) : std::nullopt;
    if (!combine) throw DataError("query '" + name + "': unknown combine mode");
  }
  return TopicQuery(std::move(name), std::move(keywords), std::move(regex), combine);
}

TopicQuery TopicQuery::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read query file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return from_json(ss.str());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string TopicQuery::to_json() const {
  ordered_json j;
  j["name"] = name_;
  j["keywords"] = keywords_;
  j["regex"] = pattern_ ? ordered_json(*pattern_) : ordered_json(nullptr);
  j["combine"] = std::string(to_string(combine_));
  return j.dump(2);
}

bool TopicQuery::keyword_match_folded(std::string_view folded) const {
  for (const auto& k : keywords_) {
    if (folded.find(k) != std::string_view::npos) return true;
  }
  return false;
}

bool TopicQuery::regex_match_folded(std::string_view folded) const {
  if (!compiled_) return false;
  return boost::regex_search(folded.begin(), folded.end(), compiled_->re,
                             boost::match_default | boost::match_not_dot_newline);
}

bool TopicQuery::matches_folded(std::string_view folded) const {
  switch (combine_) {
    case Combine::keywords_only: return keyword_match_folded(folded);
    case Combine::regex_only: return regex_match_folded(folded);
    case Combine::keywords_or_regex:
      return keyword_match_folded(folded) || regex_match_folded(folded);
  }
  return false;
}

bool TopicQuery::keyword_match(std::string_view text) const {
  return keyword_match_folded(text::fold_case(text));
}

bool TopicQuery::regex_match(std::string_view text) const {
  return regex_match_folded(text::fold_case(text));
}

bool TopicQuery::matches(std::string_view text) const {
  return matches_folded(text::fold_case(text));
}

TopicQuery TopicQuery::with_keywords(std::span<const std::string> extra) const {
  std::vector<std::string> all = keywords_;
  all.insert(all.end(), extra.begin(), extra.end());
  std::optional<Combine> combine = combine_;
  if (combine_ == Combine::regex_only && !extra.empty()) combine = Combine::keywords_or_regex;
  return TopicQuery(name_, std::move(all), pattern_, combine);
}

Split split_corpus(std::span<const Message> msgs, const TopicQuery& query) {
  Split out;
  for (const auto& m : msgs) {
    (query.matches(m.text) ? out.matched : out.unmatched).push_back(m);
  }
  return out;
}

}  // namespace opinion

#include "opinion/polarity.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "opinion/error.hpp"
#include "opinion/text.hpp"

namespace opinion {

namespace {

char32_t first_codepoint(std::string_view s) {
  std::size_t pos = 0;
  return s.empty() ? 0 : text::decode_utf8(s, pos);
}

// Emoji and emoticons such as ":-)" are matched in raw text, not as tokens.
bool is_symbolic(std::string_view term) {
  std::size_t pos = 0;
  if (text::is_emoji_base(first_codepoint(term))) return true;
  while (pos < term.size()) {
    const char32_t cp = text::decode_utf8(term, pos);
    const bool ascii_alnum = cp < 0x80 && std::isalnum(static_cast<int>(cp));
    const bool other_letter = cp >= 0x80 && !text::is_edge_punct(cp) &&
                              !text::is_emoji_base(cp) && !text::is_emoji_extender(cp);
    if (ascii_alnum || other_letter) return false;
  }
  return true;
}

void check_score(std::string_view term, double score) {
  if (!(score >= -1.0 && score <= 1.0)) {
    throw DataError("score out of range for '" + std::string(term) + "'");
  }
}

}  // namespace

void PolarityLexicon::add_word(std::string_view term, double score) {
  check_score(term, score);
  std::string key = text::fold_case(text::trim(term));
  if (key.empty()) throw DataError("empty lexicon term");
  if (emoji_.contains(key) || !words_.emplace(key, score).second) {
    throw DataError("duplicate term '" + key + "'");
  }
}

void PolarityLexicon::add_emoji(std::string_view emoji, double score) {
  check_score(emoji, score);
  std::string key(text::trim(emoji));
  if (key.empty()) throw DataError("empty lexicon term");
  if (words_.contains(key) || !emoji_.emplace(key, score).second) {
    throw DataError("duplicate term '" + key + "'");
  }
  auto& bucket = emoji_index_[first_codepoint(key)];
  bucket.emplace_back(key, score);
  std::stable_sort(bucket.begin(), bucket.end(), [](const auto& a, const auto& b) {
    if (a.first.size() != b.first.size()) return a.first.size() > b.first.size();
    return a.first < b.first;
  });
}

const std::vector<std::pair<std::string, double>>* PolarityLexicon::emoji_candidates(
    char32_t first) const {
  auto it = emoji_index_.find(first);
  return it == emoji_index_.end() ? nullptr : &it->second;
}

PolarityLexicon PolarityLexicon::parse(std::string_view tsv, std::string name) {
  PolarityLexicon lex(name);
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= tsv.size()) {
    auto end = tsv.find('\n', start);
    if (end == std::string_view::npos) end = tsv.size();
    std::string_view line = tsv.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (text::trim(line).empty() || line.front() == '#') {
      if (end == tsv.size()) break;
      continue;
    }
    const auto tab = line.rfind('\t');
    if (tab == std::string_view::npos) {
      throw ParseError(name, line_no, "expected term<TAB>score");
    }
    const std::string term(line.substr(0, tab));
    const std::string value(text::trim(line.substr(tab + 1)));
    double score = 0.0;
    try {
      std::size_t used = 0;
      score = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError(name, line_no, "unparseable score '" + value + "'");
    }
    if (!(score >= -1.0 && score <= 1.0)) throw ParseError(name, line_no, "score out of range");
    try {
      if (is_symbolic(text::trim(term))) {
        lex.add_emoji(term, score);
      } else {
        lex.add_word(term, score);
      }
    } catch (const DataError& e) {
      throw ParseError(name, line_no, e.what());
    }
    if (end == tsv.size()) break;
  }
  return lex;
}

PolarityLexicon PolarityLexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read lexicon file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

PolarityScore score(const PolarityLexicon& lexicon, std::string_view text) {
  double sum = 0.0;
  std::uint32_t hits = 0;

  if (!lexicon.words().empty()) {
    thread_local std::vector<std::string> tokens;
    text::tokenize(text, tokens);
    for (const auto& t : tokens) {
      if (auto it = lexicon.words().find(t); it != lexicon.words().end()) {
        sum += it->second;
        ++hits;
      }
    }
  }

  if (!lexicon.emoji().empty()) {
    std::size_t pos = 0;
    while (pos < text.size()) {
      const std::size_t start = pos;
      const char32_t cp = text::decode_utf8(text, pos);
      const auto* candidates = lexicon.emoji_candidates(cp);
      if (!candidates) continue;
      for (const auto& [emoji, s] : *candidates) {
        if (text.substr(start).starts_with(emoji)) {
          sum += s;
          ++hits;
          pos = start + emoji.size();
          break;
        }
      }
    }
  }

  PolarityScore out;
  out.hits = hits;
  if (hits > 0) out.value = std::clamp(sum / hits, -1.0, 1.0);
  out.is_zero = hits == 0 || out.value == 0.0;
  return out;
}

void PolaritySummary::Sum::add(double x) {
  const double t = sum + x;
  if (std::abs(sum) >= std::abs(x)) {
    comp += (sum - t) + x;
  } else {
    comp += (x - t) + sum;
  }
  sum = t;
}

void PolaritySummary::add(const PolarityScore& s) {
  ++n_;
  if (!s.is_zero) ++nonzero_;
  total_.add(s.value);
}

void PolaritySummary::merge(const PolaritySummary& other) {
  n_ += other.n_;
  nonzero_ += other.nonzero_;
  total_.add(other.total_.sum);
  total_.add(other.total_.comp);
}

double PolaritySummary::mean(bool nonzero_only) const {
  const auto denom = nonzero_only ? nonzero_ : n_;
  return denom == 0 ? 0.0 : total_.value() / static_cast<double>(denom);
}

double PolaritySummary::nonzero_fraction() const {
  return n_ == 0 ? 0.0 : static_cast<double>(nonzero_) / static_cast<double>(n_);
}

}  // namespace opinion

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "opinion/message.hpp"

namespace opinion {

enum class CorpusFormat { jsonl, tsv };

std::optional<CorpusFormat> parse_corpus_format(std::string_view s);
// Picks tsv for *.tsv / *.tab files and jsonl otherwise.
CorpusFormat guess_corpus_format(const std::filesystem::path& path);

struct CorpusStats {
  std::uint64_t total = 0;
  std::uint64_t rejected = 0;
  std::map<std::chrono::sys_days, std::uint64_t> per_day;  // UTC days
  std::map<Platform, std::uint64_t> per_platform;

  void add(const Message& m);
  void merge(const CorpusStats& other);
  // {"total":..,"rejected":..,"per_day":{"YYYY-MM-DD":..},"per_platform":{..}}
  std::string to_json() const;
};

struct LineDiagnostic {
  std::size_t line;
  std::string reason;
};

using DiagnosticSink = std::function<void(const LineDiagnostic&)>;

// Parses one line; on failure returns false and sets `reason`.
bool parse_jsonl_message(std::string_view line, Message& out, std::string& reason);
bool parse_tsv_message(std::string_view line, Message& out, std::string& reason);

std::string to_jsonl(const Message& m);
std::string to_tsv(const Message& m);

// Backslash escaping for tab-separated text fields (\\ \t \n \r).
std::string escape_tsv_field(std::string_view s);
std::string unescape_tsv_field(std::string_view s);

// Sequential reader over a line-delimited message file. Memory use does not
// depend on the file size: one line buffer plus the running stats.
class MessageReader {
 public:
  MessageReader(const std::filesystem::path& path, CorpusFormat format,
                DiagnosticSink sink = {});
  MessageReader(const std::filesystem::path& path, DiagnosticSink sink = {})
      : MessageReader(path, guess_corpus_format(path), std::move(sink)) {}

  // Fills `out` with the next well-formed message; malformed lines are
  // counted and reported, never thrown.
  bool next(Message& out);

  const CorpusStats& stats() const { return stats_; }
  std::size_t line_number() const { return line_no_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  CorpusFormat format_;
  DiagnosticSink sink_;
  std::string line_;
  std::size_t line_no_ = 0;
  CorpusStats stats_;
};

// Reads every well-formed message of a file into memory.
std::vector<Message> read_messages(const std::filesystem::path& path,
                                   CorpusStats* stats = nullptr, DiagnosticSink sink = {});

class MessageWriter {
 public:
  MessageWriter(std::ostream& out, CorpusFormat format) : out_(out), format_(format) {}
  void write(const Message& m);

 private:
  std::ostream& out_;
  CorpusFormat format_;
};

// --- language filtering -----------------------------------------------------

using LangPredicate = std::function<bool(const Message&)>;

bool is_valid_lang_tag(std::string_view tag);

// Keeps messages tagged `keep`; "und" messages go to `undetermined`, which
// retains everything unless replaced.
class LangFilter {
 public:
  explicit LangFilter(std::string keep, LangPredicate undetermined = {});
  bool operator()(const Message& m) const;

 private:
  std::string keep_;
  LangPredicate undetermined_;
};

// Stopword-vote heuristic for untagged messages: retains a message when it
// has at least as many stopwords of `keep` as of any other known language.
// Known languages: nl, en.
LangPredicate stopword_lang_predicate(std::string keep);

std::vector<Message> filter_lang(std::span<const Message> msgs, const LangFilter& filter);

// --- deduplication ----------------------------------------------------------

enum class DedupMode { by_id, by_exact_text };

std::optional<DedupMode> parse_dedup_mode(std::string_view s);

// First occurrence wins. by_id keys on (platform, id); by_exact_text on the
// byte-exact whitespace-trimmed text.
class Deduplicator {
 public:
  explicit Deduplicator(DedupMode mode) : mode_(mode) {}
  bool admit(const Message& m);
  std::size_t unique_count() const { return seen_.size(); }

 private:
  DedupMode mode_;
  std::unordered_set<std::string> seen_;
};

std::vector<Message> dedup(std::span<const Message> msgs, DedupMode mode);

// --- sampling ---------------------------------------------------------------

// Independent inclusion with probability `rate`, in input order.
std::vector<std::size_t> sample_indices_by_rate(std::size_t population, double rate,
                                                std::uint64_t seed);
// Exactly `n` indices, uniform without replacement, in input order.
std::vector<std::size_t> sample_indices_by_count(std::size_t population, std::size_t n,
                                                 std::uint64_t seed);

template <typename T>
std::vector<T> pick(std::span<const T> items, std::span<const std::size_t> indices) {
  std::vector<T> out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back(items[i]);
  return out;
}

std::vector<Message> sample_by_rate(std::span<const Message> msgs, double rate,
                                    std::uint64_t seed);
std::vector<Message> sample_by_count(std::span<const Message> msgs, std::size_t n,
                                     std::uint64_t seed);

}  // namespace opinion

#include "opinion/corpus.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>

#include "opinion/error.hpp"
#include "opinion/rng.hpp"
#include "opinion/text.hpp"

namespace opinion {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Platform p) {
  switch (p) {
    case Platform::twitter: return "twitter";
    case Platform::nunl: return "nunl";
    case Platform::reddit: return "reddit";
  }
  return "twitter";
}

std::optional<Platform> parse_platform(std::string_view s) {
  if (s == "twitter") return Platform::twitter;
  if (s == "nunl" || s == "nu.nl") return Platform::nunl;
  if (s == "reddit") return Platform::reddit;
  return std::nullopt;
}

std::optional<CorpusFormat> parse_corpus_format(std::string_view s) {
  if (s == "jsonl") return CorpusFormat::jsonl;
  if (s == "tsv") return CorpusFormat::tsv;
  return std::nullopt;
}

CorpusFormat guess_corpus_format(const std::filesystem::path& path) {
  const auto ext = path.extension();
  return (ext == ".tsv" || ext == ".tab") ? CorpusFormat::tsv : CorpusFormat::jsonl;
}

// --- stats -----------------------------------------------------------------

void CorpusStats::add(const Message& m) {
  ++total;
  ++per_day[std::chrono::floor<std::chrono::days>(m.timestamp)];
  ++per_platform[m.platform];
}

void CorpusStats::merge(const CorpusStats& other) {
  total += other.total;
  rejected += other.rejected;
  for (const auto& [d, n] : other.per_day) per_day[d] += n;
  for (const auto& [p, n] : other.per_platform) per_platform[p] += n;
}

std::string CorpusStats::to_json() const {
  ordered_json j;
  j["total"] = total;
  j["rejected"] = rejected;
  ordered_json days = ordered_json::object();
  for (const auto& [d, n] : per_day) days[format_date(d)] = n;
  j["per_day"] = std::move(days);
  ordered_json platforms = ordered_json::object();
  for (const auto& [p, n] : per_platform) platforms[std::string(to_string(p))] = n;
  j["per_platform"] = std::move(platforms);
  return j.dump();
}

// --- line codecs -------------------------------------------------------------

namespace {

bool finish_message(Message& m, std::string& reason) {
  if (text::trim(m.text).empty()) {
    reason = "missing text";
    return false;
  }
  if (m.id.empty()) {
    reason = "missing id";
    return false;
  }
  m.lang = text::fold_case(m.lang);
  if (m.lang.empty()) m.lang = "und";
  return true;
}

}  // namespace

bool parse_jsonl_message(std::string_view line, Message& out, std::string& reason) {
  json j = json::parse(line.begin(), line.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    reason = "malformed JSON";
    return false;
  }
  Message m;

  const auto id = j.find("id");
  if (id == j.end()) {
    reason = "missing id";
    return false;
  }
  if (id->is_string()) {
    m.id = id->get<std::string>();
  } else if (id->is_number_integer()) {
    m.id = std::to_string(id->get<long long>());
  } else {
    reason = "id is neither string nor integer";
    return false;
  }

  const auto created = j.find("created_at");
  std::optional<Timestamp> ts;
  if (created != j.end()) {
    if (created->is_string()) {
      ts = parse_timestamp(created->get_ref<const std::string&>());
    } else if (created->is_number_integer()) {
      ts = Timestamp{std::chrono::seconds{created->get<long long>()}};
    }
  }
  if (!ts) {
    reason = "unparseable timestamp";
    return false;
  }
  m.timestamp = *ts;

  const auto txt = j.find("text");
  if (txt == j.end() || !txt->is_string()) {
    reason = "missing text";
    return false;
  }
  m.text = txt->get<std::string>();

  if (const auto lang = j.find("lang"); lang != j.end() && lang->is_string()) {
    m.lang = lang->get<std::string>();
  }
  if (const auto plat = j.find("platform"); plat != j.end()) {
    const auto p = plat->is_string() ? parse_platform(plat->get_ref<const std::string&>())
                                     : std::nullopt;
    if (!p) {
      reason = "unknown platform";
      return false;
    }
    m.platform = *p;
  }
  for (const char* key : {"retweet", "is_repost"}) {
    if (const auto rt = j.find(key); rt != j.end() && rt->is_boolean()) {
      m.is_repost = rt->get<bool>();
    }
  }
  if (!finish_message(m, reason)) return false;
  out = std::move(m);
  return true;
}

std::string escape_tsv_field(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string unescape_tsv_field(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\' || i + 1 == s.size()) {
      out.push_back(s[i]);
      continue;
    }
    switch (s[++i]) {
      case 't': out.push_back('\t'); break;
      case 'n': out.push_back('\n'); break;
      case 'r': out.push_back('\r'); break;
      case '\\': out.push_back('\\'); break;
      default:
        out.push_back('\\');
        out.push_back(s[i]);
    }
  }
  return out;
}

bool parse_tsv_message(std::string_view line, Message& out, std::string& reason) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string_view> cols;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    cols.push_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  if (cols.size() < 5 || cols.size() > 6) {
    reason = "expected 5 or 6 tab-separated columns";
    return false;
  }
  Message m;
  m.id = std::string(cols[0]);
  const auto ts = parse_timestamp(cols[1]);
  if (!ts) {
    reason = "unparseable timestamp";
    return false;
  }
  m.timestamp = *ts;
  m.text = unescape_tsv_field(cols[2]);
  m.lang = std::string(cols[3]);
  const auto p = parse_platform(cols[4]);
  if (!p) {
    reason = "unknown platform";
    return false;
  }
  m.platform = *p;
  if (cols.size() == 6) {
    if (cols[5] == "1" || cols[5] == "true") {
      m.is_repost = true;
    } else if (!(cols[5] == "0" || cols[5] == "false" || cols[5].empty())) {
      reason = "retweet column must be 0/1/true/false";
      return false;
    }
  }
  if (!finish_message(m, reason)) return false;
  out = std::move(m);
  return true;
}

std::string to_jsonl(const Message& m) {
  ordered_json j;
  j["id"] = m.id;
  j["created_at"] = format_timestamp(m.timestamp);
  j["text"] = m.text;
  j["lang"] = m.lang;
  j["platform"] = std::string(to_string(m.platform));
  j["retweet"] = m.is_repost;
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string to_tsv(const Message& m) {
  std::string out = escape_tsv_field(m.id);
  out += '\t';
  out += format_timestamp(m.timestamp);
  out += '\t';
  out += escape_tsv_field(m.text);
  out += '\t';
  out += m.lang;
  out += '\t';
  out += to_string(m.platform);
  out += '\t';
  out += m.is_repost ? "1" : "0";
  return out;
}

// --- reader / writer ---------------------------------------------------------

MessageReader::MessageReader(const std::filesystem::path& path, CorpusFormat format,
                             DiagnosticSink sink)
    : path_(path), in_(path, std::ios::binary), format_(format), sink_(std::move(sink)) {
  if (!in_ || std::filesystem::is_directory(path)) {
    throw DataError("cannot read corpus file: " + path.string());
  }
}

bool MessageReader::next(Message& out) {
  std::string reason;
  while (std::getline(in_, line_)) {
    ++line_no_;
    std::string_view line = line_;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (text::trim(line).empty()) continue;
    if (format_ == CorpusFormat::tsv && line_no_ == 1 && line.starts_with("id\tcreated_at")) {
      continue;
    }
    const bool ok = format_ == CorpusFormat::jsonl ? parse_jsonl_message(line, out, reason)
                                                   : parse_tsv_message(line, out, reason);
    if (ok) {
      stats_.add(out);
      return true;
    }
    ++stats_.rejected;
    if (sink_) sink_({line_no_, reason});
  }
  if (in_.bad()) throw DataError("read error in corpus file: " + path_.string());
  return false;
}

std::vector<Message> read_messages(const std::filesystem::path& path, CorpusStats* stats,
                                   DiagnosticSink sink) {
  MessageReader reader(path, std::move(sink));
  std::vector<Message> out;
  Message m;
  while (reader.next(m)) out.push_back(std::move(m));
  if (stats) *stats = reader.stats();
  return out;
}

void MessageWriter::write(const Message& m) {
  out_ << (format_ == CorpusFormat::jsonl ? to_jsonl(m) : to_tsv(m)) << '\n';
}

// --- language ----------------------------------------------------------------

bool is_valid_lang_tag(std::string_view tag) {
  if (tag == "und") return true;
  return tag.size() == 2 && std::all_of(tag.begin(), tag.end(),
                                        [](char c) { return c >= 'a' && c <= 'z'; });
}

LangFilter::LangFilter(std::string keep, LangPredicate undetermined)
    : keep_(std::move(keep)), undetermined_(std::move(undetermined)) {
  if (!is_valid_lang_tag(keep_)) throw UsageError("invalid language tag: " + keep_);
}

bool LangFilter::operator()(const Message& m) const {
  if (m.lang == keep_) return true;
  if (m.lang == "und") return undetermined_ ? undetermined_(m) : true;
  return false;
}

namespace {

const std::unordered_set<std::string>& stopwords(std::string_view lang) {
  static const std::unordered_set<std::string> nl = {
      "de", "het", "een", "en", "van", "ik", "je", "dat", "die", "niet", "is", "op",
      "te", "zijn", "met", "voor", "maar", "er", "ook", "als", "nog", "wat", "wel",
      "naar", "dan", "bij", "ze", "heb", "hij", "geen", "moet", "om", "aan", "wij"};
  static const std::unordered_set<std::string> en = {
      "the", "a", "an", "and", "of", "i", "you", "that", "not", "is", "on", "to",
      "be", "with", "for", "but", "there", "also", "as", "what", "it", "are", "was",
      "this", "have", "they", "we", "he", "she", "no", "at", "in", "my", "just"};
  static const std::unordered_set<std::string> none;
  if (lang == "nl") return nl;
  if (lang == "en") return en;
  return none;
}

}  // namespace

LangPredicate stopword_lang_predicate(std::string keep) {
  return [keep = std::move(keep)](const Message& m) {
    const auto tokens = text::tokenize(m.text);
    auto votes = [&](std::string_view lang) {
      const auto& sw = stopwords(lang);
      return std::count_if(tokens.begin(), tokens.end(),
                           [&](const std::string& t) { return sw.contains(t); });
    };
    const auto own = votes(keep);
    for (std::string_view other : {"nl", "en"}) {
      if (other != keep && votes(other) > own) return false;
    }
    return true;
  };
}

std::vector<Message> filter_lang(std::span<const Message> msgs, const LangFilter& filter) {
  std::vector<Message> out;
  std::copy_if(msgs.begin(), msgs.end(), std::back_inserter(out), std::cref(filter));
  return out;
}

// --- dedup ---------------------------------------------------------------------

std::optional<DedupMode> parse_dedup_mode(std::string_view s) {
  if (s == "by_id" || s == "id") return DedupMode::by_id;
  if (s == "by_exact_text" || s == "text") return DedupMode::by_exact_text;
  return std::nullopt;
}

bool Deduplicator::admit(const Message& m) {
  if (mode_ == DedupMode::by_id) {
    std::string key(1, static_cast<char>('0' + static_cast<int>(m.platform)));
    key += m.id;
    return seen_.insert(std::move(key)).second;
  }
  return seen_.emplace(text::trim(m.text)).second;
}

std::vector<Message> dedup(std::span<const Message> msgs, DedupMode mode) {
  Deduplicator d(mode);
  std::vector<Message> out;
  for (const auto& m : msgs) {
    if (d.admit(m)) out.push_back(m);
  }
  return out;
}

// --- sampling --------------------------------------------------------------------

std::vector<std::size_t> sample_indices_by_rate(std::size_t population, double rate,
                                                std::uint64_t seed) {
  if (!(rate > 0.0 && rate <= 1.0)) {
    throw UsageError("sample rate must be in (0, 1], got " + std::to_string(rate));
  }
  std::vector<std::size_t> out;
  if (rate == 1.0) {
    out.resize(population);
    for (std::size_t i = 0; i < population; ++i) out[i] = i;
    return out;
  }
  Rng rng(seed);
  for (std::size_t i = 0; i < population; ++i) {
    if (rng.bernoulli(rate)) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> sample_indices_by_count(std::size_t population, std::size_t n,
                                                 std::uint64_t seed) {
  if (n > population) {
    throw DataError("cannot sample " + std::to_string(n) + " items from a population of " +
                    std::to_string(population));
  }
  // Selection sampling: visit items in order, keep each with probability
  // (still needed) / (still available).
  Rng rng(seed);
  std::vector<std::size_t> out;
  out.reserve(n);
  for (std::size_t i = 0; i < population && out.size() < n; ++i) {
    const std::size_t needed = n - out.size();
    const std::size_t available = population - i;
    if (rng.below(available) < needed) out.push_back(i);
  }
  return out;
}

std::vector<Message> sample_by_rate(std::span<const Message> msgs, double rate,
                                    std::uint64_t seed) {
  const auto idx = sample_indices_by_rate(msgs.size(), rate, seed);
  return pick(msgs, std::span<const std::size_t>(idx));
}

std::vector<Message> sample_by_count(std::span<const Message> msgs, std::size_t n,
                                     std::uint64_t seed) {
  const auto idx = sample_indices_by_count(msgs.size(), n, seed);
  return pick(msgs, std::span<const std::size_t>(idx));
}

}  // namespace opinion

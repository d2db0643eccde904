// filter, expand-query, sentiment, annotate-sample
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <unordered_set>

#include "app.hpp"
#include "opinion/annotation.hpp"
#include "opinion/collocation.hpp"
#include "opinion/csv.hpp"
#include "opinion/error.hpp"
#include "opinion/format.hpp"
#include "opinion/polarity.hpp"
#include "opinion/query.hpp"
#include "opinion/series.hpp"
#include "opinion/text.hpp"

namespace opinionkit {

using namespace opinion;

namespace {

// Message-level preprocessing flags shared by the corpus-reading commands.
struct Prefilter {
  std::string lang;
  bool lang_heuristic = false;
  std::string dedup;
  bool count_reposts = true;

  void add_to(CLI::App& app) {
    app.add_option("--lang", lang, "Keep only messages with this language tag (und is kept)");
    app.add_flag("--lang-heuristic", lang_heuristic,
                 "Judge untagged (und) messages by a stopword vote instead of keeping them");
    app.add_option("--dedup", dedup, "Drop repeats: id or text")
        ->check(CLI::IsMember({"id", "text"}));
    app.add_flag("--count-reposts,!--no-reposts", count_reposts,
                 "Count reposts (default) or drop them with --no-reposts");
  }
};

// Stateful predicate built from the prefilter flags.
class MessageGate {
 public:
  explicit MessageGate(const Prefilter& p) : count_reposts_(p.count_reposts) {
    if (!p.lang.empty()) {
      if (!is_valid_lang_tag(p.lang)) throw UsageError("--lang: invalid tag '" + p.lang + "'");
      lang_.emplace(p.lang, p.lang_heuristic ? stopword_lang_predicate(p.lang) : LangPredicate{});
    }
    if (!p.dedup.empty())
      dedup_.emplace(p.dedup == "id" ? DedupMode::by_id : DedupMode::by_exact_text);
  }

  bool admit(const Message& m) {
    if (!count_reposts_ && m.is_repost) return false;
    if (lang_ && !(*lang_)(m)) return false;
    if (dedup_ && !dedup_->admit(m)) return false;
    return true;
  }

 private:
  bool count_reposts_;
  std::optional<LangFilter> lang_;
  std::optional<Deduplicator> dedup_;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

CorpusFormat output_format(const std::string& flag, const std::string& path) {
  if (flag.empty()) return guess_corpus_format(path);
  auto f = parse_corpus_format(flag);
  if (!f) throw UsageError("--out-format: expected jsonl or tsv, got '" + flag + "'");
  return *f;
}

// ---- filter ----

struct FilterArgs {
  std::vector<std::string> inputs;
  std::string query, out, unmatched, out_format, stats;
  Prefilter pre;
};

void run_filter(Context& ctx, const FilterArgs& a) {
  const TopicQuery query = TopicQuery::load(a.query);
  MessageGate gate(a.pre);

  AtomicOutput matched_file(a.out);
  MessageWriter matched(matched_file.stream(), output_format(a.out_format, a.out));
  std::optional<AtomicOutput> unmatched_file;
  std::optional<MessageWriter> unmatched;
  if (!a.unmatched.empty()) {
    unmatched_file.emplace(a.unmatched);
    unmatched.emplace(unmatched_file->stream(), output_format(a.out_format, a.unmatched));
  }

  std::uint64_t n_matched = 0, n_unmatched = 0, n_dropped = 0;
  const CorpusStats stats = for_each_message(
      a.inputs,
      [&](const Message& m) {
        if (!gate.admit(m)) {
          ++n_dropped;
          return;
        }
        if (query.matches(m.text)) {
          ++n_matched;
          matched.write(m);
        } else {
          ++n_unmatched;
          if (unmatched) unmatched->write(m);
        }
      },
      ctx.log);

  std::optional<AtomicOutput> stats_file;
  if (!a.stats.empty()) {
    stats_file.emplace(a.stats);
    stats_file->stream() << stats.to_json() << "\n";
  }
  matched_file.commit();
  if (unmatched_file) unmatched_file->commit();
  if (stats_file) stats_file->commit();

  std::cout << "matched=" << n_matched << " unmatched=" << n_unmatched
            << " dropped=" << n_dropped << " rejected=" << stats.rejected << "\n";
  ctx.log.event("filter", "\"query\":" + json_string(query.name()) +
                              ",\"matched\":" + std::to_string(n_matched) +
                              ",\"unmatched\":" + std::to_string(n_unmatched));
}

// ---- expand-query ----

struct ExpandArgs {
  std::vector<std::string> inputs;
  std::string query, out, query_out, accept;
  int rounds = 1;
  std::uint64_t min_count = 5;
  std::size_t top_k = 20;
  bool interactive = false;
  Prefilter pre;
};

std::vector<std::string> ask_reviewer(const ExpansionRound& round) {
  std::cerr << "round " << round.round << ": " << round.matched_messages << " matched, "
            << round.unmatched_messages << " unmatched\n";
  for (const auto& c : round.candidates)
    std::cerr << "  " << c.token << "\tt=" << format_double(c.t) << "\tmatched=" << c.count_matched
              << "\tunmatched=" << c.count_unmatched << "\n";
  std::cerr << "terms to add (comma separated, empty for none): " << std::flush;
  std::string line;
  if (!std::getline(std::cin, line)) return {};
  std::vector<std::string> picked;
  for (auto& t : split_list(line)) {
    const auto folded = text::fold_case(text::trim(t));
    if (!folded.empty()) picked.push_back(folded);
  }
  return picked;
}

void run_expand(Context& ctx, const ExpandArgs& a) {
  if (a.rounds < 1) throw UsageError("--rounds must be at least 1");
  const TopicQuery query = TopicQuery::load(a.query);
  MessageGate gate(a.pre);
  std::vector<Message> msgs;
  for_each_message(a.inputs, [&](const Message& m) { if (gate.admit(m)) msgs.push_back(m); },
                   ctx.log);

  std::unordered_set<std::string> allowed;
  for (const auto& t : split_list(a.accept)) allowed.insert(text::fold_case(t));

  ExpansionReviewer reviewer;
  if (a.interactive) {
    reviewer = ask_reviewer;
  } else if (!allowed.empty()) {
    reviewer = [&](const ExpansionRound& round) {
      std::vector<std::string> picked;
      for (const auto& c : round.candidates)
        if (allowed.count(c.token)) picked.push_back(c.token);
      return picked;
    };
  }

  RankOptions options;
  options.min_count = a.min_count;
  options.top_k = a.top_k;
  const auto rounds = expand_query(query, msgs, a.rounds, options, reviewer);

  nlohmann::ordered_json report;
  report["query"] = query.name();
  report["messages"] = msgs.size();
  report["min_count"] = a.min_count;
  report["top_k"] = a.top_k;
  report["rounds"] = nlohmann::ordered_json::array();
  std::vector<std::string> added;
  for (const auto& r : rounds) {
    nlohmann::ordered_json jr;
    jr["round"] = r.round;
    jr["keywords"] = r.query_keywords;
    jr["matched"] = r.matched_messages;
    jr["unmatched"] = r.unmatched_messages;
    jr["candidates"] = nlohmann::ordered_json::array();
    for (const auto& c : r.candidates) {
      nlohmann::ordered_json jc;
      jc["token"] = c.token;
      jc["t"] = c.t;
      jc["count_matched"] = c.count_matched;
      jc["count_unmatched"] = c.count_unmatched;
      jc["n_matched"] = c.n_matched;
      jc["n_unmatched"] = c.n_unmatched;
      jr["candidates"].push_back(std::move(jc));
    }
    jr["accepted"] = r.accepted;
    added.insert(added.end(), r.accepted.begin(), r.accepted.end());
    report["rounds"].push_back(std::move(jr));
  }
  const TopicQuery expanded = query.with_keywords(added);
  report["final_keywords"] = expanded.keywords();

  AtomicOutput out(a.out);
  out.stream() << report.dump(2) << "\n";
  std::optional<AtomicOutput> qout;
  if (!a.query_out.empty()) {
    qout.emplace(a.query_out);
    qout->stream() << expanded.to_json() << "\n";
  }
  out.commit();
  if (qout) qout->commit();

  if (!rounds.empty()) {
    std::cout << "round " << rounds.back().round << " candidates:";
    for (const auto& c : rounds.back().candidates) std::cout << ' ' << c.token;
    std::cout << "\n";
  }
}

// ---- sentiment ----

struct SentimentArgs {
  std::vector<std::string> inputs;
  std::string lexicon, query, out, summary, series;
  bool nonzero_only = false;
  TimeOptions time;
  Prefilter pre;
};

void run_sentiment(Context& ctx, const SentimentArgs& a) {
  if (a.out.empty() && a.summary.empty() && a.series.empty())
    throw UsageError("nothing to write: give --out, --series or --summary");
  const PolarityLexicon lexicon = PolarityLexicon::load(a.lexicon);
  std::optional<TopicQuery> query;
  if (!a.query.empty()) query = TopicQuery::load(a.query);
  MessageGate gate(a.pre);
  const TzOffset tz = parse_tz_flag(a.time.tz);
  const auto g = parse_granularity(a.time.bucket);
  if (!g) throw UsageError("--bucket: expected hour, day, week or month, got '" + a.time.bucket + "'");

  std::optional<AtomicOutput> scores;
  if (!a.out.empty()) {
    scores.emplace(a.out);
    scores->stream() << "id,timestamp,value,hits\n";
  }
  MeanSeriesBuilder series(*g, tz);
  PolaritySummary summary;

  for_each_message(
      a.inputs,
      [&](const Message& m) {
        if (!gate.admit(m)) return;
        if (query && !query->matches(m.text)) return;
        const PolarityScore s = score(lexicon, m.text);
        summary.add(s);
        if (scores)
          scores->stream() << csv_field(m.id) << ',' << format_timestamp(m.timestamp) << ','
                           << format_double(s.value) << ',' << s.hits << '\n';
        if (!(a.nonzero_only && s.is_zero)) series.add(m.timestamp, s.value);
      },
      ctx.log);

  std::optional<AtomicOutput> summary_file, series_file;
  if (!a.summary.empty()) {
    summary_file.emplace(a.summary);
    nlohmann::ordered_json j;
    j["lexicon"] = lexicon.name();
    j["entries"] = lexicon.entry_count();
    j["messages"] = summary.count();
    j["mean"] = summary.mean(false);
    j["mean_nonzero"] = summary.mean(true);
    j["nonzero_fraction"] = summary.nonzero_fraction();
    summary_file->stream() << j.dump(2) << "\n";
  }
  if (!a.series.empty()) {
    series_file.emplace(a.series);
    write_mean_csv(series_file->stream(), series.finish());
  }
  if (scores) scores->commit();
  if (summary_file) summary_file->commit();
  if (series_file) series_file->commit();

  std::cout << "messages=" << summary.count()
            << " mean=" << format_double(summary.mean(a.nonzero_only))
            << " nonzero_fraction=" << format_double(summary.nonzero_fraction()) << "\n";
}

// ---- annotate-sample ----

struct AnnotateArgs {
  std::vector<std::string> inputs;
  std::string query, out;
  std::optional<double> rate;
  std::optional<std::size_t> count;
  Prefilter pre;
};

void run_annotate(Context& ctx, const AnnotateArgs& a) {
  if (a.rate.has_value() == a.count.has_value())
    throw UsageError("give exactly one of --rate and --n");
  if (a.rate && !(*a.rate > 0.0 && *a.rate <= 1.0))
    throw UsageError("--rate must be in (0, 1]");
  const TopicQuery query = TopicQuery::load(a.query);
  MessageGate gate(a.pre);
  std::vector<Message> msgs;
  for_each_message(a.inputs, [&](const Message& m) { if (gate.admit(m)) msgs.push_back(m); },
                   ctx.log);
  SampleSpec spec;
  spec.rate = a.rate;
  spec.count = a.count;
  const auto selection = prepare_annotation_set(msgs, query, spec, ctx.common.seed);
  AtomicOutput out(a.out);
  write_annotation_template(out.stream(), selection, query, ctx.common.seed);
  out.commit();
  std::cout << "selected=" << selection.size() << "\n";
  ctx.log.event("annotate-sample", "\"selected\":" + std::to_string(selection.size()) +
                                       ",\"seed\":" + std::to_string(ctx.common.seed));
}

}  // namespace

void register_text_commands(CLI::App& root, std::vector<Command>& out, Context& ctx) {
  {
    auto args = std::make_shared<FilterArgs>();
    auto* app = root.add_subcommand("filter", "Select on-topic messages with a keyword/regex query");
    app->add_option("--in", args->inputs, "Message files (JSONL or TSV)")->required()
        ->check(CLI::ExistingFile);
    app->add_option("--query", args->query, "Query JSON {name, keywords, regex, combine}")
        ->required()->check(CLI::ExistingFile);
    app->add_option("--out", args->out, "Matched messages")->required();
    app->add_option("--unmatched", args->unmatched, "Also write the unmatched messages here");
    app->add_option("--out-format", args->out_format, "jsonl or tsv (default: from extension)");
    app->add_option("--stats", args->stats, "Write corpus statistics JSON here");
    args->pre.add_to(*app);
    add_common_options(*app, ctx.common);
    out.push_back({app, [args](Context& c) { run_filter(c, *args); }});
  }
  {
    auto args = std::make_shared<ExpandArgs>();
    auto* app = root.add_subcommand(
        "expand-query", "Rank candidate query terms by t-score of matched vs unmatched messages");
    app->add_option("--in", args->inputs, "Message files")->required()->check(CLI::ExistingFile);
    app->add_option("--query", args->query, "Starting query JSON")->required()
        ->check(CLI::ExistingFile);
    app->add_option("--out", args->out, "Report JSON with the candidates of every round")
        ->required();
    app->add_option("--query-out", args->query_out, "Write the query with accepted terms here");
    app->add_option("--rounds", args->rounds, "Number of expansion rounds")->capture_default_str();
    app->add_option("--min-count", args->min_count, "Minimum count in matched messages")
        ->capture_default_str();
    app->add_option("--top-k", args->top_k, "Candidates per round (0 = all)")
        ->capture_default_str();
    app->add_option("--accept", args->accept,
                    "Comma-separated terms a reviewer accepts when they appear as candidates");
    app->add_flag("--interactive", args->interactive,
                  "Ask for accepted terms on stdin after each round");
    args->pre.add_to(*app);
    add_common_options(*app, ctx.common);
    out.push_back({app, [args](Context& c) { run_expand(c, *args); }});
  }
  {
    auto args = std::make_shared<SentimentArgs>();
    auto* app = root.add_subcommand("sentiment", "Score message polarity with a lexicon");
    app->add_option("--in", args->inputs, "Message files")->required()->check(CLI::ExistingFile);
    app->add_option("--lexicon", args->lexicon, "Lexicon TSV term<TAB>score")->required()
        ->check(CLI::ExistingFile);
    app->add_option("--query", args->query, "Score only messages matching this query")
        ->check(CLI::ExistingFile);
    app->add_option("--out", args->out, "Per-message scores CSV id,timestamp,value,hits");
    app->add_option("--summary", args->summary, "Summary JSON (mean, nonzero fraction)");
    app->add_option("--series", args->series, "Mean score per bucket CSV bucket,mean,n");
    app->add_flag("--nonzero-only", args->nonzero_only,
                  "Leave zero-score messages out of the bucket means");
    add_time_options(*app, args->time, "hour, day, week or month");
    args->pre.add_to(*app);
    add_common_options(*app, ctx.common);
    out.push_back({app, [args](Context& c) { run_sentiment(c, *args); }});
  }
  {
    auto args = std::make_shared<AnnotateArgs>();
    auto* app = root.add_subcommand(
        "annotate-sample", "Filter, dedup by text and sample messages into a label template");
    app->add_option("--in", args->inputs, "Message files")->required()->check(CLI::ExistingFile);
    app->add_option("--query", args->query, "Query JSON")->required()->check(CLI::ExistingFile);
    app->add_option("--out", args->out, "Label template TSV")->required();
    app->add_option("--rate", args->rate, "Sampling rate in (0, 1]");
    app->add_option("--n", args->count, "Exact sample size");
    args->pre.add_to(*app);
    add_common_options(*app, ctx.common);
    out.push_back({app, [args](Context& c) { run_annotate(c, *args); }});
  }
}

}  // namespace opinionkit

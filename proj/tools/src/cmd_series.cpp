// timeseries, stance-series, correlate
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "app.hpp"
#include "opinion/csv.hpp"
#include "opinion/error.hpp"
#include "opinion/format.hpp"
#include "opinion/labels.hpp"
#include "opinion/series.hpp"
#include "opinion/text.hpp"

namespace opinionkit {

using namespace opinion;

namespace {

Granularity granularity_flag(const std::string& value, bool allow_hour) {
  const auto g = parse_granularity(value);
  if (!g || (!allow_hour && *g == Granularity::hour))
    throw UsageError("--bucket: unsupported value '" + value + "'");
  return *g;
}

// Reads a CSV with a header row, handing each data row's fields to `row`.
template <typename Row>
void for_each_csv_row(const std::string& path, Row&& row) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1 || text::trim(line).empty()) continue;
    row(split_csv_line(line), lineno);
  }
}

Timestamp timestamp_field(const std::vector<std::string>& f, const std::string& path,
                          std::size_t lineno) {
  if (f.size() < 2) throw ParseError(path, lineno, "missing timestamp column");
  const auto t = parse_timestamp(f[1]);
  if (!t) throw ParseError(path, lineno, "unparseable timestamp '" + f[1] + "'");
  return *t;
}

// ---- timeseries ----

struct TimeseriesArgs {
  std::vector<std::string> inputs;
  std::string scores, series, out, events, events_out;
  bool nonzero_only = false, count_reposts = true, centered = false;
  std::size_t ma = 0, column = 1;
  TimeOptions time;
};

void run_timeseries(Context& ctx, const TimeseriesArgs& a) {
  const int sources = !a.inputs.empty() + !a.scores.empty() + !a.series.empty();
  if (sources != 1)
    throw UsageError("give exactly one of --in (message counts), --scores (mean polarity) and "
                     "--series (an existing series)");
  const TzOffset tz = parse_tz_flag(a.time.tz);
  Granularity g = granularity_flag(a.time.bucket, true);

  Series series;
  if (!a.series.empty()) {
    series = read_series_csv(a.series, a.column);
    g = series.granularity;
  } else if (!a.inputs.empty()) {
    FrequencyCounter counter(g, tz);
    for_each_message(
        a.inputs,
        [&](const Message& m) {
          if (a.count_reposts || !m.is_repost) counter.add(m.timestamp);
        },
        ctx.log);
    series = counter.finish();
  } else {
    MeanSeriesBuilder builder(g, tz);
    for_each_csv_row(a.scores, [&](const std::vector<std::string>& f, std::size_t lineno) {
      if (f.size() < 4) throw ParseError(a.scores, lineno, "expected id,timestamp,value,hits");
      const Timestamp t = timestamp_field(f, a.scores, lineno);
      double v = 0.0;
      std::uint64_t hits = 0;
      try {
        v = std::stod(f[2]);
        hits = std::stoull(f[3]);
      } catch (const std::exception&) {
        throw ParseError(a.scores, lineno, "unparseable value or hits");
      }
      if (a.nonzero_only && (hits == 0 || v == 0.0)) return;
      builder.add(t, v);
    });
    series = builder.finish();
  }

  AtomicOutput out(a.out);
  if (a.ma > 0) {
    write_smoothed_csv(out.stream(), moving_average(series, a.ma, a.centered));
  } else if (!a.inputs.empty()) {
    write_frequency_csv(out.stream(), series);
  } else {
    write_mean_csv(out.stream(), series);
  }

  std::optional<AtomicOutput> events_file;
  if (!a.events.empty()) {
    const auto events = load_events(a.events);
    const auto annotation = annotate_events(series, events);
    if (!a.events_out.empty()) {
      events_file.emplace(a.events_out);
      events_file->stream() << annotation.to_json(g) << "\n";
    } else {
      std::cout << annotation.to_json(g) << "\n";
    }
    if (!annotation.out_of_range.empty())
      std::cerr << "note: " << annotation.out_of_range.size()
                << " events fall outside the series range\n";
  }
  out.commit();
  if (events_file) events_file->commit();
  ctx.log.event("timeseries", "\"buckets\":" + std::to_string(series.points.size()) +
                                  ",\"granularity\":" + json_string(to_string(g)) +
                                  ",\"tz\":" + json_string(tz.str()));
}

// ---- stance-series ----

struct StanceSeriesArgs {
  std::string predictions, out;
  TimeOptions time;
};

void run_stance_series(Context& ctx, const StanceSeriesArgs& a) {
  const TzOffset tz = parse_tz_flag(a.time.tz);
  const Granularity g = granularity_flag(a.time.bucket, false);
  StanceSeriesBuilder builder(g, tz);
  for_each_csv_row(a.predictions, [&](const std::vector<std::string>& f, std::size_t lineno) {
    if (f.size() < 3) throw ParseError(a.predictions, lineno, "expected id,timestamp,label,...");
    const Timestamp t = timestamp_field(f, a.predictions, lineno);
    const auto label = parse_label(f[2]);
    if (!label) throw ParseError(a.predictions, lineno, "unknown label '" + f[2] + "'");
    builder.add(t, *label);
  });
  const auto rates = builder.finish();
  AtomicOutput out(a.out);
  write_stance_csv(out.stream(), rates, g);
  out.commit();
  ctx.log.event("stance-series", "\"buckets\":" + std::to_string(rates.size()));
}

// ---- correlate ----

struct CorrelateArgs {
  std::string a, b, out;
  std::size_t column_a = 1, column_b = 1;
};

void run_correlate(Context&, const CorrelateArgs& args) {
  const Series a = read_series_csv(args.a, args.column_a);
  const Series b = read_series_csv(args.b, args.column_b);
  if (a.granularity != b.granularity)
    throw DataError("series have different bucket sizes: " + args.a + " is " +
                    std::string(to_string(a.granularity)) + ", " + args.b + " is " +
                    std::string(to_string(b.granularity)));
  const Correlation c = correlate(a, b);
  if (!args.out.empty()) {
    nlohmann::ordered_json j;
    j["r"] = c.r;
    j["n_overlap"] = c.n_overlap;
    j["n_a"] = a.points.size();
    j["n_b"] = b.points.size();
    AtomicOutput out(args.out);
    out.stream() << j.dump(2) << "\n";
    out.commit();
  }
  std::cout << "r=" << format_double(c.r) << " n_overlap=" << c.n_overlap << "\n";
}

}  // namespace

void register_series_commands(CLI::App& root, std::vector<Command>& out, Context& ctx) {
  {
    auto args = std::make_shared<TimeseriesArgs>();
    auto* app = root.add_subcommand(
        "timeseries", "Message counts, mean polarity or an existing series per time bucket, optionally smoothed");
    app->add_option("--in", args->inputs, "Message files: count messages per bucket")
        ->check(CLI::ExistingFile);
    app->add_option("--scores", args->scores,
                    "Scores CSV from `sentiment --out`: mean polarity per bucket")
        ->check(CLI::ExistingFile);
    app->add_option("--series", args->series,
                    "Existing series CSV (bucket or date in column 0) to smooth or annotate; "
                    "its granularity replaces --bucket")
        ->check(CLI::ExistingFile);
    app->add_option("--column", args->column, "Value column of --series (0-based)")
        ->capture_default_str();
    app->add_option("--out", args->out, "Series CSV")->required();
    app->add_flag("--nonzero-only", args->nonzero_only,
                  "With --scores, leave zero-score messages out of the means");
    app->add_flag("--count-reposts,!--no-reposts", args->count_reposts,
                  "With --in, count reposts (default) or drop them");
    app->add_option("--ma", args->ma, "Moving-average window in buckets (0 = off)")
        ->capture_default_str();
    app->add_flag("--centered", args->centered, "Centre the moving-average window");
    app->add_option("--events", args->events, "Events JSON [{date,label}] to place on the series")
        ->check(CLI::ExistingFile);
    app->add_option("--events-out", args->events_out, "Event markers JSON (default: stdout)");
    add_time_options(*app, args->time, "hour, day, week or month");
    add_common_options(*app, ctx.common);
    out.push_back({app, [args](Context& c) { run_timeseries(c, *args); }});
  }
  {
    auto args = std::make_shared<StanceSeriesArgs>();
    auto* app = root.add_subcommand("stance-series",
                                    "Label proportions per time bucket from `predict` output");
    app->add_option("--in", args->predictions, "Predictions CSV id,timestamp,label,...")
        ->required()->check(CLI::ExistingFile);
    app->add_option("--out", args->out, "CSV bucket,support,reject,other,n")->required();
    add_time_options(*app, args->time, "day, week or month");
    add_common_options(*app, ctx.common);
    out.push_back({app, [args](Context& c) { run_stance_series(c, *args); }});
  }
  {
    auto args = std::make_shared<CorrelateArgs>();
    auto* app = root.add_subcommand("correlate", "Pearson r of two series over shared buckets");
    app->add_option("--a", args->a, "First series CSV (bucket or date in column 0)")->required()
        ->check(CLI::ExistingFile);
    app->add_option("--b", args->b, "Second series CSV")->required()->check(CLI::ExistingFile);
    app->add_option("--column-a", args->column_a, "Value column of --a (0-based)")
        ->capture_default_str();
    app->add_option("--column-b", args->column_b, "Value column of --b (0-based)")
        ->capture_default_str();
    app->add_option("--out", args->out, "Also write {r, n_overlap} JSON here");
    add_common_options(*app, ctx.common);
    out.push_back({app, [args](Context& c) { run_correlate(c, *args); }});
  }
}

}  // namespace opinionkit

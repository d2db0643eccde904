#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "opinion/labels.hpp"
#include "opinion/time.hpp"

namespace opinion {

enum class Granularity { hour, day, week, month };

std::string_view to_string(Granularity g);
std::optional<Granularity> parse_granularity(std::string_view s);

// Integer bucket key in local (offset) time. Keys increase with time; hour,
// day and month keys are consecutive integers, week keys are the day key of
// the week's Monday (so consecutive weeks differ by 7).
using BucketKey = std::int64_t;

BucketKey bucket_of(Timestamp t, Granularity g, TzOffset offset);
BucketKey bucket_of_date(std::chrono::sys_days d, Granularity g);
BucketKey next_bucket(BucketKey k, Granularity g);
// hour "YYYY-MM-DDTHH", day "YYYY-MM-DD", week: its Monday "YYYY-MM-DD",
// month "YYYY-MM".
std::string bucket_label(BucketKey k, Granularity g);
std::optional<BucketKey> parse_bucket_label(std::string_view s, Granularity g);

struct SeriesPoint {
  BucketKey bucket = 0;
  double value = 0.0;
  std::uint64_t n = 0;
  bool partial = false;  // set by moving_average for incomplete windows
};

struct Series {
  Granularity granularity = Granularity::day;
  std::vector<SeriesPoint> points;  // strictly increasing buckets

  std::optional<double> value_at(BucketKey k) const;
};

// Message counts per bucket. Empty buckets between the first and the last
// are emitted with n = 0 and value = 0.
class FrequencyCounter {
 public:
  FrequencyCounter(Granularity g, TzOffset offset) : g_(g), offset_(offset) {}
  void add(Timestamp t) { ++counts_[bucket_of(t, g_, offset_)]; }
  void merge(const FrequencyCounter& other);
  Series finish() const;

 private:
  Granularity g_;
  TzOffset offset_;
  std::map<BucketKey, std::uint64_t> counts_;
};

// Mean value per bucket; buckets without data are omitted.
class MeanSeriesBuilder {
 public:
  MeanSeriesBuilder(Granularity g, TzOffset offset) : g_(g), offset_(offset) {}
  void add(Timestamp t, double value);
  void merge(const MeanSeriesBuilder& other);
  Series finish() const;

 private:
  struct Acc {
    double sum = 0.0;
    std::uint64_t n = 0;
  };
  Granularity g_;
  TzOffset offset_;
  std::map<BucketKey, Acc> acc_;
};

struct StanceRates {
  BucketKey bucket = 0;
  double support_rate = 0.0;
  double reject_rate = 0.0;
  double other_rate = 0.0;
  std::uint64_t n = 0;
};

// Label proportions per bucket; empty buckets are omitted.
class StanceSeriesBuilder {
 public:
  StanceSeriesBuilder(Granularity g, TzOffset offset) : g_(g), offset_(offset) {}
  void add(Timestamp t, Label label) { ++counts_[bucket_of(t, g_, offset_)][index(label)]; }
  void merge(const StanceSeriesBuilder& other);
  std::vector<StanceRates> finish() const;
  Granularity granularity() const { return g_; }

 private:
  Granularity g_;
  TzOffset offset_;
  std::map<BucketKey, std::array<std::uint64_t, kNumLabels>> counts_;
};

// Trailing mean over the last `window` points (or a centred window). Points
// whose window is cut off by the series edge carry the mean of what is
// available and are flagged partial.
Series moving_average(const Series& s, std::size_t window, bool centered = false);

struct Correlation {
  double r = 0.0;
  std::size_t n_overlap = 0;
};

// Pearson r over the buckets present in both series. Throws DataError when
// fewer than two buckets overlap or either side has zero variance.
Correlation correlate(const Series& a, const Series& b);

// CSV of date,value rows, one per date; an optional header line is skipped.
// Throws ParseError on unparseable or duplicate dates.
Series load_external_series(const std::filesystem::path& path);

// First column bucket label, value taken from column `value_column`
// (0-based). Granularity is inferred from the label shape; dates are read as
// weeks when there are at least two and every one is a Monday.
Series read_series_csv(const std::filesystem::path& path, std::size_t value_column = 1);

struct Event {
  std::chrono::sys_days date;
  std::string label;
};

struct EventMarker {
  BucketKey bucket;
  Event event;
};

struct EventAnnotation {
  std::vector<EventMarker> markers;
  std::vector<Event> out_of_range;

  std::string to_json(Granularity g) const;
};

// Attaches each event to the bucket containing its date. Events before the
// first or after the last bucket are listed under out_of_range.
EventAnnotation annotate_events(const Series& s, std::span<const Event> events);

// JSON array of {"date":"YYYY-MM-DD","label":..}.
std::vector<Event> load_events(const std::filesystem::path& path);

void write_frequency_csv(std::ostream& out, const Series& s);
void write_mean_csv(std::ostream& out, const Series& s);
void write_stance_csv(std::ostream& out, std::span<const StanceRates> rates, Granularity g);
// bucket,value,n,partial
void write_smoothed_csv(std::ostream& out, const Series& s);

}  // namespace opinion

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "opinion/error.hpp"
#include "opinion/rng.hpp"
#include "opinion/series.hpp"
#include "oracles.hpp"
#include "synth.hpp"

using namespace opinion;
using namespace std::chrono;

namespace {

const std::filesystem::path kData = OPINION_DATA_DIR;
const TzOffset kCet = TzOffset::amsterdam_winter();

Timestamp at(const char* iso) { return *parse_timestamp(iso); }

sys_days ymd(int y, unsigned m, unsigned d) { return sys_days{year{y} / month{m} / d}; }

Series make_series(Granularity g, std::vector<std::pair<BucketKey, double>> pts) {
  Series s;
  s.granularity = g;
  for (auto [k, v] : pts) s.points.push_back({k, v, 1, false});
  return s;
}

Series daily(const std::vector<double>& values, BucketKey first = 18000) {
  std::vector<std::pair<BucketKey, double>> pts;
  for (std::size_t i = 0; i < values.size(); ++i)
    pts.emplace_back(first + static_cast<BucketKey>(i), values[i]);
  return make_series(Granularity::day, pts);
}

std::vector<double> values(const Series& s) {
  std::vector<double> out;
  for (const auto& p : s.points) out.push_back(p.value);
  return out;
}

}  // namespace

// ---- buckets ----

TEST(Buckets, LabelsRoundTrip) {
  for (auto g : {Granularity::hour, Granularity::day, Granularity::week, Granularity::month}) {
    const auto k = bucket_of(at("2020-03-16T12:34:56Z"), g, kCet);
    EXPECT_EQ(parse_bucket_label(bucket_label(k, g), g), k) << to_string(g);
  }
  EXPECT_EQ(bucket_label(bucket_of(at("2020-03-16T12:34:56Z"), Granularity::hour, kCet),
                         Granularity::hour),
            "2020-03-16T13");
  EXPECT_EQ(bucket_label(bucket_of(at("2020-03-16T12:00:00Z"), Granularity::month, kCet),
                         Granularity::month),
            "2020-03");
}

TEST(Buckets, WeeksStartOnMonday) {
  // 2020-03-15 is a Sunday, 2020-03-16 a Monday.
  const auto sun = bucket_of_date(ymd(2020, 3, 15), Granularity::week);
  const auto mon = bucket_of_date(ymd(2020, 3, 16), Granularity::week);
  const auto next_sun = bucket_of_date(ymd(2020, 3, 22), Granularity::week);
  EXPECT_EQ(bucket_label(sun, Granularity::week), "2020-03-09");
  EXPECT_EQ(bucket_label(mon, Granularity::week), "2020-03-16");
  EXPECT_EQ(mon, next_sun);
  EXPECT_EQ(next_bucket(sun, Granularity::week), mon);
}

TEST(Buckets, LocalMidnightUsesOffset) {
  // 23:30 UTC is already the next day in CET.
  const auto k = bucket_of(at("2020-03-15T23:30:00Z"), Granularity::day, kCet);
  EXPECT_EQ(bucket_label(k, Granularity::day), "2020-03-16");
  EXPECT_EQ(bucket_label(bucket_of(at("2020-03-15T23:30:00Z"), Granularity::day, TzOffset{}),
                         Granularity::day),
            "2020-03-15");
}

TEST(Buckets, MonthRollsOverYear) {
  const auto dec = bucket_of_date(ymd(2020, 12, 5), Granularity::month);
  EXPECT_EQ(bucket_label(next_bucket(dec, Granularity::month), Granularity::month), "2021-01");
}

TEST(Buckets, GranularityNames) {
  EXPECT_EQ(parse_granularity("hourly"), Granularity::hour);
  EXPECT_EQ(parse_granularity("week"), Granularity::week);
  EXPECT_FALSE(parse_granularity("fortnight").has_value());
}

// ---- frequencies ----

TEST(Frequency, GapDaysAreZero) {
  FrequencyCounter c(Granularity::day, kCet);
  for (int i = 0; i < 3; ++i) c.add(at("2020-03-13T10:00:00Z"));
  c.add(at("2020-03-15T10:00:00Z"));
  const auto s = c.finish();
  ASSERT_EQ(s.points.size(), 3u);
  EXPECT_EQ(s.points[0].n, 3u);
  EXPECT_EQ(bucket_label(s.points[1].bucket, Granularity::day), "2020-03-14");
  EXPECT_EQ(s.points[1].n, 0u);
  EXPECT_EQ(s.points[1].value, 0.0);
  EXPECT_EQ(s.points[2].n, 1u);
  std::ostringstream out;
  write_frequency_csv(out, s);
  EXPECT_EQ(out.str(), "bucket,n\n2020-03-13,3\n2020-03-14,0\n2020-03-15,1\n");
}

TEST(Frequency, HourBoundary) {
  FrequencyCounter c(Granularity::hour, kCet);
  c.add(at("2020-03-15T13:59:00Z"));  // 14:59 local
  c.add(at("2020-03-15T14:01:00Z"));  // 15:01 local
  const auto s = c.finish();
  ASSERT_EQ(s.points.size(), 2u);
  EXPECT_EQ(bucket_label(s.points[0].bucket, Granularity::hour), "2020-03-15T14");
  EXPECT_EQ(bucket_label(s.points[1].bucket, Granularity::hour), "2020-03-15T15");
}

TEST(Frequency, EmptyInputEmptySeries) {
  EXPECT_TRUE(FrequencyCounter(Granularity::day, kCet).finish().points.empty());
}

TEST(Frequency, ConservationAndShardMerge) {
  FrequencyCounter all(Granularity::day, kCet), a(Granularity::day, kCet),
      b(Granularity::day, kCet);
  const std::uint64_t n = 200000;
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto t = synth::message(i, 0, 37).timestamp;
    all.add(t);
    (i % 3 ? a : b).add(t);
  }
  std::uint64_t total = 0;
  for (const auto& p : all.finish().points) total += p.n;
  EXPECT_EQ(total, n);
  a.merge(b);
  const auto merged = a.finish();
  const auto whole = all.finish();
  ASSERT_EQ(merged.points.size(), whole.points.size());
  for (std::size_t i = 0; i < merged.points.size(); ++i)
    EXPECT_EQ(merged.points[i].n, whole.points[i].n);
}

// ---- mean sentiment ----

TEST(MeanSeries, HandMean) {
  MeanSeriesBuilder b(Granularity::day, kCet);
  b.add(at("2020-03-16T08:00:00Z"), 0.6);
  b.add(at("2020-03-16T09:00:00Z"), -0.7);
  b.add(at("2020-03-16T10:00:00Z"), 0.0);
  const auto s = b.finish();
  ASSERT_EQ(s.points.size(), 1u);
  EXPECT_NEAR(s.points[0].value, -0.1 / 3, 1e-15);
  EXPECT_EQ(s.points[0].n, 3u);
}

TEST(MeanSeries, EmptyBucketsOmitted) {
  MeanSeriesBuilder b(Granularity::day, kCet);
  b.add(at("2020-03-13T08:00:00Z"), 0.5);
  b.add(at("2020-03-15T08:00:00Z"), 0.5);
  EXPECT_EQ(b.finish().points.size(), 2u);
}

TEST(MeanSeries, PlantedDropAtThreePm) {
  MeanSeriesBuilder b(Granularity::hour, kCet);
  Rng rng(3);
  const auto base = at("2020-03-15T00:00:00Z");
  for (int i = 0; i < 24 * 60; ++i) {
    const Timestamp t = base + minutes(i);
    const auto local_hour = (i / 60 + 1) % 24;
    const double v = local_hour < 15 ? 0.3 + 0.1 * rng.uniform() : -0.3 - 0.1 * rng.uniform();
    b.add(t, v);
  }
  const auto s = b.finish();
  double biggest_drop = 0;
  BucketKey at_bucket = 0;
  for (std::size_t i = 1; i < s.points.size(); ++i) {
    const double d = s.points[i - 1].value - s.points[i].value;
    if (d > biggest_drop) {
      biggest_drop = d;
      at_bucket = s.points[i].bucket;
    }
  }
  EXPECT_EQ(bucket_label(at_bucket, Granularity::hour), "2020-03-15T15");
}

// ---- stance shares ----

TEST(StanceSeries, HandRates) {
  StanceSeriesBuilder b(Granularity::week, kCet);
  const auto t = at("2020-03-17T12:00:00Z");
  b.add(t, Label::supports);
  b.add(t, Label::supports);
  b.add(t, Label::rejects);
  b.add(t, Label::other);
  const auto rates = b.finish();
  ASSERT_EQ(rates.size(), 1u);
  EXPECT_EQ(rates[0].support_rate, 0.5);
  EXPECT_EQ(rates[0].reject_rate, 0.25);
  EXPECT_EQ(rates[0].other_rate, 0.25);
  std::ostringstream out;
  write_stance_csv(out, rates, Granularity::week);
  EXPECT_EQ(out.str(), "bucket,support,reject,other,n\n2020-03-16,0.5,0.25,0.25,4\n");
}

TEST(StanceSeries, PlantedMonthlyTrajectory) {
  StanceSeriesBuilder b(Granularity::month, kCet);
  const std::vector<double> planted = {0.95, 0.85, 0.75, 0.65, 0.55, 0.45};
  for (std::size_t m = 0; m < planted.size(); ++m) {
    const auto first = sys_seconds(ymd(2020, 3 + static_cast<unsigned>(m), 2));
    const int supports = static_cast<int>(std::lround(planted[m] * 1000));
    for (int i = 0; i < 1000; ++i)
      b.add(first + minutes(7 * i), i < supports ? Label::supports : Label::rejects);
  }
  const auto rates = b.finish();
  ASSERT_EQ(rates.size(), planted.size());
  for (std::size_t m = 0; m < planted.size(); ++m) {
    EXPECT_NEAR(rates[m].support_rate, planted[m], 1e-9);
    EXPECT_NEAR(rates[m].support_rate + rates[m].reject_rate + rates[m].other_rate, 1.0, 1e-12);
    if (m > 0) EXPECT_LT(rates[m].support_rate, rates[m - 1].support_rate);
  }
  EXPECT_EQ(bucket_label(rates.front().bucket, Granularity::month), "2020-03");
}

// ---- smoothing ----

TEST(MovingAverage, CenterOfRamp) {
  const auto s = moving_average(daily({1, 2, 3, 4, 5, 6, 7}), 7);
  EXPECT_EQ(s.points.back().value, 4.0);
  EXPECT_FALSE(s.points.back().partial);
  EXPECT_TRUE(s.points.front().partial);
}

TEST(MovingAverage, WindowOneIsIdentity) {
  const auto in = daily({0.3, -0.2, 0.9, 0.1});
  const auto out = moving_average(in, 1);
  EXPECT_EQ(values(out), values(in));
  for (const auto& p : out.points) EXPECT_FALSE(p.partial);
}

TEST(MovingAverage, StaysWithinRange) {
  Rng rng(4);
  std::vector<double> v;
  for (int i = 0; i < 200; ++i) v.push_back(rng.uniform() * 2 - 1);
  const auto lo = *std::min_element(v.begin(), v.end());
  const auto hi = *std::max_element(v.begin(), v.end());
  for (bool centered : {false, true}) {
    for (std::size_t w : {2u, 3u, 7u, 30u}) {
      const auto s = moving_average(daily(v), w, centered);
      ASSERT_EQ(s.points.size(), v.size());
      for (const auto& p : s.points) {
        EXPECT_GE(p.value, lo);
        EXPECT_LE(p.value, hi);
      }
    }
  }
}

TEST(MovingAverage, CenteredWindowIsSymmetric) {
  const auto s = moving_average(daily({1, 2, 3, 4, 5, 6, 7}), 3, true);
  EXPECT_EQ(s.points[3].value, 4.0);
  EXPECT_FALSE(s.points[3].partial);
  EXPECT_TRUE(s.points[0].partial);
  EXPECT_TRUE(s.points[6].partial);
}

TEST(MovingAverage, ZeroWindowRejected) {
  EXPECT_THROW(moving_average(daily({1}), 0), UsageError);
}

// ---- correlation ----

TEST(Correlate, SelfAndNegation) {
  const auto a = daily({0.1, 0.5, -0.2, 0.3});
  EXPECT_NEAR(correlate(a, a).r, 1.0, 1e-15);
  const auto neg = daily({-0.1, -0.5, 0.2, -0.3});
  EXPECT_NEAR(correlate(a, neg).r, -1.0, 1e-15);
}

TEST(Correlate, HandValue) {
  const auto r = correlate(daily({1, 2, 3}), daily({2, 4, 7}));
  EXPECT_NEAR(r.r, 0.99339926779878, 1e-12);
  EXPECT_NEAR(r.r, oracle::pearson({1, 2, 3}, {2, 4, 7}), 1e-12);
  EXPECT_EQ(r.n_overlap, 3u);
}

TEST(Correlate, OnlyOverlappingBuckets) {
  const auto a = daily({1, 2, 3, 10}, 100);
  const auto b = daily({5, 2, 4, 7}, 101);
  const auto r = correlate(a, b);
  EXPECT_EQ(r.n_overlap, 3u);
  EXPECT_NEAR(r.r, oracle::pearson({2, 3, 10}, {5, 2, 4}), 1e-12);
}

TEST(Correlate, SymmetricAndAffineInvariant) {
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x, y, z;
    for (int i = 0; i < 20; ++i) {
      x.push_back(rng.uniform());
      y.push_back(rng.uniform());
    }
    for (double v : x) z.push_back(3.5 * v - 2.0);
    const double rxy = correlate(daily(x), daily(y)).r;
    EXPECT_NEAR(rxy, correlate(daily(y), daily(x)).r, 1e-12);
    EXPECT_NEAR(rxy, correlate(daily(z), daily(y)).r, 1e-12);
    EXPECT_NEAR(rxy, oracle::pearson(x, y), 1e-12);
    EXPECT_LE(std::abs(rxy), 1.0);
  }
}

TEST(Correlate, DegenerateAndShortSeries) {
  EXPECT_THROW(correlate(daily({1, 1, 1}), daily({1, 2, 3})), DataError);
  EXPECT_THROW(correlate(daily({1}), daily({2})), DataError);
  EXPECT_THROW(correlate(daily({1, 2}, 0), daily({1, 2}, 10)), DataError);
}

// ---- external series and events ----

TEST(External, ThreeRows) {
  synth::TempDir dir;
  const auto p = dir.path() / "ext.csv";
  synth::write_file(p, "date,value\n2020-03-15,10\n2020-03-13,4.5\n2020-03-14,7\n");
  const auto s = load_external_series(p);
  ASSERT_EQ(s.points.size(), 3u);
  EXPECT_EQ(bucket_label(s.points[0].bucket, Granularity::day), "2020-03-13");
  EXPECT_EQ(values(s), (std::vector<double>{4.5, 7, 10}));
}

TEST(External, DuplicateDateNamesLine) {
  synth::TempDir dir;
  const auto p = dir.path() / "ext.csv";
  synth::write_file(p, "2020-03-13,1\n2020-03-14,2\n2020-03-13,3\n");
  try {
    load_external_series(p);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(External, BadValueNamesLine) {
  synth::TempDir dir;
  const auto p = dir.path() / "ext.csv";
  synth::write_file(p, "date,value\n2020-03-13,abc\n");
  try {
    load_external_series(p);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(External, WrittenSeriesReadsBack) {
  MeanSeriesBuilder b(Granularity::week, kCet);
  b.add(at("2020-03-17T12:00:00Z"), 0.25);
  b.add(at("2020-03-25T12:00:00Z"), -0.5);
  const auto s = b.finish();
  synth::TempDir dir;
  const auto p = dir.path() / "mean.csv";
  std::ostringstream out;
  write_mean_csv(out, s);
  synth::write_file(p, out.str());
  const auto back = read_series_csv(p);
  EXPECT_EQ(back.granularity, Granularity::week);
  EXPECT_EQ(values(back), values(s));
  ASSERT_EQ(back.points.size(), 2u);
  EXPECT_EQ(back.points[0].n, 1u);
}

TEST(Events, MarkersAndOutOfRange) {
  FrequencyCounter c(Granularity::day, kCet);
  c.add(at("2020-03-13T10:00:00Z"));
  c.add(at("2020-03-20T10:00:00Z"));
  const auto s = c.finish();
  const std::vector<Event> events = {{ymd(2020, 3, 15), "persconferentie"},
                                     {ymd(2020, 6, 1), "later"}};
  const auto ann = annotate_events(s, events);
  ASSERT_EQ(ann.markers.size(), 1u);
  EXPECT_EQ(bucket_label(ann.markers[0].bucket, Granularity::day), "2020-03-15");
  ASSERT_EQ(ann.out_of_range.size(), 1u);
  EXPECT_EQ(ann.out_of_range[0].label, "later");
}

TEST(Events, WeekMarkerLandsOnMonday) {
  MeanSeriesBuilder b(Granularity::week, kCet);
  b.add(at("2020-03-10T10:00:00Z"), 0.1);
  b.add(at("2020-03-24T10:00:00Z"), 0.2);
  const std::vector<Event> events = {{ymd(2020, 3, 19), "x"}};
  const auto ann = annotate_events(b.finish(), events);
  ASSERT_EQ(ann.markers.size(), 1u);
  EXPECT_EQ(bucket_label(ann.markers[0].bucket, Granularity::week), "2020-03-16");
}

TEST(Events, ShippedPressConferences) {
  const auto events = load_events(kData / "events/press_conferences.json");
  EXPECT_EQ(events.size(), 27u);
  for (std::size_t i = 1; i < events.size(); ++i) EXPECT_LE(events[i - 1].date, events[i].date);
  for (const auto& e : events) EXPECT_FALSE(e.label.empty());
}

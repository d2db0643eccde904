#include "opinion/series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>

#include "opinion/csv.hpp"
#include "opinion/error.hpp"
#include "opinion/format.hpp"
#include "opinion/text.hpp"

namespace opinion {

using text::trim;

namespace {

using std::chrono::days;
using std::chrono::sys_days;
using std::chrono::year_month_day;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t b) { return a - floor_div(a, b) * b; }

// 1970-01-01 was a Thursday, three days after a Monday.
std::int64_t monday_of(std::int64_t day) { return day - floor_mod(day + 3, 7); }

BucketKey month_key(sys_days d) {
  year_month_day ymd{d};
  return static_cast<std::int64_t>(static_cast<int>(ymd.year())) * 12 +
         static_cast<unsigned>(ymd.month()) - 1;
}

sys_days day_from_key(std::int64_t k) { return sys_days{days{k}}; }

std::string two_digits(long v) {
  std::string s = std::to_string(v);
  return s.size() < 2 ? "0" + s : s;
}

std::string four_digits(long v) {
  std::string s = std::to_string(v < 0 ? -v : v);
  while (s.size() < 4) s.insert(s.begin(), '0');
  return v < 0 ? "-" + s : s;
}

template <class Int>
bool parse_int(std::string_view s, Int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_real(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

std::optional<Granularity> infer_granularity(std::string_view label) {
  if (label.size() == 13 && label[10] == 'T') return Granularity::hour;
  if (label.size() == 10) return Granularity::day;
  if (label.size() == 7) return Granularity::month;
  return std::nullopt;
}

std::string path_name(const std::filesystem::path& p) { return p.string(); }

}  // namespace

std::string_view to_string(Granularity g) {
  switch (g) {
    case Granularity::hour: return "hour";
    case Granularity::day: return "day";
    case Granularity::week: return "week";
    case Granularity::month: return "month";
  }
  return "day";
}

std::optional<Granularity> parse_granularity(std::string_view s) {
  if (s == "hour" || s == "hourly") return Granularity::hour;
  if (s == "day" || s == "daily") return Granularity::day;
  if (s == "week" || s == "weekly") return Granularity::week;
  if (s == "month" || s == "monthly") return Granularity::month;
  return std::nullopt;
}

BucketKey bucket_of(Timestamp t, Granularity g, TzOffset offset) {
  const std::int64_t local = t.time_since_epoch().count() +
                             std::int64_t{offset.minutes().count()} * 60;
  if (g == Granularity::hour) return floor_div(local, 3600);
  return bucket_of_date(sys_days{days{floor_div(local, 86400)}}, g);
}

BucketKey bucket_of_date(sys_days d, Granularity g) {
  const std::int64_t day = d.time_since_epoch().count();
  switch (g) {
    case Granularity::hour: return day * 24;
    case Granularity::day: return day;
    case Granularity::week: return monday_of(day);
    case Granularity::month: return month_key(d);
  }
  return day;
}

BucketKey next_bucket(BucketKey k, Granularity g) {
  return g == Granularity::week ? k + 7 : k + 1;
}

std::string bucket_label(BucketKey k, Granularity g) {
  switch (g) {
    case Granularity::hour:
      return format_date(day_from_key(floor_div(k, 24))) + "T" + two_digits(floor_mod(k, 24));
    case Granularity::day:
    case Granularity::week:
      return format_date(day_from_key(k));
    case Granularity::month:
      return four_digits(static_cast<long>(floor_div(k, 12))) + "-" +
             two_digits(static_cast<long>(floor_mod(k, 12) + 1));
  }
  return {};
}

std::optional<BucketKey> parse_bucket_label(std::string_view s, Granularity g) {
  s = trim(s);
  switch (g) {
    case Granularity::hour: {
      if (s.size() != 13 || s[10] != 'T') return std::nullopt;
      auto d = parse_date(s.substr(0, 10));
      int h = 0;
      if (!d || !parse_int(s.substr(11), h) || h < 0 || h > 23) return std::nullopt;
      return d->time_since_epoch().count() * 24 + h;
    }
    case Granularity::day:
    case Granularity::week: {
      if (s.size() != 10) return std::nullopt;
      auto d = parse_date(s);
      if (!d) return std::nullopt;
      return bucket_of_date(*d, g);
    }
    case Granularity::month: {
      if (s.size() != 7 || s[4] != '-') return std::nullopt;
      int y = 0;
      unsigned m = 0;
      if (!parse_int(s.substr(0, 4), y) || !parse_int(s.substr(5), m) || m < 1 || m > 12)
        return std::nullopt;
      return std::int64_t{y} * 12 + m - 1;
    }
  }
  return std::nullopt;
}

std::optional<double> Series::value_at(BucketKey k) const {
  auto it = std::lower_bound(points.begin(), points.end(), k,
                             [](const SeriesPoint& p, BucketKey key) { return p.bucket < key; });
  if (it == points.end() || it->bucket != k) return std::nullopt;
  return it->value;
}

// ---- builders ----

void FrequencyCounter::merge(const FrequencyCounter& other) {
  for (const auto& [k, n] : other.counts_) counts_[k] += n;
}

Series FrequencyCounter::finish() const {
  Series s;
  s.granularity = g_;
  if (counts_.empty()) return s;
  const BucketKey last = counts_.rbegin()->first;
  auto it = counts_.begin();
  for (BucketKey k = counts_.begin()->first; k <= last; k = next_bucket(k, g_)) {
    std::uint64_t n = 0;
    if (it != counts_.end() && it->first == k) {
      n = it->second;
      ++it;
    }
    s.points.push_back({k, static_cast<double>(n), n, false});
  }
  return s;
}

void MeanSeriesBuilder::add(Timestamp t, double value) {
  Acc& a = acc_[bucket_of(t, g_, offset_)];
  a.sum += value;
  ++a.n;
}

void MeanSeriesBuilder::merge(const MeanSeriesBuilder& other) {
  for (const auto& [k, a] : other.acc_) {
    Acc& mine = acc_[k];
    mine.sum += a.sum;
    mine.n += a.n;
  }
}

Series MeanSeriesBuilder::finish() const {
  Series s;
  s.granularity = g_;
  for (const auto& [k, a] : acc_) {
    if (a.n == 0) continue;
    s.points.push_back({k, a.sum / static_cast<double>(a.n), a.n, false});
  }
  return s;
}

void StanceSeriesBuilder::merge(const StanceSeriesBuilder& other) {
  for (const auto& [k, c] : other.counts_) {
    auto& mine = counts_[k];
    for (std::size_t i = 0; i < kNumLabels; ++i) mine[i] += c[i];
  }
}

std::vector<StanceRates> StanceSeriesBuilder::finish() const {
  std::vector<StanceRates> out;
  for (const auto& [k, c] : counts_) {
    const std::uint64_t n = c[0] + c[1] + c[2];
    if (n == 0) continue;
    const double dn = static_cast<double>(n);
    out.push_back({k, static_cast<double>(c[index(Label::supports)]) / dn,
                   static_cast<double>(c[index(Label::rejects)]) / dn,
                   static_cast<double>(c[index(Label::other)]) / dn, n});
  }
  return out;
}

// ---- smoothing and correlation ----

Series moving_average(const Series& s, std::size_t window, bool centered) {
  if (window == 0) throw UsageError("moving average window must be at least 1");
  Series out;
  out.granularity = s.granularity;
  const std::size_t m = s.points.size();
  out.points.reserve(m);
  const std::size_t before = centered ? window / 2 : window - 1;
  const std::size_t after = centered ? window - 1 - before : 0;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t lo = i >= before ? i - before : 0;
    const std::size_t hi = std::min(m - 1, i + after);
    double sum = 0.0;
    std::uint64_t n = 0;
    for (std::size_t j = lo; j <= hi; ++j) {
      sum += s.points[j].value;
      n += s.points[j].n;
    }
    const std::size_t count = hi - lo + 1;
    double mean = sum / static_cast<double>(count);
    // Keep the mean inside the window's range despite rounding.
    double mn = s.points[lo].value, mx = mn;
    for (std::size_t j = lo; j <= hi; ++j) {
      mn = std::min(mn, s.points[j].value);
      mx = std::max(mx, s.points[j].value);
    }
    mean = std::clamp(mean, mn, mx);
    out.points.push_back({s.points[i].bucket, mean, n, count < window});
  }
  return out;
}

Correlation correlate(const Series& a, const Series& b) {
  std::vector<double> xs, ys;
  auto ia = a.points.begin();
  auto ib = b.points.begin();
  while (ia != a.points.end() && ib != b.points.end()) {
    if (ia->bucket < ib->bucket) {
      ++ia;
    } else if (ib->bucket < ia->bucket) {
      ++ib;
    } else {
      xs.push_back(ia->value);
      ys.push_back(ib->value);
      ++ia;
      ++ib;
    }
  }
  const std::size_t n = xs.size();
  if (n < 2)
    throw DataError("correlation needs at least 2 overlapping buckets, found " +
                    std::to_string(n));
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DataError("degenerate series");
  double r = sxy / (std::sqrt(sxx) * std::sqrt(syy));
  r = std::clamp(r, -1.0, 1.0);
  return {r, n};
}

// ---- external inputs ----

Series load_external_series(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path_name(path));
  Series s;
  s.granularity = Granularity::day;
  std::set<BucketKey> seen;
  std::string line;
  std::size_t lineno = 0;
  bool any_row = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    auto date = parse_date(fields[0]);
    if (!date) {
      if (!any_row && lineno == 1) continue;  // header
      throw ParseError(path_name(path), lineno, "unparseable date '" + fields[0] + "'");
    }
    any_row = true;
    double v = 0.0;
    if (fields.size() < 2 || !parse_real(fields[1], v))
      throw ParseError(path_name(path), lineno, "unparseable value");
    const BucketKey k = bucket_of_date(*date, Granularity::day);
    if (!seen.insert(k).second)
      throw ParseError(path_name(path), lineno, "duplicate date " + format_date(*date));
    s.points.push_back({k, v, 1, false});
  }
  std::sort(s.points.begin(), s.points.end(),
            [](const SeriesPoint& x, const SeriesPoint& y) { return x.bucket < y.bucket; });
  return s;
}

Series read_series_csv(const std::filesystem::path& path, std::size_t value_column) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path_name(path));
  Series s;
  std::optional<Granularity> g;
  std::optional<std::size_t> n_column;
  std::set<BucketKey> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (lineno == 1 && !infer_granularity(trim(fields[0]))) {
      for (std::size_t i = 0; i < fields.size(); ++i)
        if (trim(fields[i]) == "n") n_column = i;
      continue;
    }
    const std::string_view label = trim(fields[0]);
    if (!g) {
      g = infer_granularity(label);
      if (!g) throw ParseError(path_name(path), lineno, "unrecognized bucket '" +
                                                            std::string(label) + "'");
    }
    auto k = parse_bucket_label(label, *g);
    if (!k) throw ParseError(path_name(path), lineno, "unparseable bucket '" +
                                                          std::string(label) + "'");
    if (!seen.insert(*k).second)
      throw ParseError(path_name(path), lineno, "duplicate bucket " + std::string(label));
    double v = 0.0;
    if (fields.size() <= value_column || !parse_real(fields[value_column], v))
      throw ParseError(path_name(path), lineno, "unparseable value");
    std::uint64_t n = 1;
    if (n_column && *n_column < fields.size()) {
      if (!parse_int(trim(fields[*n_column]), n))
        throw ParseError(path_name(path), lineno, "unparseable count");
    }
    s.points.push_back({*k, v, n, false});
  }
  s.granularity = g.value_or(Granularity::day);
  std::sort(s.points.begin(), s.points.end(),
            [](const SeriesPoint& x, const SeriesPoint& y) { return x.bucket < y.bucket; });
  // Week labels are dates too; a series of two or more Mondays is weekly.
  if (s.granularity == Granularity::day && s.points.size() >= 2 &&
      std::all_of(s.points.begin(), s.points.end(), [](const SeriesPoint& p) {
        return bucket_of_date(std::chrono::sys_days{std::chrono::days{p.bucket}},
                              Granularity::week) == p.bucket;
      })) {
    s.granularity = Granularity::week;
  }
  return s;
}

// ---- events ----

std::vector<Event> load_events(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path_name(path));
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path_name(path) + ": " + e.what());
  }
  if (!j.is_array()) throw DataError(path_name(path) + ": expected a JSON array of events");
  std::vector<Event> events;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    if (!e.is_object() || !e.contains("date") || !e["date"].is_string())
      throw DataError(path_name(path) + ": event " + std::to_string(i) + " has no date");
    auto d = parse_date(e["date"].get<std::string>());
    if (!d)
      throw DataError(path_name(path) + ": event " + std::to_string(i) + " has bad date '" +
                      e["date"].get<std::string>() + "'");
    std::string label;
    if (e.contains("label") && e["label"].is_string()) label = e["label"].get<std::string>();
    events.push_back({*d, std::move(label)});
  }
  return events;
}

EventAnnotation annotate_events(const Series& s, std::span<const Event> events) {
  EventAnnotation out;
  for (const Event& e : events) {
    const BucketKey k = bucket_of_date(e.date, s.granularity);
    if (s.points.empty() || k < s.points.front().bucket || k > s.points.back().bucket) {
      out.out_of_range.push_back(e);
      continue;
    }
    out.markers.push_back({k, e});
  }
  return out;
}

std::string EventAnnotation::to_json(Granularity g) const {
  nlohmann::ordered_json j;
  j["markers"] = nlohmann::ordered_json::array();
  for (const auto& m : markers) {
    nlohmann::ordered_json e;
    e["bucket"] = bucket_label(m.bucket, g);
    e["date"] = format_date(m.event.date);
    e["label"] = m.event.label;
    j["markers"].push_back(std::move(e));
  }
  j["out_of_range"] = nlohmann::ordered_json::array();
  for (const auto& ev : out_of_range) {
    nlohmann::ordered_json e;
    e["date"] = format_date(ev.date);
    e["label"] = ev.label;
    j["out_of_range"].push_back(std::move(e));
  }
  return j.dump(2);
}

// ---- writers ----

void write_frequency_csv(std::ostream& out, const Series& s) {
  out << "bucket,n\n";
  for (const auto& p : s.points) out << bucket_label(p.bucket, s.granularity) << ',' << p.n << '\n';
}

void write_mean_csv(std::ostream& out, const Series& s) {
  out << "bucket,mean,n\n";
  for (const auto& p : s.points)
    out << bucket_label(p.bucket, s.granularity) << ',' << format_double(p.value) << ',' << p.n
        << '\n';
}

void write_stance_csv(std::ostream& out, std::span<const StanceRates> rates, Granularity g) {
  out << "bucket,support,reject,other,n\n";
  for (const auto& r : rates)
    out << bucket_label(r.bucket, g) << ',' << format_double(r.support_rate) << ','
        << format_double(r.reject_rate) << ',' << format_double(r.other_rate) << ',' << r.n
        << '\n';
}

void write_smoothed_csv(std::ostream& out, const Series& s) {
  out << "bucket,value,n,partial\n";
  for (const auto& p : s.points)
    out << bucket_label(p.bucket, s.granularity) << ',' << format_double(p.value) << ',' << p.n
        << ',' << (p.partial ? 1 : 0) << '\n';
}

}  // namespace opinion

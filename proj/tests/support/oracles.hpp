#pragma once

// Straightforward reference computations used as test oracles. They share no
// code with the library: counts are rebuilt from raw inputs and formulas are
// written out longhand, in long double where it helps.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace oracle {

// Labels as plain ints 0 = supports, 1 = rejects, 2 = other.

inline double kappa(const std::vector<int>& a, const std::vector<int>& b) {
  const long double n = static_cast<long double>(a.size());
  long double agree = 0;
  long double ca[3] = {0, 0, 0}, cb[3] = {0, 0, 0};
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) agree += 1;
    ca[a[i]] += 1;
    cb[b[i]] += 1;
  }
  const long double po = agree / n;
  long double pe = 0;
  for (int k = 0; k < 3; ++k) pe += (ca[k] / n) * (cb[k] / n);
  if (pe == 1) return 1.0;
  return static_cast<double>((po - pe) / (1 - pe));
}

inline double accuracy(const std::vector<int>& gold, const std::vector<int>& pred) {
  std::size_t hit = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) hit += gold[i] == pred[i];
  return static_cast<double>(hit) / static_cast<double>(gold.size());
}

// Reject/support ratio of the predicted labels over that of the gold labels.
inline std::optional<double> fraction_score(const std::vector<int>& gold,
                                            const std::vector<int>& pred) {
  double gs = 0, gr = 0, ps = 0, pr = 0;
  for (int g : gold) {
    if (g == 0) gs += 1;
    if (g == 1) gr += 1;
  }
  for (int p : pred) {
    if (p == 0) ps += 1;
    if (p == 1) pr += 1;
  }
  if (gs == 0 || ps == 0) return std::nullopt;
  const double r_gold = gr / gs;
  const double r_pred = pr / ps;
  if (r_gold == 0) return std::nullopt;
  return r_pred / r_gold;
}

// t-score of a token over two pre-tokenized sides.
struct TScore {
  std::string token;
  std::uint64_t count_matched = 0;
  double t = 0;
};

inline std::vector<TScore> tscores(const std::vector<std::vector<std::string>>& matched,
                                   const std::vector<std::vector<std::string>>& unmatched,
                                   std::uint64_t min_count) {
  std::map<std::string, std::uint64_t> cm, cu;
  std::uint64_t n1 = 0, n2 = 0;
  for (const auto& doc : matched)
    for (const auto& t : doc) {
      ++cm[t];
      ++n1;
    }
  for (const auto& doc : unmatched)
    for (const auto& t : doc) {
      ++cu[t];
      ++n2;
    }
  std::vector<TScore> out;
  for (const auto& [tok, c1] : cm) {
    if (c1 < min_count) continue;
    const long double p1 = static_cast<long double>(c1) / n1;
    const long double p2 = cu.count(tok) ? static_cast<long double>(cu[tok]) / n2 : 0.0L;
    const long double se = std::sqrt(p1 / n1 + p2 / n2);
    out.push_back({tok, c1, static_cast<double>((p1 - p2) / se)});
  }
  return out;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const long double n = static_cast<long double>(x.size());
  long double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const long double mx = sx / n, my = sy / n;
  long double num = 0, dx2 = 0, dy2 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - mx) * (y[i] - my);
    dx2 += (x[i] - mx) * (x[i] - mx);
    dy2 += (y[i] - my) * (y[i] - my);
  }
  return static_cast<double>(num / std::sqrt(dx2 * dy2));
}

inline double mean(const std::vector<double>& v) {
  long double s = 0;
  for (double x : v) s += x;
  return static_cast<double>(s / static_cast<long double>(v.size()));
}

}  // namespace oracle

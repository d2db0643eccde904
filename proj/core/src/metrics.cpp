#include "opinion/metrics.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>

#include "opinion/error.hpp"

namespace opinion {

using nlohmann::ordered_json;

namespace {

ordered_json matrix_json(const Confusion& m) {
  ordered_json rows = ordered_json::array();
  for (const auto& row : m) rows.push_back(row);
  return rows;
}

ordered_json optional_json(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json counts_json(const std::array<std::uint64_t, kNumLabels>& c) {
  ordered_json j;
  for (auto l : kLabelOrder) j[std::string(to_string(l))] = c[index(l)];
  return j;
}

std::optional<double> ratio(std::uint64_t rejects, std::uint64_t supports) {
  if (supports == 0) return std::nullopt;
  return static_cast<double>(rejects) / static_cast<double>(supports);
}

}  // namespace

AgreementReport cohen_kappa(std::span<const Label> a, std::span<const Label> b) {
  if (a.size() != b.size()) {
    throw DataError("kappa needs equal-length label sequences, got " + std::to_string(a.size()) +
                    " and " + std::to_string(b.size()));
  }
  if (a.empty()) throw DataError("kappa needs at least one labelled item");

  AgreementReport r;
  r.n = a.size();
  for (std::size_t i = 0; i < a.size(); ++i) ++r.table[index(a[i])][index(b[i])];

  const double n = static_cast<double>(r.n);
  std::uint64_t agree = 0;
  double expected = 0.0;
  for (std::size_t k = 0; k < kNumLabels; ++k) {
    agree += r.table[k][k];
    std::uint64_t row = 0, col = 0;
    for (std::size_t j = 0; j < kNumLabels; ++j) {
      row += r.table[k][j];
      col += r.table[j][k];
    }
    expected += (static_cast<double>(row) / n) * (static_cast<double>(col) / n);
  }
  r.observed_agreement = static_cast<double>(agree) / n;
  r.expected_agreement = expected;
  r.kappa = expected < 1.0 ? (r.observed_agreement - expected) / (1.0 - expected) : 1.0;
  return r;
}

std::string AgreementReport::to_json() const {
  ordered_json j;
  j["kappa"] = kappa;
  j["observed_agreement"] = observed_agreement;
  j["expected_agreement"] = expected_agreement;
  j["n"] = n;
  j["label_order"] = {"supports", "rejects", "other"};
  j["table"] = matrix_json(table);
  return j.dump(2);
}

EvaluationReport evaluate_predictions(std::span<const Label> gold,
                                      std::span<const Label> predicted) {
  if (gold.size() != predicted.size()) {
    throw DataError("evaluation needs one prediction per gold label");
  }
  if (gold.empty()) throw DataError("evaluation needs a non-empty test set");
  EvaluationReport r;
  r.n = gold.size();
  std::uint64_t correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    ++r.confusion[index(gold[i])][index(predicted[i])];
    ++r.gold_counts[index(gold[i])];
    ++r.predicted_counts[index(predicted[i])];
    if (gold[i] == predicted[i]) ++correct;
  }
  r.accuracy = static_cast<double>(correct) / static_cast<double>(r.n);
  r.r_gold = ratio(r.gold_counts[index(Label::rejects)], r.gold_counts[index(Label::supports)]);
  r.r_pred = ratio(r.predicted_counts[index(Label::rejects)],
                   r.predicted_counts[index(Label::supports)]);
  if (r.r_gold && r.r_pred && *r.r_gold > 0.0) r.fraction_score = *r.r_pred / *r.r_gold;
  return r;
}

std::string EvaluationReport::to_json() const {
  ordered_json j;
  j["n"] = n;
  j["accuracy"] = accuracy;
  j["fraction_score"] = optional_json(fraction_score);
  j["r_gold"] = optional_json(r_gold);
  j["r_pred"] = optional_json(r_pred);
  j["gold_counts"] = counts_json(gold_counts);
  j["predicted_counts"] = counts_json(predicted_counts);
  j["label_order"] = {"supports", "rejects", "other"};
  j["confusion"] = matrix_json(confusion);
  return j.dump(2);
}

double symmetric_fraction(const EvaluationReport& r) {
  if (!r.fraction_score || *r.fraction_score <= 0.0) return 0.0;
  const double f = *r.fraction_score;
  return std::min(f, 1.0 / f);
}

std::optional<Objective> parse_objective(std::string_view s) {
  if (s == "accuracy") return Objective::accuracy;
  if (s == "fraction_score" || s == "fraction") return Objective::fraction_score;
  return std::nullopt;
}

std::string_view to_string(Objective o) {
  return o == Objective::accuracy ? "accuracy" : "fraction_score";
}

double objective_value(const EvaluationReport& r, Objective o) {
  return o == Objective::accuracy ? r.accuracy : symmetric_fraction(r);
}

}  // namespace opinion

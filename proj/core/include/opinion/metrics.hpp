#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "opinion/labels.hpp"

namespace opinion {

using Confusion = std::array<std::array<std::uint64_t, kNumLabels>, kNumLabels>;

struct AgreementReport {
  double kappa = 0.0;
  double observed_agreement = 0.0;
  double expected_agreement = 0.0;
  std::size_t n = 0;
  Confusion table{};  // [a][b]

  std::string to_json() const;
};

// Cohen's kappa with marginal-product chance agreement. When both raters use
// one identical label throughout (p_e = 1) the agreement is perfect and
// kappa is reported as 1. Throws DataError on length mismatch or empty input.
AgreementReport cohen_kappa(std::span<const Label> a, std::span<const Label> b);

// Per-item accuracy plus the reject/support ratio comparison.
//
// r = #rejects / #supports, counted over supports and rejects only; "other"
// never enters r. fraction_score = r_pred / r_gold. Any ratio that would
// divide by zero is reported as undefined rather than 0 or infinity.
struct EvaluationReport {
  std::size_t n = 0;
  double accuracy = 0.0;
  Confusion confusion{};  // [gold][predicted]
  std::array<std::uint64_t, kNumLabels> gold_counts{};
  std::array<std::uint64_t, kNumLabels> predicted_counts{};
  std::optional<double> r_gold;
  std::optional<double> r_pred;
  std::optional<double> fraction_score;

  std::string to_json() const;
};

EvaluationReport evaluate_predictions(std::span<const Label> gold, std::span<const Label> predicted);

// min(f, 1/f): 1 at a perfect ratio, symmetric in over- and under-shoot,
// 0 when f is undefined or 0.
double symmetric_fraction(const EvaluationReport& r);

enum class Objective { accuracy, fraction_score };

std::optional<Objective> parse_objective(std::string_view s);
std::string_view to_string(Objective o);
double objective_value(const EvaluationReport& r, Objective o);

}  // namespace opinion

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace opinion {

// Fixed order; used for matrix layout, probabilities and argmax ties.
enum class Label : std::uint8_t { supports = 0, rejects = 1, other = 2 };

inline constexpr std::size_t kNumLabels = 3;
inline constexpr std::array<Label, kNumLabels> kLabelOrder = {Label::supports, Label::rejects,
                                                              Label::other};

constexpr std::size_t index(Label l) { return static_cast<std::size_t>(l); }

std::string_view to_string(Label l);
// Accepts supports/support/s, rejects/reject/r, other/o in any case.
std::optional<Label> parse_label(std::string_view s);

struct LabeledExample {
  std::string text;
  Label label = Label::other;

  friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
};

// Labels TSV: label<TAB>text, one example per line, text backslash-escaped.
// Blank lines and lines starting with '#' are skipped. Throws ParseError on
// unknown labels, missing text or a missing tab.
std::vector<LabeledExample> load_labeled(const std::filesystem::path& path);
void write_labeled(std::ostream& out, std::span<const LabeledExample> examples);

// Only the label column of a labels TSV (lines may also hold just a label).
std::vector<Label> load_label_column(const std::filesystem::path& path);

std::vector<Label> labels_of(std::span<const LabeledExample> examples);

}  // namespace opinion

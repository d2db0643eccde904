#include "opinion/labels.hpp"

#include <fstream>

#include "opinion/corpus.hpp"
#include "opinion/error.hpp"
#include "opinion/text.hpp"

namespace opinion {

std::string_view to_string(Label l) {
  switch (l) {
    case Label::supports: return "supports";
    case Label::rejects: return "rejects";
    case Label::other: return "other";
  }
  return "other";
}

std::optional<Label> parse_label(std::string_view s) {
  const std::string v = text::fold_case(text::trim(s));
  if (v == "supports" || v == "support" || v == "s") return Label::supports;
  if (v == "rejects" || v == "reject" || v == "r") return Label::rejects;
  if (v == "other" || v == "o") return Label::other;
  return std::nullopt;
}

namespace {

template <typename OnLine>
void for_each_line(const std::filesystem::path& path, OnLine&& on_line) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read labels file: " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view v = line;
    if (!v.empty() && v.back() == '\r') v.remove_suffix(1);
    if (text::trim(v).empty() || v.front() == '#') continue;
    on_line(v, line_no);
  }
}

}  // namespace

std::vector<LabeledExample> load_labeled(const std::filesystem::path& path) {
  std::vector<LabeledExample> out;
  const std::string file = path.string();
  for_each_line(path, [&](std::string_view v, std::size_t line_no) {
    const auto tab = v.find('\t');
    if (tab == std::string_view::npos) throw ParseError(file, line_no, "expected label<TAB>text");
    const auto label = parse_label(v.substr(0, tab));
    if (!label) {
      throw ParseError(file, line_no, "unknown label '" + std::string(v.substr(0, tab)) + "'");
    }
    std::string body = unescape_tsv_field(v.substr(tab + 1));
    if (text::trim(body).empty()) throw ParseError(file, line_no, "empty text");
    out.push_back({std::move(body), *label});
  });
  return out;
}

std::vector<Label> load_label_column(const std::filesystem::path& path) {
  std::vector<Label> out;
  const std::string file = path.string();
  for_each_line(path, [&](std::string_view v, std::size_t line_no) {
    const auto field = v.substr(0, v.find('\t'));
    const auto label = parse_label(field);
    if (!label) throw ParseError(file, line_no, "unknown label '" + std::string(field) + "'");
    out.push_back(*label);
  });
  return out;
}

void write_labeled(std::ostream& out, std::span<const LabeledExample> examples) {
  for (const auto& e : examples) {
    out << to_string(e.label) << '\t' << escape_tsv_field(e.text) << '\n';
  }
}

std::vector<Label> labels_of(std::span<const LabeledExample> examples) {
  std::vector<Label> out;
  out.reserve(examples.size());
  for (const auto& e : examples) out.push_back(e.label);
  return out;
}

}  // namespace opinion

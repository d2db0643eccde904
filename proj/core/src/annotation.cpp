#include "opinion/annotation.hpp"

#include "opinion/corpus.hpp"
#include "opinion/csv.hpp"
#include "opinion/error.hpp"
#include "opinion/format.hpp"

namespace opinion {

std::vector<Message> prepare_annotation_set(std::span<const Message> msgs,
                                            const TopicQuery& query, const SampleSpec& spec,
                                            std::uint64_t seed) {
  if (spec.rate.has_value() == spec.count.has_value()) {
    throw UsageError("give exactly one of a sampling rate or a count");
  }
  Deduplicator unique(DedupMode::by_exact_text);
  std::vector<Message> selected;
  for (const auto& m : msgs) {
    if (query.matches(m.text) && unique.admit(m)) selected.push_back(m);
  }
  if (selected.empty()) throw DataError("query '" + query.name() + "' selects no messages");
  return spec.rate ? sample_by_rate(selected, *spec.rate, seed)
                   : sample_by_count(selected, *spec.count, seed);
}

void write_annotation_template(std::ostream& out, std::span<const Message> selection,
                               const TopicQuery& query, std::uint64_t seed) {
  out << "# label<TAB>text; labels: supports, rejects, other; query=" << query.name()
      << " seed=" << seed << " n=" << selection.size() << '\n';
  for (const auto& m : selection) out << '\t' << escape_tsv_field(m.text) << '\n';
}

std::string labeled_csv_row(const Message& m, const StanceModel::Prediction& p) {
  std::string row = csv_field(m.id);
  row += ',';
  row += format_timestamp(m.timestamp);
  row += ',';
  row += to_string(p.label);
  for (double v : p.probabilities) {
    row += ',';
    row += format_double(v);
  }
  return row;
}

}  // namespace opinion

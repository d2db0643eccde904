#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "opinion/classifier.hpp"
#include "opinion/message.hpp"
#include "opinion/query.hpp"

namespace opinion {

// Either a sampling rate in (0, 1] or an absolute count.
struct SampleSpec {
  std::optional<double> rate;
  std::optional<std::size_t> count;
};

// Query filter, then dedup by exact text, then a seeded sample. Throws
// DataError naming the query when nothing matches.
std::vector<Message> prepare_annotation_set(std::span<const Message> msgs,
                                            const TopicQuery& query, const SampleSpec& spec,
                                            std::uint64_t seed);

// Labels TSV with an empty label column, preceded by a '#' provenance line.
void write_annotation_template(std::ostream& out, std::span<const Message> selection,
                               const TopicQuery& query, std::uint64_t seed);

// Streams predictions in input order.
template <typename Source, typename Sink>
std::size_t label_corpus(const StanceModel& model, Source&& next, Sink&& sink) {
  Message m;
  std::size_t n = 0;
  while (next(m)) {
    sink(m, model.predict(m.text));
    ++n;
  }
  return n;
}

// CSV row "id,timestamp,label,p_supports,p_rejects,p_other" (id quoted when needed).
inline constexpr const char* kLabeledCsvHeader = "id,timestamp,label,p_supports,p_rejects,p_other";
std::string labeled_csv_row(const Message& m, const StanceModel::Prediction& p);

}  // namespace opinion

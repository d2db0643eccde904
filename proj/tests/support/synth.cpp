#include "synth.hpp"

#include <unistd.h>

#include <array>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "opinion/rng.hpp"
#include "opinion/time.hpp"

namespace synth {

namespace {

const std::array<std::vector<std::string>, 3> kSignature = {{
    {"steun", "eens", "terecht", "verstandig", "goedzo", "prima", "akkoord"},
    {"onzin", "oneens", "belachelijk", "overdreven", "weigeren", "nooit", "protest"},
    {"weer", "voetbal", "pizza", "trein", "muziek", "vakantie", "kat"},
}};

const std::vector<std::string> kFiller = {
    "de", "het", "een", "en", "is", "dat", "op", "te", "van", "met", "ook", "nu",
    "dan", "maar", "wel", "nog", "al", "zo", "die", "er", "om", "bij", "uit", "aan"};

// Filler for corpus messages; none contains a topic keyword.
const std::vector<std::string> kCorpusWords = {
    "vandaag", "morgen", "gisteren", "mensen", "straat", "winkel", "school", "werk",
    "thuis", "fiets", "regen", "zon", "koffie", "brood", "avond", "ochtend",
    "stad", "dorp", "nieuws", "krant", "vrienden", "familie", "buren", "tuin",
    "markt", "haven", "station", "kantoor", "lekker", "rustig", "druk", "stil"};

const std::vector<std::string> kKeywords = {"corona",  "covid", "huisarts", "mondkapje",
                                            "rivm",    "flattenthecurve", "blijfthuis",
                                            "houvol"};

std::string make_text(opinion::Rng& rng, std::size_t cls) {
  const auto& sig = kSignature[cls];
  std::vector<std::string> words;
  const std::size_t n_sig = 2 + rng.below(2);
  for (std::size_t i = 0; i < n_sig; ++i) words.push_back(sig[rng.below(sig.size())]);
  for (int i = 0; i < 2; ++i) words.push_back(kFiller[rng.below(kFiller.size())]);
  rng.shuffle(std::span<std::string>(words));
  std::string text;
  for (const auto& w : words) {
    if (!text.empty()) text += ' ';
    text += w;
  }
  return text;
}

}  // namespace

std::vector<opinion::LabeledExample> separable(std::size_t n, std::uint64_t seed) {
  opinion::Rng rng(seed);
  std::vector<opinion::LabeledExample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t cls = i % 3;
    out.push_back({make_text(rng, cls), opinion::kLabelOrder[cls]});
  }
  return out;
}

std::vector<opinion::LabeledExample> noisy(std::size_t n, double noise, std::uint64_t seed) {
  auto out = separable(n, seed);
  opinion::Rng rng(seed ^ 0x5eed);
  for (auto& ex : out) {
    if (!rng.bernoulli(noise)) continue;
    const std::size_t shift = 1 + rng.below(2);
    ex.label = opinion::kLabelOrder[(opinion::index(ex.label) + shift) % 3];
  }
  return out;
}

opinion::Message message(std::uint64_t i, std::uint64_t hit_every, std::int64_t step_seconds) {
  opinion::Message m;
  m.id = std::to_string(i);
  m.timestamp = opinion::Timestamp{std::chrono::seconds{1580515200 + static_cast<std::int64_t>(i) *
                                                                         step_seconds}};
  m.lang = "nl";
  std::uint64_t state = opinion::splitmix64(i);
  std::string text;
  const bool hit = hit_every > 0 && i % hit_every == 0;
  std::size_t word_no = 0;
  while (text.size() < 100) {
    state = opinion::splitmix64(state);
    if (!text.empty()) text += ' ';
    if (hit && word_no == 3) {
      text += kKeywords[state % kKeywords.size()];
    } else {
      text += kCorpusWords[state % kCorpusWords.size()];
    }
    ++word_no;
  }
  if (hit && word_no <= 3) text += " " + kKeywords[0];
  m.text = std::move(text);
  return m;
}

std::uint64_t write_jsonl(const std::filesystem::path& path, std::uint64_t n,
                          std::uint64_t hit_every, std::int64_t step_seconds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  std::uint64_t hits = 0;
  std::string line;
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto m = message(i, hit_every, step_seconds);
    if (hit_every > 0 && i % hit_every == 0) ++hits;
    line = "{\"id\":\"" + m.id + "\",\"created_at\":\"" + opinion::format_timestamp(m.timestamp) +
           "\",\"text\":\"" + m.text + "\",\"lang\":\"nl\",\"platform\":\"twitter\"}\n";
    out << line;
  }
  return hits;
}

TempDir::TempDir() {
  std::string templ = (std::filesystem::temp_directory_path() / "opinion-test-XXXXXX").string();
  if (!::mkdtemp(templ.data())) throw std::runtime_error("mkdtemp failed");
  path_ = templ;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

}  // namespace synth

#include "opinion/classifier.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numeric>

#include "opinion/error.hpp"
#include "opinion/rng.hpp"
#include "opinion/text.hpp"

namespace opinion {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr int kFormatVersion = 1;
constexpr const char* kFormatName = "opinionkit-stance-model";

}  // namespace

void Hyperparams::validate() const {
  if (dim <= 0) throw UsageError("dim must be positive");
  if (epochs <= 0) throw UsageError("epochs must be positive");
  if (!(lr > 0.0)) throw UsageError("learning rate must be positive");
  if (char_ngram_min < 0 || char_ngram_max < 0 || char_ngram_min > char_ngram_max) {
    throw UsageError("char n-gram range must satisfy 0 <= min <= max");
  }
  if (char_ngram_max > 0 && char_ngram_min == 0) {
    throw UsageError("char n-gram min must be >= 1 when subwords are enabled");
  }
  if (uses_subwords() && bucket == 0) throw UsageError("bucket must be positive");
}

std::uint32_t fnv1a(std::string_view s) {
  std::uint32_t h = 2166136261u;
  for (unsigned char c : s) {
    h ^= c;
    h *= 16777619u;
  }
  return h;
}

std::vector<std::string> char_ngrams(std::string_view token, int min_n, int max_n) {
  std::vector<std::string> out;
  if (max_n <= 0) return out;
  std::string padded = "<";
  padded += token;
  padded += '>';
  const auto offsets = text::codepoint_offsets(padded);
  const std::size_t cps = offsets.size() - 1;
  for (std::size_t i = 0; i < cps; ++i) {
    for (int n = min_n; n <= max_n && i + n <= cps; ++n) {
      out.emplace_back(padded.substr(offsets[i], offsets[i + n] - offsets[i]));
    }
  }
  return out;
}

StanceModel::StanceModel(Hyperparams hp, std::vector<std::string> vocab)
    : hp_(hp), words_(std::move(vocab)) {
  hp_.validate();
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!word_rows_.emplace(words_[i], i).second) {
      throw DataError("duplicate vocabulary word '" + words_[i] + "'");
    }
  }
  output_.assign(kNumLabels * dim(), 0.0);
}

double StanceModel::init_value(std::uint64_t row, std::size_t col) const {
  // Uniform in (-1/dim, 1/dim), a pure function of (seed, row, col),
  // rounded to float so stored and regenerated values agree bit for bit.
  const std::uint64_t key = splitmix64(splitmix64(hp_.seed ^ 0x51ed270b2746a2c5ULL) +
                                       row * 0x9e3779b97f4a7c15ULL + col);
  const double u = static_cast<double>(key >> 11) * 0x1.0p-53;
  return static_cast<double>(static_cast<float>((2.0 * u - 1.0) / hp_.dim));
}

const double* StanceModel::find_row(std::uint64_t row) const {
  auto it = slot_of_.find(row);
  return it == slot_of_.end() ? nullptr : slots_.data() + it->second * dim();
}

std::vector<double> StanceModel::input_row(std::uint64_t row) const {
  std::vector<double> out(dim());
  if (const double* r = find_row(row)) {
    std::copy(r, r + dim(), out.begin());
  } else {
    for (std::size_t j = 0; j < dim(); ++j) out[j] = init_value(row, j);
  }
  return out;
}

double* StanceModel::mutable_input_row(std::uint64_t row) {
  if (row >= row_count()) throw UsageError("embedding row out of range");
  auto [it, inserted] = slot_of_.emplace(row, row_ids_.size());
  if (inserted) {
    row_ids_.push_back(row);
    slots_.resize(slots_.size() + dim());
    double* r = slots_.data() + it->second * dim();
    for (std::size_t j = 0; j < dim(); ++j) r[j] = init_value(row, j);
  }
  return slots_.data() + it->second * dim();
}

std::vector<std::uint64_t> StanceModel::features(std::string_view text) const {
  std::vector<std::uint64_t> out;
  const auto tokens = text::tokenize(text);
  const std::uint64_t base = words_.size();
  for (const auto& t : tokens) {
    if (auto it = word_rows_.find(t); it != word_rows_.end()) out.push_back(it->second);
    if (hp_.uses_subwords()) {
      for (const auto& g : char_ngrams(t, hp_.char_ngram_min, hp_.char_ngram_max)) {
        out.push_back(base + fnv1a(g) % hp_.bucket);
      }
    }
  }
  return out;
}

void StanceModel::hidden(std::span<const std::uint64_t> features, std::vector<double>& h) const {
  h.assign(dim(), 0.0);
  if (features.empty()) return;
  for (auto f : features) {
    if (const double* r = find_row(f)) {
      for (std::size_t j = 0; j < dim(); ++j) h[j] += r[j];
    } else {
      for (std::size_t j = 0; j < dim(); ++j) h[j] += init_value(f, j);
    }
  }
  const double inv = 1.0 / static_cast<double>(features.size());
  for (auto& v : h) v *= inv;
}

void StanceModel::logits_to_probs(const std::vector<double>& h, Probabilities& p) const {
  std::array<double, kNumLabels> z{};
  for (std::size_t k = 0; k < kNumLabels; ++k) {
    const double* w = output_.data() + k * dim();
    double s = bias_[k];
    for (std::size_t j = 0; j < dim(); ++j) s += w[j] * h[j];
    z[k] = s;
  }
  const double zmax = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (std::size_t k = 0; k < kNumLabels; ++k) {
    p[k] = std::exp(z[k] - zmax);
    total += p[k];
  }
  for (auto& v : p) v /= total;
}

StanceModel::Prediction StanceModel::predict_features(
    std::span<const std::uint64_t> features) const {
  std::vector<double> h;
  hidden(features, h);
  Prediction out;
  logits_to_probs(h, out.probabilities);
  std::size_t best = 0;
  for (std::size_t k = 1; k < kNumLabels; ++k) {
    if (out.probabilities[k] > out.probabilities[best]) best = k;
  }
  out.label = kLabelOrder[best];
  return out;
}

StanceModel::Prediction StanceModel::predict(std::string_view text) const {
  return predict_features(features(text));
}

double StanceModel::loss(std::string_view text, Label label) const {
  const auto f = features(text);
  std::vector<double> h;
  hidden(f, h);
  std::array<double, kNumLabels> z{};
  for (std::size_t k = 0; k < kNumLabels; ++k) {
    z[k] = bias_[k];
    for (std::size_t j = 0; j < dim(); ++j) z[k] += output_[k * dim() + j] * h[j];
  }
  const double zmax = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (double v : z) total += std::exp(v - zmax);
  return -(z[index(label)] - zmax - std::log(total));
}

StanceModel::Gradient StanceModel::gradient(std::string_view text, Label label) const {
  const auto f = features(text);
  std::vector<double> h;
  hidden(f, h);
  Probabilities p;
  logits_to_probs(h, p);

  Gradient g;
  g.output.assign(kNumLabels * dim(), 0.0);
  std::vector<double> grad_h(dim(), 0.0);
  for (std::size_t k = 0; k < kNumLabels; ++k) {
    const double gk = p[k] - (k == index(label) ? 1.0 : 0.0);
    g.bias[k] = gk;
    for (std::size_t j = 0; j < dim(); ++j) {
      g.output[k * dim() + j] = gk * h[j];
      grad_h[j] += gk * output_[k * dim() + j];
    }
  }
  if (!f.empty()) {
    const double inv = 1.0 / static_cast<double>(f.size());
    for (auto row : f) {
      auto& acc = g.rows[row];
      acc.resize(dim(), 0.0);
      for (std::size_t j = 0; j < dim(); ++j) acc[j] += grad_h[j] * inv;
    }
  }
  return g;
}

double StanceModel::sgd_step(std::span<const std::uint64_t> features, Label label, double lr) {
  std::vector<double> h;
  hidden(features, h);
  Probabilities p;
  logits_to_probs(h, p);
  const double loss = -std::log(std::max(p[index(label)], 1e-300));

  std::vector<double> grad_h(dim(), 0.0);
  for (std::size_t k = 0; k < kNumLabels; ++k) {
    const double gk = p[k] - (k == index(label) ? 1.0 : 0.0);
    double* w = output_.data() + k * dim();
    for (std::size_t j = 0; j < dim(); ++j) {
      grad_h[j] += gk * w[j];
      w[j] -= lr * gk * h[j];
    }
    bias_[k] -= lr * gk;
  }
  if (!features.empty()) {
    const double scale = lr / static_cast<double>(features.size());
    for (auto f : features) {
      double* r = mutable_input_row(f);
      for (std::size_t j = 0; j < dim(); ++j) r[j] -= scale * grad_h[j];
    }
  }
  return loss;
}

void StanceModel::round_to_float() {
  auto round = [](double& v) { v = static_cast<double>(static_cast<float>(v)); };
  std::for_each(slots_.begin(), slots_.end(), round);
  std::for_each(output_.begin(), output_.end(), round);
  std::for_each(bias_.begin(), bias_.end(), round);
}

bool operator==(const StanceModel& a, const StanceModel& b) {
  if (!(a.hp_ == b.hp_) || a.words_ != b.words_ || a.output_ != b.output_ ||
      a.bias_ != b.bias_ || a.row_ids_.size() != b.row_ids_.size()) {
    return false;
  }
  for (auto row : a.row_ids_) {
    const double* ra = a.find_row(row);
    const double* rb = b.find_row(row);
    if (!rb || !std::equal(ra, ra + a.dim(), rb)) return false;
  }
  return true;
}

// --- serialization -------------------------------------------------------------

namespace {

template <typename T>
void put_le(std::ostream& out, T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    out.write(bytes.data(), sizeof(T));
  } else {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
}

template <typename T>
T get_le(std::istream& in, const std::string& name) {
  std::array<char, sizeof(T)> bytes{};
  if (!in.read(bytes.data(), sizeof(T))) throw DataError(name + ": truncated model file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  return std::bit_cast<T>(bytes);
}

ordered_json hp_json(const Hyperparams& hp) {
  ordered_json j;
  j["dim"] = hp.dim;
  j["epochs"] = hp.epochs;
  j["lr"] = hp.lr;
  j["char_ngram_min"] = hp.char_ngram_min;
  j["char_ngram_max"] = hp.char_ngram_max;
  j["bucket"] = hp.bucket;
  j["seed"] = hp.seed;
  return j;
}

}  // namespace

void StanceModel::save(std::ostream& out) const {
  std::vector<std::uint64_t> rows = row_ids_;
  std::sort(rows.begin(), rows.end());

  ordered_json header;
  header["format"] = kFormatName;
  header["format_version"] = kFormatVersion;
  header["hyperparams"] = hp_json(hp_);
  header["label_order"] = {"supports", "rejects", "other"};
  header["vocab"] = words_;
  header["input_rows"] = rows.size();
  header["encoding"] = "f32le";
  out << header.dump() << '\n';

  for (auto r : rows) put_le<std::uint64_t>(out, r);
  for (auto r : rows) {
    const double* v = find_row(r);
    for (std::size_t j = 0; j < dim(); ++j) put_le<float>(out, static_cast<float>(v[j]));
  }
  for (double w : output_) put_le<float>(out, static_cast<float>(w));
  for (double b : bias_) put_le<float>(out, static_cast<float>(b));
}

void StanceModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write model file: " + path.string());
  save(out);
  if (!out) throw DataError("write failed: " + path.string());
}

StanceModel StanceModel::load(std::istream& in, const std::string& name) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(name + ": empty model file");
  json header = json::parse(line, nullptr, false);
  if (header.is_discarded() || !header.is_object() || header.value("format", "") != kFormatName) {
    throw DataError(name + ": not a stance model file");
  }
  if (header.value("format_version", 0) != kFormatVersion) {
    throw DataError(name + ": unsupported model format_version");
  }
  if (header.value("encoding", "") != "f32le") throw DataError(name + ": unsupported encoding");
  if (header["label_order"] != json({"supports", "rejects", "other"})) {
    throw DataError(name + ": unexpected label order");
  }

  Hyperparams hp;
  try {
    const auto& j = header.at("hyperparams");
    hp.dim = j.at("dim").get<int>();
    hp.epochs = j.at("epochs").get<int>();
    hp.lr = j.at("lr").get<double>();
    hp.char_ngram_min = j.at("char_ngram_min").get<int>();
    hp.char_ngram_max = j.at("char_ngram_max").get<int>();
    hp.bucket = j.at("bucket").get<std::uint64_t>();
    hp.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw DataError(name + ": bad hyperparams in header: " + e.what());
  }

  std::vector<std::string> vocab;
  try {
    vocab = header.at("vocab").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw DataError(name + ": bad vocab in header: " + e.what());
  }

  StanceModel model(hp, std::move(vocab));
  const auto n_rows = header.value("input_rows", std::uint64_t{0});
  std::vector<std::uint64_t> rows(n_rows);
  for (auto& r : rows) {
    r = get_le<std::uint64_t>(in, name);
    if (r >= model.row_count()) throw DataError(name + ": embedding row out of range");
  }
  for (auto r : rows) {
    double* v = model.mutable_input_row(r);
    for (std::size_t j = 0; j < model.dim(); ++j) v[j] = get_le<float>(in, name);
  }
  for (auto& w : model.output_) w = get_le<float>(in, name);
  for (auto& b : model.bias_) b = get_le<float>(in, name);
  if (in.peek() != std::char_traits<char>::eof()) throw DataError(name + ": trailing bytes");
  return model;
}

StanceModel StanceModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read model file: " + path.string());
  return load(in, path.string());
}

// --- training --------------------------------------------------------------------

StanceModel train(std::span<const LabeledExample> examples, const Hyperparams& hp,
                  const TrainOptions& options) {
  hp.validate();
  if (examples.empty()) throw DataError("degenerate training set: no examples");
  {
    std::array<bool, kNumLabels> seen{};
    for (const auto& e : examples) seen[index(e.label)] = true;
    if (std::count(seen.begin(), seen.end(), true) < 2) {
      throw DataError("degenerate training set: fewer than two distinct labels");
    }
  }

  // Vocabulary in order of first appearance.
  std::vector<std::string> vocab;
  {
    std::unordered_map<std::string, bool> seen;
    for (const auto& e : examples) {
      for (auto& t : text::tokenize(e.text)) {
        if (seen.emplace(t, true).second) vocab.push_back(std::move(t));
      }
    }
  }

  StanceModel model(hp, std::move(vocab));
  std::vector<std::vector<std::uint64_t>> feats;
  feats.reserve(examples.size());
  for (const auto& e : examples) {
    feats.push_back(model.features(e.text));
    for (auto f : feats.back()) model.mutable_input_row(f);
  }

  Rng rng(hp.seed);
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  const double total_updates = static_cast<double>(hp.epochs) * static_cast<double>(examples.size());
  std::uint64_t done = 0;

  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (auto i : order) {
      const double lr = hp.lr * (1.0 - static_cast<double>(done) / total_updates);
      model.sgd_step(feats[i], examples[i].label, lr);
      ++done;
    }
    if (options.on_epoch) {
      double total = 0.0;
      for (std::size_t i = 0; i < examples.size(); ++i) {
        const auto p = model.predict_features(feats[i]).probabilities[index(examples[i].label)];
        total -= std::log(std::max(p, 1e-300));
      }
      options.on_epoch(epoch + 1, total / static_cast<double>(examples.size()));
    }
  }
  model.round_to_float();
  return model;
}

std::vector<Label> predict_labels(const StanceModel& model,
                                  std::span<const LabeledExample> examples) {
  std::vector<Label> out;
  out.reserve(examples.size());
  for (const auto& e : examples) out.push_back(model.predict(e.text).label);
  return out;
}

}  // namespace opinion

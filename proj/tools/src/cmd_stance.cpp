// kappa, train, cross-validate, grid-search, learning-curve, predict, evaluate
#include <iostream>
#include <nlohmann/json.hpp>
#include <thread>

#include "app.hpp"
#include "opinion/annotation.hpp"
#include "opinion/classifier.hpp"
#include "opinion/error.hpp"
#include "opinion/format.hpp"
#include "opinion/harness.hpp"
#include "opinion/labels.hpp"
#include "opinion/metrics.hpp"

namespace opinionkit {

using namespace opinion;

namespace {

struct ModelFlags {
  Hyperparams hp;

  void add_to(CLI::App& app, bool with_size_flags = true) {
    if (with_size_flags) {
      app.add_option("--dim", hp.dim, "Embedding width")->capture_default_str();
      app.add_option("--epochs", hp.epochs, "Training epochs")->capture_default_str();
      app.add_option("--lr", hp.lr, "Initial learning rate")->capture_default_str();
    }
    app.add_option("--minn", hp.char_ngram_min, "Shortest character n-gram (0 disables)")
        ->capture_default_str();
    app.add_option("--maxn", hp.char_ngram_max, "Longest character n-gram (0 disables)")
        ->capture_default_str();
    app.add_option("--hash-buckets", hp.bucket, "Size of the hashed n-gram table")
        ->capture_default_str();
  }

  Hyperparams resolve(std::uint64_t seed) const {
    Hyperparams out = hp;
    out.seed = seed;
    out.validate();
    return out;
  }
};

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

void write_or_print(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  AtomicOutput out(path);
  out.stream() << text;
  out.commit();
}

std::string hp_fields(const Hyperparams& hp) {
  return "\"dim\":" + std::to_string(hp.dim) + ",\"epochs\":" + std::to_string(hp.epochs) +
         ",\"lr\":" + format_double(hp.lr) + ",\"seed\":" + std::to_string(hp.seed);
}

// ---- kappa ----

struct KappaArgs {
  std::string a, b, out;
};

void run_kappa(Context&, const KappaArgs& args) {
  const auto a = load_label_column(args.a);
  const auto b = load_label_column(args.b);
  if (a.size() != b.size())
    throw DataError("label files differ in length: " + args.a + " has " +
                    std::to_string(a.size()) + ", " + args.b + " has " +
                    std::to_string(b.size()));
  const AgreementReport r = cohen_kappa(a, b);
  if (!args.out.empty()) write_or_print(args.out, r.to_json() + "\n");
  std::cout << "kappa=" << format_double(r.kappa) << "\n"
            << "observed=" << format_double(r.observed_agreement) << "\n"
            << "expected=" << format_double(r.expected_agreement) << "\n"
            << "n=" << r.n << "\n";
}

// ---- train ----

struct TrainArgs {
  std::string labels, out;
  ModelFlags model;
};

void run_train(Context& ctx, const TrainArgs& a) {
  const Hyperparams hp = a.model.resolve(ctx.common.seed);
  const auto examples = load_labeled(a.labels);
  TrainOptions options;
  if (ctx.log.enabled())
    options.on_epoch = [&](int epoch, double loss) {
      ctx.log.event("epoch", "\"epoch\":" + std::to_string(epoch) +
                                 ",\"loss\":" + format_double(loss));
    };
  ctx.log.event("train", "\"examples\":" + std::to_string(examples.size()) + "," + hp_fields(hp));
  const StanceModel model = train(examples, hp, options);
  AtomicOutput out(a.out);
  model.save(out.stream());
  out.commit();
  std::cout << "examples=" << examples.size() << " vocab=" << model.vocab().size()
            << " stored_rows=" << model.stored_rows() << "\n";
}

// ---- cross-validate ----

struct CrossValidateArgs {
  std::string labels, out;
  int folds = 10;
  unsigned threads = 0;
  ModelFlags model;
};

void run_cross_validate(Context& ctx, const CrossValidateArgs& a) {
  const Hyperparams hp = a.model.resolve(ctx.common.seed);
  const auto examples = load_labeled(a.labels);
  const auto result =
      cross_validate(examples, hp, a.folds, ctx.common.seed, resolve_threads(a.threads));
  write_or_print(a.out, result.to_json() + "\n");
  if (!a.out.empty())
    std::cout << "accuracy=" << format_double(result.accuracy.mean)
              << " fraction_score=" << format_double(result.fraction_score.mean) << "\n";
}

// ---- grid-search ----

struct GridArgs {
  std::string labels, out, model_out, objective = "fraction_score";
  std::vector<int> dims, epochs;
  std::vector<double> lrs;
  unsigned threads = 0;
  ModelFlags model;
};

void run_grid(Context& ctx, const GridArgs& a) {
  const auto objective = parse_objective(a.objective);
  if (!objective)
    throw UsageError("--objective: expected accuracy or fraction_score, got '" + a.objective + "'");
  Grid grid = Grid::default_bounds();
  if (!a.dims.empty()) grid.dims = a.dims;
  if (!a.epochs.empty()) grid.epochs = a.epochs;
  if (!a.lrs.empty()) grid.lrs = a.lrs;
  const Hyperparams base = a.model.resolve(ctx.common.seed);
  const auto examples = load_labeled(a.labels);
  ctx.log.event("grid-search", "\"configurations\":" + std::to_string(grid.size()) +
                                   ",\"seed\":" + std::to_string(ctx.common.seed));
  StanceModel holder(base, {});
  const auto result = grid_search(examples, grid, *objective, base, ctx.common.seed,
                                  resolve_threads(a.threads),
                                  a.model_out.empty() ? nullptr : &holder);
  std::optional<AtomicOutput> model_file;
  if (!a.model_out.empty()) {
    model_file.emplace(a.model_out);
    holder.save(model_file->stream());
  }
  write_or_print(a.out, result.to_json() + "\n");
  if (model_file) model_file->commit();
  if (!a.out.empty())
    std::cout << "best dim=" << result.best.dim << " epochs=" << result.best.epochs
              << " lr=" << format_double(result.best.lr) << "\n";
}

// ---- learning-curve ----

struct CurveArgs {
  std::string labels, out;
  std::vector<std::size_t> sizes;
  int repeats = 5;
  std::size_t test_size = 0;
  ModelFlags model;
};

void run_curve(Context& ctx, const CurveArgs& a) {
  const Hyperparams hp = a.model.resolve(ctx.common.seed);
  const auto examples = load_labeled(a.labels);
  const auto curve = learning_curve(examples, hp, a.sizes, a.repeats, ctx.common.seed, a.test_size);
  write_or_print(a.out, curve.to_csv());
}

// ---- predict / evaluate ----

struct PredictArgs {
  std::vector<std::string> inputs;
  std::string model, out;
};

void run_predict(Context& ctx, const PredictArgs& a) {
  const StanceModel model = StanceModel::load(std::filesystem::path(a.model));
  AtomicOutput out(a.out);
  out.stream() << kLabeledCsvHeader << "\n";
  std::size_t n = 0;
  for_each_message(
      a.inputs,
      [&](const Message& m) {
        out.stream() << labeled_csv_row(m, model.predict(m.text)) << "\n";
        ++n;
      },
      ctx.log);
  out.commit();
  std::cout << "labeled=" << n << "\n";
}

struct EvaluateArgs {
  std::string model, labels, out;
};

void run_evaluate(Context&, const EvaluateArgs& a) {
  const StanceModel model = StanceModel::load(std::filesystem::path(a.model));
  const auto examples = load_labeled(a.labels);
  if (examples.empty()) throw DataError(a.labels + ": no labeled examples");
  write_or_print(a.out, evaluate(model, examples).to_json() + "\n");
}

}  // namespace

void register_stance_commands(CLI::App& root, std::vector<Command>& out, Context& ctx) {
  {
    auto args = std::make_shared<KappaArgs>();
    auto* app = root.add_subcommand("kappa", "Cohen's kappa between two annotators' label files");
    app->add_option("--a", args->a, "First annotator's labels TSV")->required()
        ->check(CLI::ExistingFile);
    app->add_option("--b", args->b, "Second annotator's labels TSV")->required()
        ->check(CLI::ExistingFile);
    app->add_option("--out", args->out, "Also write the agreement report JSON here");
    add_common_options(*app, ctx.common);
    out.push_back({app, [args](Context& c) { run_kappa(c, *args); }});
  }
  {
    auto args = std::make_shared<TrainArgs>();
    auto* app = root.add_subcommand("train", "Train a stance classifier on a labels TSV");
    app->add_option("--labels", args->labels, "Labels TSV label<TAB>text")->required()
        ->check(CLI::ExistingFile);
    app->add_option("--out", args->out, "Model file")->required();
    args->model.add_to(*app);
    add_common_options(*app, ctx.common);
    out.push_back({app, [args](Context& c) { run_train(c, *args); }});
  }
  {
    auto args = std::make_shared<CrossValidateArgs>();
    auto* app = root.add_subcommand("cross-validate", "k-fold cross-validation report");
    app->add_option("--labels", args->labels, "Labels TSV")->required()->check(CLI::ExistingFile);
    app->add_option("--out", args->out, "Report JSON (default: stdout)");
    app->add_option("--folds", args->folds, "Number of folds")->capture_default_str();
    app->add_option("--threads", args->threads, "Worker threads (0 = all cores)")
        ->capture_default_str();
    args->model.add_to(*app);
    add_common_options(*app, ctx.common);
    out.push_back({app, [args](Context& c) { run_cross_validate(c, *args); }});
  }
  {
    auto args = std::make_shared<GridArgs>();
    auto* app = root.add_subcommand(
        "grid-search", "Pick dim/epochs/lr on an 80/10/10 split by accuracy or fraction score");
    app->add_option("--labels", args->labels, "Labels TSV")->required()->check(CLI::ExistingFile);
    app->add_option("--objective", args->objective, "accuracy or fraction_score")
        ->capture_default_str();
    app->add_option("--dims", args->dims, "Comma-separated embedding widths")->delimiter(',');
    app->add_option("--epochs", args->epochs, "Comma-separated epoch counts")->delimiter(',');
    app->add_option("--lrs", args->lrs, "Comma-separated learning rates")->delimiter(',');
    app->add_option("--out", args->out, "Report JSON (default: stdout)");
    app->add_option("--model-out", args->model_out, "Save the selected model here");
    app->add_option("--threads", args->threads, "Worker threads (0 = all cores)")
        ->capture_default_str();
    args->model.add_to(*app, false);
    add_common_options(*app, ctx.common);
    out.push_back({app, [args](Context& c) { run_grid(c, *args); }});
  }
  {
    auto args = std::make_shared<CurveArgs>();
    auto* app = root.add_subcommand(
        "learning-curve", "Accuracy and fraction score against training-set size");
    app->add_option("--labels", args->labels, "Labels TSV")->required()->check(CLI::ExistingFile);
    app->add_option("--sizes", args->sizes, "Comma-separated increasing training sizes")
        ->required()->delimiter(',');
    app->add_option("--repeats", args->repeats, "Repeats per size")->capture_default_str();
    app->add_option("--test-size", args->test_size, "Held-out test size (0 = n/10)")
        ->capture_default_str();
    app->add_option("--out", args->out, "CSV size,accuracy,fraction_score,fraction_defined");
    args->model.add_to(*app);
    add_common_options(*app, ctx.common);
    out.push_back({app, [args](Context& c) { run_curve(c, *args); }});
  }
  {
    auto args = std::make_shared<PredictArgs>();
    auto* app = root.add_subcommand("predict", "Label every message of a corpus with a model");
    app->add_option("--model", args->model, "Model file")->required()->check(CLI::ExistingFile);
    app->add_option("--in", args->inputs, "Message files")->required()->check(CLI::ExistingFile);
    app->add_option("--out", args->out,
                    "CSV id,timestamp,label,p_supports,p_rejects,p_other")->required();
    add_common_options(*app, ctx.common);
    out.push_back({app, [args](Context& c) { run_predict(c, *args); }});
  }
  {
    auto args = std::make_shared<EvaluateArgs>();
    auto* app = root.add_subcommand("evaluate", "Score a model against a labels TSV");
    app->add_option("--model", args->model, "Model file")->required()->check(CLI::ExistingFile);
    app->add_option("--labels", args->labels, "Labels TSV")->required()->check(CLI::ExistingFile);
    app->add_option("--out", args->out, "Report JSON (default: stdout)");
    add_common_options(*app, ctx.common);
    out.push_back({app, [args](Context& c) { run_evaluate(c, *args); }});
  }
}

}  // namespace opinionkit

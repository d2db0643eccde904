#include "app.hpp"

#include <unistd.h>

#include <iostream>
#include <nlohmann/json.hpp>

#include "opinion/error.hpp"

namespace opinionkit {

namespace fs = std::filesystem;
using opinion::DataError;
using opinion::UsageError;

AtomicOutput::AtomicOutput(fs::path target) : target_(std::move(target)) {
  if (target_.empty()) throw UsageError("empty output path");
  const fs::path dir = target_.has_parent_path() ? target_.parent_path() : fs::path(".");
  if (!fs::is_directory(dir))
    throw DataError("output directory does not exist: " + dir.string());
  temp_ = dir / ("." + target_.filename().string() + ".tmp" + std::to_string(::getpid()));
  out_.open(temp_, std::ios::binary | std::ios::trunc);
  if (!out_) throw DataError("cannot write " + temp_.string());
}

AtomicOutput::~AtomicOutput() {
  if (!committed_) {
    out_.close();
    std::error_code ec;
    fs::remove(temp_, ec);
  }
}

void AtomicOutput::commit() {
  out_.flush();
  if (!out_) throw DataError("write failed for " + target_.string());
  out_.close();
  std::error_code ec;
  fs::rename(temp_, target_, ec);
  if (ec) throw DataError("cannot move output into place at " + target_.string() + ": " +
                          ec.message());
  committed_ = true;
}

std::string json_string(std::string_view s) { return nlohmann::json(std::string(s)).dump(); }

void RunLog::event(std::string_view name, const std::string& json_fields) const {
  if (!enabled_) return;
  std::string line = "{\"event\":" + json_string(name);
  if (!json_fields.empty()) line += "," + json_fields;
  line += "}\n";
  std::cerr << line;
}

void add_common_options(CLI::App& app, CommonOptions& opts) {
  app.add_option("--seed", opts.seed, "Seed for every random draw of this run")
      ->capture_default_str();
  app.add_flag("--log", opts.log, "Write a JSON-lines run log to stderr");
}

void add_time_options(CLI::App& app, TimeOptions& opts, const std::string& buckets) {
  app.add_option("--tz", opts.tz, "Fixed UTC offset for bucket boundaries, e.g. +01:00 or Z")
      ->capture_default_str();
  app.add_option("--bucket", opts.bucket, "Bucket size: " + buckets)->capture_default_str();
}

opinion::TzOffset parse_tz_flag(const std::string& value) {
  auto tz = opinion::TzOffset::parse(value);
  if (!tz) throw UsageError("--tz: unrecognized offset '" + value + "'");
  return *tz;
}

opinion::CorpusStats for_each_message(const std::vector<std::string>& paths,
                                      const std::function<void(const opinion::Message&)>& sink,
                                      const RunLog& log) {
  constexpr std::size_t kReportedPerFile = 5;
  opinion::CorpusStats total;
  for (const auto& path : paths) {
    std::size_t reported = 0;
    opinion::MessageReader reader(path, [&](const opinion::LineDiagnostic& d) {
      if (reported++ < kReportedPerFile)
        std::cerr << "warning: " << path << ": skipped line " << d.line << ": " << d.reason
                  << "\n";
    });
    opinion::Message m;
    while (reader.next(m)) sink(m);
    if (reported > kReportedPerFile)
      std::cerr << "warning: " << path << ": " << reported << " malformed lines skipped in total\n";
    log.event("ingest", "\"file\":" + json_string(path) + ",\"messages\":" +
                            std::to_string(reader.stats().total) +
                            ",\"rejected\":" + std::to_string(reader.stats().rejected));
    total.merge(reader.stats());
  }
  return total;
}

int run_cli(int argc, char** argv) {
  CLI::App root{"Social-media opinion analytics: topic filtering, polarity, stance, time series",
                "opinionkit"};
  root.require_subcommand(1);
  root.set_help_all_flag("--help-all", "Show help for every subcommand");

  Context ctx;
  std::vector<Command> commands;
  register_text_commands(root, commands, ctx);
  register_stance_commands(root, commands, ctx);
  register_series_commands(root, commands, ctx);

  try {
    root.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    // Delegates to the selected subcommand when there is one.
    std::cout << root.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << root.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    std::cout << "opinionkit " << OPINIONKIT_VERSION << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    std::cerr << "run with --help for the list of flags\n";
    return 1;
  }

  for (auto& c : commands) {
    if (!c.app->parsed()) continue;
    ctx.command = c.app->get_name();
    ctx.log.enable(ctx.common.log);
    ctx.log.event("start", "\"command\":" + json_string(ctx.command) +
                               ",\"seed\":" + std::to_string(ctx.common.seed));
    try {
      c.run(ctx);
    } catch (const UsageError& e) {
      std::cerr << "usage error: " << ctx.command << ": " << e.what() << "\n";
      ctx.log.event("failed", "\"exit\":1");
      return 1;
    } catch (const DataError& e) {
      std::cerr << "error: " << ctx.command << ": " << e.what() << "\n";
      ctx.log.event("failed", "\"exit\":2");
      return 2;
    } catch (const std::exception& e) {
      std::cerr << "error: " << ctx.command << ": " << e.what() << "\n";
      ctx.log.event("failed", "\"exit\":2");
      return 2;
    }
    ctx.log.event("done", "\"command\":" + json_string(ctx.command));
    return 0;
  }
  return 1;
}

}  // namespace opinionkit

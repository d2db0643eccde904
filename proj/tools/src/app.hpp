#pragma once

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "opinion/corpus.hpp"
#include "opinion/message.hpp"
#include "opinion/time.hpp"

namespace opinionkit {

// Output file that only appears under its final name once commit() runs.
// Writes go to a sibling temporary; destruction without commit removes it.
class AtomicOutput {
 public:
  explicit AtomicOutput(std::filesystem::path target);
  AtomicOutput(const AtomicOutput&) = delete;
  AtomicOutput& operator=(const AtomicOutput&) = delete;
  ~AtomicOutput();

  std::ostream& stream() { return out_; }
  const std::filesystem::path& target() const { return target_; }
  void commit();

 private:
  std::filesystem::path target_;
  std::filesystem::path temp_;
  std::ofstream out_;
  bool committed_ = false;
};

// JSON-lines run log on stderr, enabled by --log.
class RunLog {
 public:
  void enable(bool on) { enabled_ = on; }
  bool enabled() const { return enabled_; }
  // `json_fields` is the inside of an object, e.g. "\"n\":3".
  void event(std::string_view name, const std::string& json_fields = {}) const;

 private:
  bool enabled_ = false;
};

// Flags shared by every subcommand.
struct CommonOptions {
  std::uint64_t seed = 42;
  bool log = false;
};

// Flags for subcommands that bucket timestamps.
struct TimeOptions {
  std::string tz = "+01:00";
  std::string bucket = "day";
};

struct Context {
  CommonOptions common;
  RunLog log;
  std::string command;
};

using Handler = std::function<void(Context&)>;

// A registered subcommand: CLI11 parses into captured option storage, then
// `run` executes.
struct Command {
  CLI::App* app = nullptr;
  Handler run;
};

void add_common_options(CLI::App& app, CommonOptions& opts);
void add_time_options(CLI::App& app, TimeOptions& opts, const std::string& buckets);

opinion::TzOffset parse_tz_flag(const std::string& value);

// Streams every well-formed message of `paths` in order. Malformed lines are
// reported on stderr (first few per file) and counted in the returned stats.
opinion::CorpusStats for_each_message(const std::vector<std::string>& paths,
                                      const std::function<void(const opinion::Message&)>& sink,
                                      const RunLog& log);

std::string json_string(std::string_view s);

// Registration, one function per subcommand family.
void register_text_commands(CLI::App& root, std::vector<Command>& out, Context& ctx);
void register_stance_commands(CLI::App& root, std::vector<Command>& out, Context& ctx);
void register_series_commands(CLI::App& root, std::vector<Command>& out, Context& ctx);

// Entry point; returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace opinionkit

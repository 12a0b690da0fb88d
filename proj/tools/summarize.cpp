#include <memory>
#include <ostream>

#include "commands.hpp"
#include "common.hpp"
#include "hmmix/diagnostics.hpp"
#include "hmmix/error.hpp"
#include "hmmix/output.hpp"
#include "hmmix/text.hpp"

namespace hmmix::cli {

namespace {

struct SummarizeCommand {
  Settings settings;
  int run(std::ostream& out, std::ostream& log);
};

int SummarizeCommand::run(std::ostream& out, std::ostream& log) {
  settings.resolve();
  auto& kv = settings.kv();
  settings.seed(log);
  if (!kv.has("run_dir")) throw ConfigError("give --run-dir");
  const std::filesystem::path dir = kv.get("run_dir");
  for (const char* name : {"trace.tsv", "allocations.csv"}) {
    if (!std::filesystem::exists(dir / name)) throw SchemaError("missing artifact '" + (dir / name).string() + "'");
  }
  TraceTable trace = [&] {
    auto in = open_input(dir / "trace.tsv");
    return read_trace(in);
  }();
  AllocationTable alloc = [&] {
    auto in = open_input(dir / "allocations.csv");
    return read_allocations(in);
  }();
  const auto summary =
      summarize_posterior(trace.names, trace.values, trace.draws(), alloc.means, alloc.components);
  const std::filesystem::path output = kv.has("output") ? std::filesystem::path(kv.get("output")) : dir / "summary.tsv";
  {
    auto f = open_output(output);
    write_summary(f, summary);
  }
  write_summary(out, summary);
  auto manifest = output;
  manifest.replace_extension(".manifest.txt");
  write_manifest(manifest, kv, "summarize");
  return kExitOk;
}

}  // namespace

void add_summarize(CLI::App& app, Runner& runner) {
  auto cmd = std::make_shared<SummarizeCommand>();
  auto* sub = app.add_subcommand("summarize", "Posterior means and standard deviations of a fitted run");
  cmd->settings.bind(*sub);
  auto& s = cmd->settings;
  s.flag(*sub, "-r,--run-dir", "run_dir", "directory written by fit");
  s.flag(*sub, "-o,--output", "output", "summary file (default <run-dir>/summary.tsv)");
  sub->callback([cmd, &runner] { runner = [cmd](std::ostream& o, std::ostream& l) { return cmd->run(o, l); }; });
}

}  // namespace hmmix::cli

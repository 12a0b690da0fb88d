#include <memory>
#include <ostream>

#include "commands.hpp"
#include "common.hpp"
#include "hmmix/detect.hpp"
#include "hmmix/error.hpp"
#include "hmmix/output.hpp"

namespace hmmix::cli {

namespace {

struct DetectCommand {
  Settings settings;
  int run(std::ostream& out, std::ostream& log);
};

int DetectCommand::run(std::ostream& out, std::ostream& log) {
  settings.resolve();
  auto& kv = settings.kv();
  settings.seed(log);  // recorded for the manifest; detection is deterministic

  DetectionRule rule;
  rule.threshold = settings.double_or("detect.threshold", rule.threshold);
  rule.min_length = settings.count_or("detect.min_length", rule.min_length);
  rule.validate();
  kv.set("detect.threshold", rule.threshold);
  kv.set("detect.min_length", std::to_string(rule.min_length));

  std::filesystem::path probs_path, draws_path, output;
  if (kv.has("run_dir")) {
    const std::filesystem::path dir = kv.get("run_dir");
    probs_path = dir / "probabilities.csv";
    draws_path = dir / "zdraws.txt";
    output = dir / "regions.tsv";
  }
  if (kv.has("probabilities")) probs_path = kv.get("probabilities");
  if (kv.has("zdraws")) draws_path = kv.get("zdraws");
  if (kv.has("output")) output = kv.get("output");
  if (probs_path.empty()) throw ConfigError("give --run-dir or --probabilities");
  if (output.empty()) throw ConfigError("give --output (or --run-dir)");
  if (!std::filesystem::exists(probs_path)) throw SchemaError("missing artifact '" + probs_path.string() + "'");

  ProbabilityTable table = [&] {
    auto in = open_input(probs_path);
    return read_probabilities(in);
  }();
  GaussianDraws draws;
  const bool have_draws = !draws_path.empty() && std::filesystem::exists(draws_path);
  if (have_draws) {
    auto in = open_input(draws_path);
    draws = read_gaussian_draws(in, table.layout.size());
  } else if (kv.has("zdraws")) {
    throw SchemaError("missing artifact '" + draws_path.string() + "'");
  } else {
    log << "no allocation draws found; joint probabilities reported as NA\n";
  }

  const auto regions = find_regions(table.layout, table.probabilities, rule, have_draws ? &draws : nullptr);
  {
    auto f = open_output(output);
    write_regions(f, regions);
  }
  auto manifest = output;
  manifest.replace_extension(".manifest.txt");
  write_manifest(manifest, kv, "detect");
  out << regions.size() << " regions written to " << output.string() << '\n';
  return kExitOk;
}

}  // namespace

void add_detect(CLI::App& app, Runner& runner) {
  auto cmd = std::make_shared<DetectCommand>();
  auto* sub = app.add_subcommand("detect", "Call transcribed regions from a fitted run");
  cmd->settings.bind(*sub);
  auto& s = cmd->settings;
  s.flag(*sub, "-r,--run-dir", "run_dir", "directory written by fit");
  s.flag(*sub, "-p,--probabilities", "probabilities", "probability file chromosome,position,p_gaussian");
  s.flag(*sub, "-z,--zdraws", "zdraws", "retained allocation draws (for joint probabilities)");
  s.flag(*sub, "-o,--output", "output", "region file (default <run-dir>/regions.tsv)");
  s.flag(*sub, "--threshold", "detect.threshold", "site probability cutoff, in (0,1) (default 0.5)");
  s.flag(*sub, "--min-length", "detect.min_length", "shortest reported run (default 5)");
  sub->callback([cmd, &runner] { runner = [cmd](std::ostream& o, std::ostream& l) { return cmd->run(o, l); }; });
}

}  // namespace hmmix::cli

#include <memory>
#include <ostream>

#include "commands.hpp"
#include "common.hpp"
#include "hmmix/detect.hpp"
#include "hmmix/error.hpp"
#include "hmmix/output.hpp"
#include "hmmix/text.hpp"

namespace hmmix::cli {

namespace {

struct CompareCommand {
  Settings settings;
  int run(std::ostream& out, std::ostream& log);
};

std::filesystem::path probability_file(const std::string& arg) {
  std::filesystem::path p(arg);
  if (std::filesystem::is_directory(p)) p /= "probabilities.csv";
  if (!std::filesystem::exists(p)) throw SchemaError("missing artifact '" + p.string() + "'");
  return p;
}

std::set<SiteKey> called_sites(const std::filesystem::path& path, double threshold) {
  auto in = open_input(path);
  const auto table = read_probabilities(in);
  return gaussian_sites(table.layout, table.probabilities, threshold);
}

int CompareCommand::run(std::ostream& out, std::ostream& log) {
  settings.resolve();
  auto& kv = settings.kv();
  settings.seed(log);
  if (!kv.has("compare.a") || !kv.has("compare.b")) throw ConfigError("give two runs with --a and --b");
  const double threshold = settings.double_or("compare.threshold", 0.5);
  if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("threshold must lie in (0,1)");
  kv.set("compare.threshold", threshold);

  const auto a = called_sites(probability_file(kv.get("compare.a")), threshold);
  const auto b = called_sites(probability_file(kv.get("compare.b")), threshold);
  const double jaccard = compare_runs(a, b);

  const std::filesystem::path output = settings.get_or("output", "compare.tsv");
  {
    auto f = open_output(output);
    f << "a\tb\tsites_a\tsites_b\tjaccard\tpercent\n";
    f << kv.get("compare.a") << '\t' << kv.get("compare.b") << '\t' << a.size() << '\t' << b.size() << '\t'
      << text::format_double(jaccard) << '\t' << text::format_double(100.0 * jaccard) << '\n';
  }
  auto manifest = output;
  manifest.replace_extension(".manifest.txt");
  write_manifest(manifest, kv, "compare");
  out << "overlap " << text::format_double(100.0 * jaccard) << "% (" << a.size() << " vs " << b.size()
      << " Gaussian locations)\n";
  return kExitOk;
}

}  // namespace

void add_compare(CLI::App& app, Runner& runner) {
  auto cmd = std::make_shared<CompareCommand>();
  auto* sub = app.add_subcommand("compare", "Overlap of the Gaussian locations called in two runs");
  cmd->settings.bind(*sub);
  auto& s = cmd->settings;
  s.flag(*sub, "-a,--a", "compare.a", "first run directory or probability file");
  s.flag(*sub, "-b,--b", "compare.b", "second run directory or probability file");
  s.flag(*sub, "--threshold", "compare.threshold", "site probability cutoff (default 0.5)");
  s.flag(*sub, "-o,--output", "output", "result file (default compare.tsv)");
  sub->callback([cmd, &runner] { runner = [cmd](std::ostream& o, std::ostream& l) { return cmd->run(o, l); }; });
}

}  // namespace hmmix::cli

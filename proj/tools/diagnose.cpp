#include <memory>
#include <ostream>

#include "commands.hpp"
#include "common.hpp"
#include "hmmix/diagnostics.hpp"
#include "hmmix/error.hpp"
#include "hmmix/output.hpp"
#include "hmmix/random.hpp"
#include "hmmix/text.hpp"

namespace hmmix::cli {

namespace {

struct DiagnoseCommand {
  Settings settings;
  int run(std::ostream& out, std::ostream& log);
};

// One column of a replicate table as its own series set.
Dataset column_dataset(const RawDataset& raw, std::size_t column, const PartitionOptions& options) {
  RawDataset one;
  one.replicate_count = 1;
  one.records = raw.records;
  for (auto& r : one.records) r.expressions = {r.expressions[column]};
  return partition_chromosomes(one, options);
}

int DiagnoseCommand::run(std::ostream& out, std::ostream& log) {
  settings.resolve();
  auto& kv = settings.kv();
  const std::uint64_t seed = settings.seed(log);
  const std::size_t permutations = settings.count_or("moran.permutations", 999);
  const std::size_t threads = settings.threads();
  const auto columns = settings.get_or("moran.columns", "median");
  if (columns != "median" && columns != "each") throw ConfigError("moran.columns must be 'median' or 'each'");
  kv.set("moran.permutations", std::to_string(permutations));
  kv.set("moran.columns", columns);
  const auto dir = ensure_directory(settings.get_or("output_dir", "."));

  const RawDataset raw = load_raw_table(settings, log);
  const auto options = partition_options(settings);
  // Column label and its series; "median" is the reduced table.
  std::vector<std::pair<std::string, Dataset>> sets;
  if (columns == "median") {
    sets.emplace_back("median", partition_chromosomes(raw, options));
  } else {
    for (std::size_t l = 0; l < raw.replicate_count; ++l) {
      sets.emplace_back(std::to_string(l + 1), column_dataset(raw, l, options));
    }
  }

  const std::uint64_t moran_seed = substream_seed(seed, "permutation");
  auto f = open_output(dir / "moran.tsv");
  f << "column\tchromosome\tn\tstatistic\tp_value\tpermutations\n";
  KeyValueConfig summary;
  summary.set("seed", std::to_string(seed));
  summary.set("permutations", std::to_string(permutations));
  std::size_t significant = 0, tested = 0;
  for (std::size_t s_idx = 0; s_idx < sets.size(); ++s_idx) {
    const auto& [label, data] = sets[s_idx];
    for (std::size_t c = 0; c < data.series.size(); ++c) {
      const auto& s = data.series[c];
      const std::string key = "moran." + label + "." + s.chromosome;
      f << label << '\t' << s.chromosome << '\t' << s.size() << '\t';
      if (s.size() < 3) {
        f << "NA\tNA\t0\n";
        summary.set(key + ".p_value", std::string("NA"));
        log << s.chromosome << ": fewer than 3 locations, skipped\n";
        continue;
      }
      try {
        const auto r = morans_permutation_test(s.x, s.positions, permutations,
                                               substream_seed(moran_seed, s_idx, c), threads);
        f << text::format_double(r.statistic) << '\t' << text::format_double(r.p_value) << '\t' << r.permutations
          << '\n';
        summary.set(key + ".statistic", r.statistic);
        summary.set(key + ".p_value", r.p_value);
        ++tested;
        if (r.p_value < 0.05) ++significant;
        out << label << ' ' << s.chromosome << ": I = " << text::format_double(r.statistic)
            << ", p = " << text::format_double(r.p_value) << '\n';
      } catch (const ZeroVarianceError&) {
        f << "NA\tNA\t0\n";
        summary.set(key + ".p_value", std::string("NA"));
        log << s.chromosome << ": constant expression, skipped\n";
      }
    }
  }
  summary.set("tests", std::to_string(tested));
  summary.set("significant_at_0.05", std::to_string(significant));
  summary.save(dir / "diagnose_summary.txt");
  out << significant << " of " << tested << " series show spatial correlation at the 5% level\n";

  if (kv.has("trace")) {
    auto in = open_input(kv.get("trace"));
    const auto trace = read_trace(in);
    auto e = open_output(dir / "ergodic.tsv");
    e << "iteration";
    for (const auto& name : trace.names) e << '\t' << name;
    e << '\n';
    std::vector<std::vector<double>> averages;
    for (std::size_t p = 0; p < trace.names.size(); ++p) averages.push_back(ergodic_average(trace.column(p)));
    for (std::size_t m = 0; m < trace.draws(); ++m) {
      e << trace.iterations[m];
      for (const auto& a : averages) e << '\t' << text::format_double(a[m]);
      e << '\n';
    }
  }
  write_manifest(dir / "diagnose.manifest.txt", kv, "diagnose");
  return kExitOk;
}

}  // namespace

void add_diagnose(CLI::App& app, Runner& runner) {
  auto cmd = std::make_shared<DiagnoseCommand>();
  auto* sub = app.add_subcommand("diagnose", "Moran's I per chromosome and ergodic averages of a trace");
  cmd->settings.bind(*sub);
  auto& s = cmd->settings;
  s.flag(*sub, "-i,--input", "input", "expression table to test for spatial correlation");
  s.toggle(*sub, "--median", "input.columns", "median", "the table holds one precomputed median column");
  s.toggle(*sub, "--per-column", "moran.columns", "each", "test every expression column instead of the medians");
  s.flag(*sub, "--permutations", "moran.permutations", "permutations for the Moran test (default 999)");
  s.flag(*sub, "-t,--trace", "trace", "trace.tsv from fit; writes running means to ergodic.tsv");
  s.flag(*sub, "-o,--output-dir", "output_dir", "directory for moran.tsv and ergodic.tsv");
  sub->callback([cmd, &runner] { runner = [cmd](std::ostream& o, std::ostream& l) { return cmd->run(o, l); }; });
}

}  // namespace hmmix::cli

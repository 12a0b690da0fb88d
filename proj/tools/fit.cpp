#include <memory>
#include <ostream>

#include "commands.hpp"
#include "common.hpp"
#include "hmmix/checkpoint.hpp"
#include "hmmix/detect.hpp"
#include "hmmix/diagnostics.hpp"
#include "hmmix/error.hpp"
#include "hmmix/output.hpp"
#include "hmmix/random.hpp"
#include "hmmix/sampler.hpp"

namespace hmmix::cli {

namespace {

struct FitCommand {
  Settings settings;
  std::string resume;
  std::size_t stop_after = 0;

  int run(std::ostream& out, std::ostream& log);
};

Priors resolve_priors(const KeyValueConfig& kv, std::size_t K) {
  Priors p = has_complete_priors(kv) ? read_priors(kv, Priors{}) : read_priors(kv, default_priors(K));
  if (p.K() != K) {
    throw ConfigError("priors describe " + std::to_string(p.K()) + " gamma components but K = " + std::to_string(K));
  }
  return p;
}

void save_to(const std::filesystem::path& dir, const Chain& chain, const KeyValueConfig& manifest) {
  save_checkpoint(dir / "checkpoint.json", make_checkpoint(chain, manifest));
}

void write_outputs(const std::filesystem::path& dir, const Chain& chain) {
  const auto& sample = chain.sample();
  {
    auto f = open_output(dir / "trace.tsv");
    write_trace(f, sample);
  }
  {
    auto f = open_output(dir / "probabilities.csv");
    write_probabilities(f, SiteLayout::from(sample), location_probabilities(sample));
  }
  {
    auto f = open_output(dir / "allocations.csv");
    write_allocations(f, sample);
  }
  {
    auto f = open_output(dir / "zdraws.txt");
    write_gaussian_draws(f, sample.gaussian_draws);
  }
  {
    auto f = open_output(dir / "acceptance.tsv");
    write_acceptance(f, acceptance_report(sample));
  }
}

int FitCommand::run(std::ostream& out, std::ostream& log) {
  std::optional<Checkpoint> checkpoint;
  if (!resume.empty()) {
    checkpoint = load_checkpoint(resume);
    settings.rebase(checkpoint->manifest);
  } else {
    settings.resolve();
  }
  auto& kv = settings.kv();
  const std::uint64_t seed = settings.seed(log);
  const auto dir = ensure_directory(settings.get_or("output_dir", "."));
  const Dataset data = load_dataset(settings, log);

  std::optional<Chain> chain;
  if (checkpoint) {
    checkpoint->config.threads = settings.threads();
    chain.emplace(resume_chain(data, *checkpoint));
    log << "resuming at iteration " << chain->state().iteration << '\n';
  } else {
    const std::size_t K = settings.count_or("model.K", 4);
    if (K == 0) throw ConfigError("K must be at least 1");
    const Priors priors = resolve_priors(kv, K);
    ChainConfig config = read_chain_config(kv, default_chain_config());
    config.threads = settings.threads();
    config.validate();
    kv.set("model.K", std::to_string(K));
    write_priors(kv, priors);
    write_chain_config(kv, config);
    chain.emplace(data, priors, config, substream_seed(seed, "chain"));
  }
  write_manifest(dir / "manifest.txt", kv, "fit");
  if (kv.find("output.normalized").value_or("false") == "true") {
    auto f = open_output(dir / "normalized.csv");
    write_normalized_table(f, data);
  }

  const std::size_t every = settings.count_or("checkpoint_every", 0);
  log << "fit: " << data.total_n() << " locations on " << data.series.size() << " chromosomes, seed " << seed
      << '\n';
  try {
    while (!chain->done()) {
      if (stop_after > 0 && chain->state().iteration >= stop_after) {
        save_to(dir, *chain, kv);
        log << "stopped after iteration " << chain->state().iteration << "; resume with --resume "
            << (dir / "checkpoint.json").string() << '\n';
        return kExitOk;
      }
      chain->step();
      if (every > 0 && chain->state().iteration % every == 0 && !chain->done()) save_to(dir, *chain, kv);
    }
  } catch (const ChainFailure& e) {
    Checkpoint snap = make_checkpoint(*chain, kv);
    snap.state = e.snapshot();
    save_checkpoint(dir / "failure_checkpoint.json", snap);
    log << "state before the failing sweep written to " << (dir / "failure_checkpoint.json").string() << '\n';
    throw;
  }
  write_outputs(dir, *chain);
  save_to(dir, *chain, kv);
  out << "wrote " << chain->sample().M() << " retained draws to " << dir.string() << '\n';
  return kExitOk;
}

}  // namespace

void add_fit(CLI::App& app, Runner& runner) {
  auto cmd = std::make_shared<FitCommand>();
  auto* sub = app.add_subcommand("fit", "Run the Gibbs sampler on an expression table");
  cmd->settings.bind(*sub);
  auto& s = cmd->settings;
  s.flag(*sub, "-i,--input", "input", "expression table probe_id,chromosome,position,<expr...>");
  s.toggle(*sub, "--median", "input.columns", "median", "the table holds one precomputed median column");
  s.toggle(*sub, "--per-chromosome-scale", "input.scale", "per-chromosome", "rescale gaps within each chromosome");
  s.flag(*sub, "-o,--output-dir", "output_dir", "directory for run artifacts");
  s.flag(*sub, "-K,--K", "model.K", "number of gamma components (default 4)");
  s.flag(*sub, "--iterations", "chain.iterations", "total sweeps (default 15000)");
  s.flag(*sub, "--burn-in", "chain.burn_in", "discarded sweeps (default 5000)");
  s.flag(*sub, "--z-thin", "chain.z_thin", "keep every n-th allocation draw for joint probabilities (default 10)");
  s.flag(*sub, "--checkpoint-every", "checkpoint_every", "write checkpoint.json every n sweeps (0 = at the end)");
  s.toggle(*sub, "--write-normalized", "output.normalized", "true", "also write normalized.csv");
  sub->add_option("--resume", cmd->resume, "continue from a checkpoint file");
  sub->add_option("--stop-after", cmd->stop_after, "checkpoint and stop once this many sweeps are done");
  sub->callback([cmd, &runner] { runner = [cmd](std::ostream& o, std::ostream& l) { return cmd->run(o, l); }; });
}

}  // namespace hmmix::cli

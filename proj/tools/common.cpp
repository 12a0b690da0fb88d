#include "common.hpp"

#include <charconv>
#include <cstdlib>
#include <ostream>
#include <random>

#include "hmmix/error.hpp"
#include "hmmix/output.hpp"
#include "hmmix/text.hpp"

namespace hmmix::cli {

void Settings::bind(CLI::App& app) {
  app.add_option("--config", config_path_, "key = value settings file (flags win over it)");
  flag(app, "--seed", "seed", "master seed (drawn at random and logged when absent)");
  flag(app, "--threads", "threads", "worker threads (default from HMMIX_THREADS, else 1)");
}

CLI::Option* Settings::flag(CLI::App& app, const std::string& name, const std::string& key,
                            const std::string& help) {
  auto b = std::make_unique<Bound>(Bound{nullptr, key, {}, false});
  b->option = app.add_option(name, b->value, help);
  bound_.push_back(std::move(b));
  return bound_.back()->option;
}

CLI::Option* Settings::toggle(CLI::App& app, const std::string& name, const std::string& key,
                              const std::string& value, const std::string& help) {
  auto b = std::make_unique<Bound>(Bound{nullptr, key, value, true});
  b->option = app.add_flag(name, help);
  bound_.push_back(std::move(b));
  return bound_.back()->option;
}

void Settings::resolve() {
  if (!config_path_.empty()) kv_ = KeyValueConfig::load(config_path_);
  for (const auto& b : bound_) {
    if (b->option->count() > 0) kv_.set(b->key, b->value);
  }
}

void Settings::rebase(const KeyValueConfig& base) {
  KeyValueConfig merged = base;
  for (const auto& b : bound_) {
    if (b->option->count() > 0) merged.set(b->key, b->value);
  }
  kv_ = std::move(merged);
}

std::uint64_t Settings::seed(std::ostream& log) {
  if (kv_.has("seed")) {
    const auto& s = kv_.get("seed");
    std::uint64_t v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw ConfigError("seed must be a non-negative integer");
    return v;
  }
  std::random_device device;
  const std::uint64_t v = (static_cast<std::uint64_t>(device()) << 32) ^ device();
  kv_.set("seed", std::to_string(v));
  log << "seed: " << v << " (generated)\n";
  return v;
}

std::size_t Settings::threads() const {
  if (kv_.has("threads")) return count_or("threads", 1);
  if (const char* env = std::getenv(kThreadsEnv); env != nullptr && *env != '\0') {
    const auto v = text::parse_int(env);
    if (!v || *v < 1) throw ConfigError(std::string(kThreadsEnv) + " must be a positive integer");
    return static_cast<std::size_t>(*v);
  }
  return 1;
}

std::string Settings::get_or(const std::string& key, const std::string& fallback) const {
  return kv_.has(key) ? kv_.get(key) : fallback;
}

std::size_t Settings::count_or(const std::string& key, std::size_t fallback) const {
  if (!kv_.has(key)) return fallback;
  const auto v = kv_.get_int(key);
  if (v < 0) throw ConfigError("'" + key + "' must be non-negative");
  return static_cast<std::size_t>(v);
}

double Settings::double_or(const std::string& key, double fallback) const {
  return kv_.has(key) ? kv_.get_double(key) : fallback;
}

void write_manifest(const std::filesystem::path& path, KeyValueConfig kv, const std::string& command) {
  kv.set("command", command);
  kv.set("hmmix.version", kVersion);
  auto out = open_output(path);
  out << "# hmmix run manifest; pass back with --config to repeat the run\n";
  kv.write(out);
}

RawDataset load_raw_table(const Settings& settings, std::ostream& log) {
  if (!settings.kv().has("input")) throw ConfigError("no input table given (--input)");
  const std::string path = settings.kv().get("input");
  if (!std::filesystem::exists(path)) throw SchemaError("input table '" + path + "' does not exist");

  TableFormat format;
  const auto columns = settings.get_or("input.columns", "replicates");
  if (columns == "median") {
    format.columns = ExpressionColumns::kMedian;
  } else if (columns != "replicates") {
    throw ConfigError("input.columns must be 'replicates' or 'median'");
  }
  const auto raw = load_expression_table(path, format);
  const auto deduped = dedupe_alignments(raw);
  if (deduped.removed > 0) log << "dropped " << deduped.removed << " ambiguously aligned probes\n";
  if (deduped.dataset.records.empty()) throw EmptyInputError("no probes left after removing duplicates");
  return deduped.dataset;
}

PartitionOptions partition_options(const Settings& settings) {
  PartitionOptions options;
  const auto scale = settings.get_or("input.scale", "global");
  if (scale == "per-chromosome") {
    options.scale = DistanceScale::kPerChromosome;
  } else if (scale != "global") {
    throw ConfigError("input.scale must be 'global' or 'per-chromosome'");
  }
  return options;
}

Dataset load_dataset(const Settings& settings, std::ostream& log) {
  const auto options = partition_options(settings);
  return partition_chromosomes(load_raw_table(settings, log), options);
}

std::filesystem::path ensure_directory(const std::string& dir) {
  std::filesystem::path p(dir);
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec) throw SchemaError("cannot create directory '" + dir + "': " + ec.message());
  return p;
}

}  // namespace hmmix::cli

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "hmmix/config.hpp"
#include "hmmix/data.hpp"

namespace hmmix::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitSchema = 2;
inline constexpr int kExitSampler = 3;
inline constexpr int kExitConfig = 4;

inline constexpr const char* kThreadsEnv = "HMMIX_THREADS";
inline constexpr const char* kVersion = "0.1.0";

// Settings are one key-value table: entries from --config, then every flag
// the user actually passed written over them.
class Settings {
 public:
  void bind(CLI::App& app);  // --config, --seed, --threads
  // Registers a string flag that maps onto a settings key.
  CLI::Option* flag(CLI::App& app, const std::string& name, const std::string& key, const std::string& help);
  // A switch that stores `value` under `key` when present.
  CLI::Option* toggle(CLI::App& app, const std::string& name, const std::string& key, const std::string& value,
                      const std::string& help);

  // Loads the config file and applies flags. Call once after parsing.
  void resolve();
  // Replaces the base (used when resuming from a stored manifest).
  void rebase(const KeyValueConfig& base);

  KeyValueConfig& kv() { return kv_; }
  const KeyValueConfig& kv() const { return kv_; }

  // seed: flag, then config, else drawn from the device and recorded.
  std::uint64_t seed(std::ostream& log);
  // threads: flag, then config, then HMMIX_THREADS, else 1.
  std::size_t threads() const;

  std::string get_or(const std::string& key, const std::string& fallback) const;
  std::size_t count_or(const std::string& key, std::size_t fallback) const;
  double double_or(const std::string& key, double fallback) const;

 private:
  struct Bound {
    CLI::Option* option;
    std::string key;
    std::string value;  // bound storage for flags; fixed value for toggles
    bool is_toggle;
  };
  std::string config_path_;
  std::vector<std::unique_ptr<Bound>> bound_;
  KeyValueConfig kv_;
};

// Writes the resolved settings plus command and version. The file can be fed
// back through --config.
void write_manifest(const std::filesystem::path& path, KeyValueConfig kv, const std::string& command);

// Reads, dedupes and partitions the table named by `input` using the
// input.columns (replicates|median) and input.scale (global|per-chromosome)
// settings.
Dataset load_dataset(const Settings& settings, std::ostream& log);
// The two halves of load_dataset.
RawDataset load_raw_table(const Settings& settings, std::ostream& log);
PartitionOptions partition_options(const Settings& settings);

std::filesystem::path ensure_directory(const std::string& dir);

}  // namespace hmmix::cli

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "hmmix/config.hpp"
#include "hmmix/sampler.hpp"

namespace hmmix {

// Everything needed to continue a chain exactly where it stopped: settings,
// sampler state, engine state and the sample retained so far. Stored as JSON.
struct Checkpoint {
  std::uint64_t seed = 0;
  ChainConfig config;
  Priors priors;
  ChainState state;
  std::string rng_state;  // textual engine state
  PosteriorSample sample;
  KeyValueConfig manifest;  // run settings as given to the CLI
};

Checkpoint make_checkpoint(const Chain& chain, const KeyValueConfig& manifest = {});
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Builds a chain over `data` positioned at the checkpoint.
Chain resume_chain(const Dataset& data, const Checkpoint& checkpoint);

}  // namespace hmmix

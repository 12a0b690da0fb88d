#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <string>
#include <vector>

#include "hmmix/detect.hpp"
#include "hmmix/diagnostics.hpp"
#include "hmmix/sampler.hpp"

namespace hmmix {

// Run artifacts. Every reader throws SchemaError on malformed content.

// Tab-separated, header `iteration` followed by the parameter names; one row
// per retained sweep. Values are written in shortest round-trip form.
void write_trace(std::ostream& out, const PosteriorSample& sample);

struct TraceTable {
  std::vector<std::string> names;
  std::vector<std::size_t> iterations;
  std::vector<double> values;  // row-major, iterations.size() x names.size()

  std::size_t draws() const { return iterations.size(); }
  std::vector<double> column(std::size_t param) const;
};
TraceTable read_trace(std::istream& in);

// `chromosome,position,p_gaussian`.
void write_probabilities(std::ostream& out, const SiteLayout& layout, const std::vector<double>& probabilities);

struct ProbabilityTable {
  SiteLayout layout;
  std::vector<double> probabilities;
};
ProbabilityTable read_probabilities(std::istream& in);

// `chromosome,position,p_1,...,p_K,p_gaussian`: posterior mean of every
// allocation indicator.
void write_allocations(std::ostream& out, const PosteriorSample& sample);

struct AllocationTable {
  SiteLayout layout;
  std::size_t components = 0;
  std::vector<double> means;  // n x components
};
AllocationTable read_allocations(std::istream& in);

// One line per retained Gaussian-indicator draw, a string of '0'/'1' over all
// locations in layout order.
void write_gaussian_draws(std::ostream& out, const GaussianDraws& draws);
GaussianDraws read_gaussian_draws(std::istream& in, std::size_t n);

// `parameter  accepted  attempted  rate  proposal_sd` for each eta_k.
void write_acceptance(std::ostream& out, const AcceptanceReport& report);

// File-path conveniences; open failures throw SchemaError.
std::ofstream open_output(const std::filesystem::path& path);
std::ifstream open_input(const std::filesystem::path& path);

}  // namespace hmmix

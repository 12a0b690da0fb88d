#pragma once

#include <functional>
#include <iosfwd>

#include <CLI11.hpp>

namespace hmmix::cli {

// Set by the chosen subcommand's parse callback; returns the exit code.
using Runner = std::function<int(std::ostream& out, std::ostream& log)>;

void add_fit(CLI::App& app, Runner& runner);
void add_detect(CLI::App& app, Runner& runner);
void add_simulate(CLI::App& app, Runner& runner);
void add_diagnose(CLI::App& app, Runner& runner);
void add_summarize(CLI::App& app, Runner& runner);
void add_compare(CLI::App& app, Runner& runner);

}  // namespace hmmix::cli

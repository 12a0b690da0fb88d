#include "cli.hpp"

#include <ostream>

#include "commands.hpp"
#include "common.hpp"
#include "hmmix/error.hpp"
#include "hmmix/sampler.hpp"

namespace hmmix::cli {

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& log) {
  CLI::App app{"Hidden Markov mixture detection of transcribed regions"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Runner runner;
  add_fit(app, runner);
  add_detect(app, runner);
  add_simulate(app, runner);
  add_diagnose(app, runner);
  add_summarize(app, runner);
  add_compare(app, runner);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version requests arrive here too, with exit code 0.
    return app.exit(e, out, log) == 0 ? kExitOk : kExitConfig;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    return runner ? runner(out, log) : kExitConfig;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SamplerError& e) {
    log << "sampler failure: " << e.what() << '\n';
    return kExitSampler;
  } catch (const SchemaError& e) {
    log << "input error: " << e.what() << '\n';
    return kExitSchema;
  } catch (const EmptyInputError& e) {
    log << "input error: " << e.what() << '\n';
    return kExitSchema;
  } catch (const ContractError& e) {
    log << "input error: " << e.what() << '\n';
    return kExitSchema;
  } catch (const DegenerateScaleError& e) {
    log << "input error: " << e.what() << '\n';
    return kExitSchema;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& log) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("hmmix");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, log);
}

}  // namespace hmmix::cli

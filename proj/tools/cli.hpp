#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hmmix::cli {

// Entry point shared by the executable and the in-process tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& log);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& log);

}  // namespace hmmix::cli

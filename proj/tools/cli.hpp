#pragma once
// Experiment runner.  Every verification is one subcommand; parameters come
// from flags or from a flat `key = value` file given by --config (flags win).
//
// Exit codes: 0 all asserted checks passed, 2 some check failed, 1 usage or
// configuration error.

#include <string>
#include <vector>

namespace wspectra::cli {

enum Exit : int { kPass = 0, kUsage = 1, kCheckFailed = 2 };

const std::vector<std::string>& subcommands();

// args[0] is the program name.
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

}  // namespace wspectra::cli

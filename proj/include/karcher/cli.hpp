#pragma once

#include <ostream>

namespace karcher {

/// Entry point of the `karcher` tool. Subcommands: mean, efm, psr-mean,
/// dist, psr-dist, certify, constants, experiment, selftest.
/// Returns 0 on success, 1 on a domain error, 2 on a usage error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace karcher

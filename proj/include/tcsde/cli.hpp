#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tcsde/config.hpp"

namespace tcsde::cli {

enum class Command { Simulate, Convergence, CheckAssumptions, SubordinatorTest };

/// Executes one subcommand, writing artifacts under config.output_dir.
/// Returns 0 on success; module errors go to `err` with a nonzero status.
int run(Command command, const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full command-line entry point: `tcsde <subcommand> [flags]`.
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tcsde::cli

#pragma once

#include <iosfwd>
#include <string>

#include "config.hpp"
#include "pcf/error.hpp"

namespace pcf::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_domain = 1,        ///< infeasible input, non-PD density, no convergence
    exit_verification = 2,  ///< verify found a disagreement
    exit_io = 3,            ///< unreadable/unwritable file, malformed config or artifact
};

int exit_code_for(ErrorKind kind);

/// Runs one subcommand (factorize | filter | minimax | simulate | verify).
/// Artifacts go to cfg.out_dir; the report is also printed to `out`.
int run(const std::string& command, const ProblemConfig& cfg, bool json_like, std::ostream& out,
        std::ostream& err);

/// Full command line: pcfilter <command> --config FILE [flags].
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pcf::cli

#pragma once

#include <iosfwd>
#include <string>

#include "scdp/cli/config.hpp"

namespace scdp::cli {

enum class OutputFormat { Csv, JsonLines };

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

// Runs one subcommand (analyze, simulate, optimize-rates, optimize-phi,
// sweep) and writes its table to `out`. Returns an exit code; errors
// propagate as exceptions.
int run_command(const std::string& command, const ExperimentConfig& cfg, OutputFormat format,
                std::ostream& out);

// Column schema of each subcommand, as printed by --help.
std::string schema_help();

// argv entry point; maps exceptions to exit codes.
int main_entry(int argc, char** argv);

}  // namespace scdp::cli

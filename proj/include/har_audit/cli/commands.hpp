#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "har_audit/cli/config.hpp"

namespace har_audit::cli {

inline const std::vector<std::string> kCommands = {"ingest", "windows",    "split", "synth",     "train-baseline",
                                                   "import-logs", "ifc",   "confusion", "histogram", "mask",
                                                   "plot",   "report"};

/// Runs one subcommand against the run directory `cfg.out`: reads its
/// declared inputs, writes its artifacts, refreshes manifest.json. Throws on
/// any failure, in which case no artifact of this command is written.
void run_command(const std::string& name, const AuditConfig& cfg, std::ostream& log);

/// Command-line entry point. Returns the process exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace har_audit::cli

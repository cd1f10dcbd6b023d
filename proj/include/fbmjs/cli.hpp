#pragma once

#include "fbmjs/config.hpp"
#include "fbmjs/reports.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace fbmjs {

const std::vector<std::string>& subcommand_names();

/// Runs one subcommand and writes its CSV/SVG files and manifest.txt (plus a
/// config.txt copy) under config.output_dir. Throws ConfigError for bad
/// configuration and NumericalError for numerical failures.
RunManifest execute_subcommand(const std::string& name, const ExperimentConfig& config,
                               std::ostream* log = nullptr);

/// execute_subcommand with errors mapped to exit codes: 0 success,
/// 1 configuration error, 2 numerical failure. One-line diagnostics go to
/// `err`.
int run_subcommand(const std::string& name, const ExperimentConfig& config, std::ostream& err,
                   std::ostream* log = nullptr);

}  // namespace fbmjs

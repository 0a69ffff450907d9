#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "distexp/simulator.hpp"

namespace distexp::cli {

inline constexpr const char* kCsvSchema = "# distexp-csv v1";

/// Flat key=value settings; later assignments win.
using Settings = std::map<std::string, std::string>;

/// Parses a config file body. Blank lines and lines starting with '#' are
/// skipped. Throws ConfigurationError naming the line for malformed lines
/// and unknown keys.
Settings parse_settings(const std::string& text, const std::string& origin = "config");

bool known_key(const std::string& key);

/// Builds the experiment described by settings. Throws ConfigurationError
/// naming the offending field.
ExperimentConfig build_config(const Settings& settings);

/// Effective configuration after defaults, as key=value lines in a fixed
/// order. Feeding the lines back through parse_settings reproduces the run.
std::vector<std::string> effective_settings(const ExperimentConfig& config);

/// Shortest round-trip decimal form.
std::string format_number(double v);

extern const char* const kRunHeader;

void write_run_rows(std::ostream& os, const ExperimentConfig& config, const BatchResult& batch,
                    const std::string& prefix = "");

/// Entry point shared by the executable and the tests. Returns the process
/// exit code: 0 on success, 2 on configuration errors, 1 on run failures.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace distexp::cli

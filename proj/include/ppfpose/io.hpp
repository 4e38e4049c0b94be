#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ppfpose/sim.hpp"

namespace ppfpose {

// Config files are flat "key = value" text. Vectors are space separated,
// lists of vectors are separated by ';'. '#' starts a comment. Keys that are
// absent keep the values of the "paper" scenario; unknown or repeated keys
// are rejected.

/// Shortest text that reloads to the same config (numbers use %.17g).
std::string serialize_config(const ScenarioConfig& cfg);

/// Throws ConfigError; `source` names the input in messages.
ScenarioConfig parse_config(const std::string& text, const std::string& source = "<config>");

/// Reads and parses a config file. Missing or unreadable files are a
/// ConfigError naming the path.
ScenarioConfig load_config(const std::filesystem::path& path);

/// %.17g, which round-trips every finite double.
std::string format_number(double x);

/// Bumped whenever csv_columns() changes.
inline constexpr int kCsvSchemaVersion = 1;

const std::vector<std::string>& csv_columns();
std::string csv_header();

void write_csv(std::ostream& out, const RunRecord& rec);

/// Worst |e_i| / xi_i over the run, per channel.
Vec4 max_envelope_usage(const RunRecord& rec);

void write_summary(std::ostream& out, const ScenarioConfig& cfg, const RunRecord& rec,
                   double wall_seconds);

/// Gnuplot script drawing Euler angles, positions and error-vs-envelope
/// from `csv_name`.
void write_plot_script(std::ostream& out, const std::string& csv_name);

}  // namespace ppfpose

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dilation/lyapunov.hpp"

namespace dilation {

/// Invalid configuration; the message names the offending field.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// section -> key -> raw value. Keys outside any section land in section "".
using ConfigTable = std::map<std::string, std::map<std::string, std::string>>;

struct RunConfig {
  std::string system_id;
  Params params;
  std::vector<int> ks;  // empty selects 1..d
  TheoremConfig theorem;
  std::filesystem::path output{"report.json"};
  bool write_csv = true;
};

/// Parses `key = value` lines grouped under `[section]` headers. `#` and `;`
/// start comments; blank lines are ignored.
///
///   [system]   id = <catalog id>, any other key is a system parameter
///   [run]      k, seed, family_budget, n_schedule, nl_schedule, m_list,
///              nodes_per_axis, truncation_r, tolerance, test_functions, method
///   [output]   report, csv, cache
ConfigTable parse_config_text(std::string_view text);
ConfigTable load_config_file(const std::filesystem::path& path);

/// Applies `section.key=value` on top of the table.
void apply_override(ConfigTable& table, std::string_view assignment);

RunConfig to_run_config(const ConfigTable& table);

/// Deterministic text form of a config; the report echoes it and hashes it.
std::string canonical_text(const RunConfig& config);
std::uint64_t config_hash(const RunConfig& config);

}  // namespace dilation

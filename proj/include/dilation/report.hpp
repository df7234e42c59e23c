#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "dilation/config.hpp"
#include "dilation/lyapunov.hpp"

namespace dilation {

inline constexpr const char* kToolName = "dilation";
inline constexpr const char* kToolVersion = "1.0.0";

/// Exit-code contract of `run`.
enum ExitCode : int { kExitOk = 0, kExitVerdictFailed = 1, kExitUsage = 2, kExitStageFailure = 3 };

nlohmann::json to_json(const Disk& disk);
nlohmann::json to_json(const DilationEstimate& estimate);
nlohmann::json to_json(const WitnessResult& witness);
nlohmann::json to_json(const SpreadReport& spread);
nlohmann::json to_json(const Spectrum& spectrum);
nlohmann::json to_json(const TheoremReport& report);

struct RunReport {
  /// Everything reproducible from config + seed. Serialized deterministically.
  nlohmann::json body;
  /// Wall-clock data; lives outside the body.
  nlohmann::json timing;
  std::vector<TheoremReport> theorems;
  bool all_verdicts = false;
};

/// Runs verify_theorem for every requested k. Throws ConfigError for an
/// invalid system or k before any computation, StageError on numeric failure.
RunReport run(const RunConfig& config);

/// Pretty-printed body text; identical configs give identical bytes.
std::string body_text(const RunReport& report);

/// Writes {"body": ..., "timing": ...} atomically (temp file + rename), plus
/// the CSV side files when enabled:
///   <stem>.dilation_k<k>.csv   n,best_log_ratio,best_disk_id
///   <stem>.limit_k<k>.csv      m,value
void write_report(const RunReport& report, const RunConfig& config);

/// CSV text for the dilation series, values in %.17g.
std::string dilation_csv(const DilationEstimate& estimate);
std::string limit_csv(const std::vector<std::pair<int, double>>& series);

/// Writes `text` to `path` via a temporary file and rename.
void write_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace dilation

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dilation/dynamics.hpp"
#include "dilation/measure.hpp"
#include "dilation/parallel.hpp"
#include "dilation/volume.hpp"

namespace dilation {

/// Lyapunov exponents, sorted nonincreasing.
struct Spectrum {
  std::vector<double> chis;
  int n_used = 0;
  int transient_discarded = 0;
  bool floored = false;
};

/// QR (Benettin) method: a full orthonormal frame is pushed along the orbit of
/// x0 and re-orthonormalized every step; log |R_ii| is averaged over the steps
/// after the transient. Requires n > transient >= 0.
Spectrum lyapunov_spectrum(const SystemDef& system, const Point& x0, int n, int transient);

/// chi_1 + ... + chi_k.
double chi_partial_sum(const Spectrum& spectrum, int k);

/// (m, integrate_log_norm(measure, system, m, k, r)) for every m in m_list.
std::vector<std::pair<int, double>> limit_diagnostic(const EmpiricalMeasure& measure, const SystemDef& system,
                                                     int k, const std::vector<int>& m_list, double r,
                                                     Exec exec = Exec::Parallel);

struct TheoremConfig {
  std::vector<int> n_schedule{5, 10, 15, 20, 25, 30};
  std::vector<int> nl_schedule{200, 1000, 5000};
  std::vector<int> m_list{1, 2, 5, 10};
  int family_budget = 8;
  std::uint64_t seed = 1;
  int nodes_per_axis = 0;  // 0 selects default_grid(k)
  double truncation_r = 50.0;
  double tolerance = 0.05;
  int test_functions = 20;
  DilationMethod method = DilationMethod::SlopeFit;
  std::optional<std::filesystem::path> cache_dir;
  Exec exec = Exec::Parallel;
};

/// Throws std::invalid_argument naming the offending field.
void validate(const TheoremConfig& config);

/// One level n_l of the construction: witness at time n_l, the spread reports
/// for every m, and the invariance residual of the measure built with max(m).
struct LevelReport {
  int n_l = 0;
  WitnessResult witness;
  std::vector<SpreadReport> spreads;
  double invariance_residual = 0.0;
};

struct TheoremReport {
  std::string system_id;
  Params params;
  int k = 1;
  DiskFamily family;
  DilationEstimate dilation;
  WitnessResult dilation_witness;  // witness at the largest dilation-schedule n
  std::vector<LevelReport> levels;
  std::vector<std::pair<int, double>> limit_diagnostic;
  Spectrum spectrum;
  double chi_partial_sum = 0.0;
  double tolerance = 0.05;
  bool verdict = false;  // d_k_hat <= chi_partial_sum + tolerance
  /// Wall-clock seconds per stage, accumulated over repeated stages.
  std::vector<std::pair<std::string, double>> stage_seconds;
};

/// A stage of verify_theorem failed; `stage` names it.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

/// dilation estimate -> witness -> spreading at every n_l -> limit diagnostic on
/// the largest level -> Lyapunov spectrum from the largest-level witness
/// (transient n_l / 10, length n_l) -> verdict.
TheoremReport verify_theorem(const SystemDef& system, int k, const TheoremConfig& config);

}  // namespace dilation

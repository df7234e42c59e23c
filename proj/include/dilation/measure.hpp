#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dilation/dynamics.hpp"
#include "dilation/parallel.hpp"
#include "dilation/volume.hpp"

namespace dilation {

/// Grid node where the k-cocycle norm at time n is largest. By pigeonhole over
/// the quadrature sum, log_cocycle >= log_ratio (hence also >= log_ratio - log 2).
struct WitnessResult {
  std::string disk_id;
  std::size_t node_index = 0;
  Eigen::VectorXd u_star;
  Point x_witness;
  int n = 0;
  int k = 1;
  double log_cocycle = 0.0;  // log |Lambda^k T_x f^n|
  double log_ratio = 0.0;    // log V(f^n o sigma) - log V(sigma)
  double epsilon = 0.0;      // (log_ratio - log_cocycle) / n, <= 0 on the grid
};

WitnessResult witness_point(const SystemDef& system, const Disk& disk, int n, int k, const QuadratureGrid& grid,
                            Exec exec = Exec::Parallel);

/// Uniformly weighted Dirac comb on f^p(x), p = 0..n_l - m, each atom of mass 1/n_l.
struct EmpiricalMeasure {
  std::vector<Point> atoms;
  int n_l = 0;
  int m = 0;

  double atom_weight() const { return 1.0 / n_l; }
  double total_mass() const { return static_cast<double>(atoms.size()) / n_l; }
};

EmpiricalMeasure build_empirical_measure(const SystemDef& system, const Point& x, int n_l, int m);

/// Bookkeeping for spreading the witness dilation over time with step m.
struct SpreadReport {
  int n_l = 0;
  int m = 0;
  int k = 1;
  std::vector<int> q;  // n_l = i + m q[i] + r[i]
  std::vector<int> r;
  double a_l = 0.0;     // (1/(m n_l)) sum_i log |Lambda^k T_{f^{i+m q_i} x} f^{r_i}|
  double b_l = 0.0;     // (1/(m n_l)) sum_i log |Lambda^k T_x f^i|
  double middle = 0.0;  // (1/m) int log |Lambda^k T_y f^m| d nu_l, truncated at -floor_r m
  double lhs = 0.0;     // log |Lambda^k T_x f^{n_l}| / n_l
  double bound_L = 1.0;
  double ab_bound = 0.0;     // k m^2 / (m n_l) log L
  double eps_prime = 0.0;    // lhs - middle
  double chain_slack = 0.0;  // lhs - (a_l + middle + b_l), <= 0
  double log_full = 0.0;     // log |Lambda^k T_x f^{n_l}|
  std::vector<double> telescoped;  // per residue i: right-hand side of the split product bound
};

struct SpreadResult {
  SpreadReport report;
  EmpiricalMeasure measure;
};

/// Samples used for the Lipschitz bound when the system has no analytic cap.
inline constexpr int kLipschitzSamples = 4096;

SpreadResult spread_in_time(const SystemDef& system, const WitnessResult& witness, int m, int k, double floor_r,
                            Exec exec = Exec::Parallel);

/// (1/m) * (1/n_l) * sum_atoms max(log |Lambda^k T_y f^m|, -r).
double integrate_log_norm(const EmpiricalMeasure& measure, const SystemDef& system, int m, int k, double r,
                          Exec exec = Exec::Parallel);

/// g(x) = cos(2 pi <wave, xi(x)> + phase) with xi the unit-cube coordinates of x.
struct TestFunction {
  Eigen::VectorXi wave;
  double phase = 0.0;

  double operator()(const SystemDef& system, const Point& x) const;
};

/// `count` test functions with nonzero integer waves in [-3, 3]^d and uniform phases.
std::vector<TestFunction> make_test_functions(int dim, int count, std::uint64_t seed);

/// |int g o f d nu - int g d nu| for one observable.
double test_function_residual(const EmpiricalMeasure& measure, const SystemDef& system, const TestFunction& g);

/// Largest residual over a seeded family of `test_functions` observables.
double invariance_residual(const EmpiricalMeasure& measure, const SystemDef& system, int test_functions,
                           std::uint64_t seed);

/// Cache file name for the atoms of a measure: hex FNV-1a hash of
/// (system id, parameters, start point bits, n_l, m).
std::string measure_cache_key(const SystemDef& system, const Point& start, int n_l, int m);

/// Text table: header lines, then one atom per row in %.17g (round-trips exactly).
void save_measure(const std::filesystem::path& path, const SystemDef& system, const EmpiricalMeasure& measure);
std::optional<EmpiricalMeasure> load_measure(const std::filesystem::path& path, const SystemDef& system);

/// Loads the measure from `cache_dir` when present, otherwise builds and stores it.
EmpiricalMeasure cached_empirical_measure(const std::filesystem::path& cache_dir, const SystemDef& system,
                                          const Point& x, int n_l, int m);

}  // namespace dilation

#include "dilation/lyapunov.hpp"

#include <algorithm>
#include <chrono>
#include <functional>

#include "dilation/exterior.hpp"

namespace dilation {

Spectrum lyapunov_spectrum(const SystemDef& system, const Point& x0, int n, int transient) {
  if (transient < 0 || n <= transient) throw std::invalid_argument("lyapunov_spectrum: need n > transient >= 0");
  const int d = system.dim();
  if (x0.size() != d) throw DimensionError("lyapunov_spectrum: start point has the wrong dimension");

  SmallMatrix frame = SmallMatrix::Identity(d, d);
  SmallMatrix next(d, d);
  std::vector<double> sums(static_cast<std::size_t>(d), 0.0);
  Spectrum out;
  Point x = x0;
  for (int step = 0; step < n; ++step) {
    next.noalias() = SmallMatrix(system.jacobian_raw(x)) * frame;
    frame = next;
    // Per-column Gram-Schmidt so each log |R_ii| is available separately.
    for (int j = 0; j < d; ++j) {
      for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i < j; ++i) frame.col(j) -= frame.col(i).dot(frame.col(j)) * frame.col(i);
      }
      double norm = frame.col(j).norm();
      double log_r = 0.0;
      if (norm > 0.0 && std::isfinite(norm)) {
        log_r = std::log(norm);
        frame.col(j) /= norm;
      } else {
        log_r = kLogFloor;
        out.floored = true;
        SmallMatrix fix = frame.leftCols(j + 1);
        fix.col(j) = Eigen::VectorXd::Unit(d, j);
        orthonormalize(fix);
        frame.col(j) = fix.col(j);
      }
      if (step >= transient) sums[static_cast<std::size_t>(j)] += log_r;
    }
    x = system.wrap(system.map_raw(x));
  }
  const int window = n - transient;
  out.chis.resize(sums.size());
  for (std::size_t j = 0; j < sums.size(); ++j) out.chis[j] = sums[j] / window;
  std::sort(out.chis.begin(), out.chis.end(), std::greater<>());
  out.n_used = window;
  out.transient_discarded = transient;
  return out;
}

double chi_partial_sum(const Spectrum& spectrum, int k) {
  if (k < 1 || k > static_cast<int>(spectrum.chis.size())) {
    throw std::invalid_argument("chi_partial_sum: k must lie in [1, d]");
  }
  double sum = 0.0;
  for (int i = 0; i < k; ++i) sum += spectrum.chis[static_cast<std::size_t>(i)];
  return sum;
}

std::vector<std::pair<int, double>> limit_diagnostic(const EmpiricalMeasure& measure, const SystemDef& system,
                                                     int k, const std::vector<int>& m_list, double r, Exec exec) {
  if (m_list.empty()) throw std::invalid_argument("limit_diagnostic: m_list is empty");
  std::vector<std::pair<int, double>> out;
  for (int m : m_list) {
    if (m < 1 || m >= measure.n_l) throw std::invalid_argument("limit_diagnostic: every m must satisfy 1 <= m < n_l");
    out.emplace_back(m, integrate_log_norm(measure, system, m, k, r, exec));
  }
  return out;
}

namespace {

void check_increasing(const std::vector<int>& values, const std::string& field, int minimum) {
  if (values.empty()) throw std::invalid_argument(field + ": must be nonempty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < minimum) throw std::invalid_argument(field + ": entries must be >= " + std::to_string(minimum));
    if (i > 0 && values[i] <= values[i - 1]) throw std::invalid_argument(field + ": must be strictly increasing");
  }
}

/// Runs one pipeline stage, tags its failures, and accumulates its wall time.
class StageRunner {
 public:
  explicit StageRunner(std::vector<std::pair<std::string, double>>& seconds) : seconds_(seconds) {}

  template <class Fn>
  auto operator()(const char* name, Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    struct Record {
      StageRunner& self;
      const char* name;
      std::chrono::steady_clock::time_point start;
      ~Record() {
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
        self.add(name, dt.count());
      }
    } record{*this, name, start};
    try {
      return fn();
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(name, e.what());
    }
  }

 private:
  void add(const std::string& name, double dt) {
    for (auto& [stage, total] : seconds_) {
      if (stage == name) {
        total += dt;
        return;
      }
    }
    seconds_.emplace_back(name, dt);
  }

  std::vector<std::pair<std::string, double>>& seconds_;
};

}  // namespace

void validate(const TheoremConfig& config) {
  check_increasing(config.n_schedule, "n_schedule", 1);
  check_increasing(config.nl_schedule, "nl_schedule", 2);
  check_increasing(config.m_list, "m_list", 1);
  if (config.m_list.back() >= config.nl_schedule.front()) {
    throw std::invalid_argument("m_list: every m must be smaller than every n_l (max m = " +
                                std::to_string(config.m_list.back()) +
                                ", min n_l = " + std::to_string(config.nl_schedule.front()) + ")");
  }
  if (config.family_budget < 0) throw std::invalid_argument("family_budget: must be >= 0");
  if (config.nodes_per_axis < 0) throw std::invalid_argument("nodes_per_axis: must be >= 0");
  if (!(config.truncation_r >= 0.0)) throw std::invalid_argument("truncation_r: must be >= 0");
  if (!(config.tolerance >= 0.0)) throw std::invalid_argument("tolerance: must be >= 0");
  if (config.test_functions < 1) throw std::invalid_argument("test_functions: must be >= 1");
}

TheoremReport verify_theorem(const SystemDef& system, int k, const TheoremConfig& config) {
  validate(config);
  if (k < 1 || k > system.dim()) throw std::invalid_argument("k: must lie in [1, " + std::to_string(system.dim()) + "]");

  TheoremReport rep;
  rep.system_id = system.id();
  rep.params = system.params();
  rep.k = k;
  rep.tolerance = config.tolerance;

  StageRunner stage(rep.stage_seconds);
  const QuadratureGrid grid = config.nodes_per_axis > 0 ? QuadratureGrid(k, config.nodes_per_axis) : default_grid(k);
  rep.family = stage("disk_family", [&] { return default_disk_family(system, k, config.family_budget, config.seed); });
  const DiskFamily& family = rep.family;
  rep.dilation = stage("dilation", [&] {
    return estimate_dilation(system, k, family, config.n_schedule, grid, config.method, config.exec);
  });
  const Disk& best = family[rep.dilation.records.back().best_disk_index];
  rep.dilation_witness = stage("witness", [&] {
    return witness_point(system, best, config.n_schedule.back(), k, grid, config.exec);
  });

  const int m_max = config.m_list.back();
  EmpiricalMeasure top_measure;
  for (int n_l : config.nl_schedule) {
    LevelReport level;
    level.n_l = n_l;
    level.witness = stage("witness", [&] { return witness_point(system, best, n_l, k, grid, config.exec); });
    for (int m : config.m_list) {
      auto spread = stage("spread", [&] {
        return spread_in_time(system, level.witness, m, k, config.truncation_r, config.exec);
      });
      level.spreads.push_back(std::move(spread.report));
    }
    EmpiricalMeasure measure = stage("measure", [&] {
      return config.cache_dir
                 ? cached_empirical_measure(*config.cache_dir, system, level.witness.x_witness, n_l, m_max)
                 : build_empirical_measure(system, level.witness.x_witness, n_l, m_max);
    });
    level.invariance_residual = stage("invariance", [&] {
      return invariance_residual(measure, system, config.test_functions, config.seed);
    });
    rep.levels.push_back(std::move(level));
    top_measure = std::move(measure);
  }

  rep.limit_diagnostic = stage("limit", [&] {
    return limit_diagnostic(top_measure, system, k, config.m_list, config.truncation_r, config.exec);
  });

  const LevelReport& top = rep.levels.back();
  rep.spectrum = stage("spectrum", [&] {
    return lyapunov_spectrum(system, top.witness.x_witness, top.n_l, top.n_l / 10);
  });
  rep.chi_partial_sum = chi_partial_sum(rep.spectrum, k);
  rep.verdict = rep.dilation.d_k_hat <= rep.chi_partial_sum + rep.tolerance;
  return rep;
}

}  // namespace dilation

#include "dilation/volume.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace dilation {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double phase_of(const TrigTerm& term, const Eigen::VectorXd& u) {
  double arg = term.phase;
  for (std::size_t j = 0; j < term.freq.size(); ++j) arg += kTwoPi * term.freq[j] * u[static_cast<Eigen::Index>(j)];
  return arg;
}

void check_schedule(const std::vector<int>& schedule, const char* where) {
  if (schedule.empty()) throw std::invalid_argument(std::string(where) + ": schedule is empty");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (schedule[i] < 0 || (i > 0 && schedule[i] <= schedule[i - 1])) {
      throw std::invalid_argument(std::string(where) + ": schedule must be nonnegative and strictly increasing");
    }
  }
}

}  // namespace

void validate_disk(const SystemDef& system, const Disk& disk) {
  const int d = system.dim();
  if (disk.k < 1 || disk.k > d) throw std::invalid_argument("disk '" + disk.id + "': k must lie in [1, d]");
  if (disk.base.size() != d || disk.frame.rows() != d || disk.frame.cols() != disk.k) {
    throw std::invalid_argument("disk '" + disk.id + "': base/frame shape does not match the system");
  }
  if (!(disk.scale > 0.0) || !std::isfinite(disk.scale)) {
    throw std::invalid_argument("disk '" + disk.id + "': scale must be positive");
  }
  for (int i = 0; i < disk.k; ++i) {
    if (std::abs(disk.frame.col(i).norm() - 1.0) > 1e-12) {
      throw std::invalid_argument("disk '" + disk.id + "': frame columns must have unit norm");
    }
    for (int j = 0; j < i; ++j) {
      if (std::abs(disk.frame.col(i).dot(disk.frame.col(j))) > 0.99) {
        throw std::invalid_argument("disk '" + disk.id + "': frame columns are nearly parallel");
      }
    }
  }
  for (const auto& term : disk.perturb) {
    if (static_cast<int>(term.freq.size()) != disk.k || term.coeff.size() != d) {
      throw std::invalid_argument("disk '" + disk.id + "': perturbation term has the wrong shape");
    }
  }
}

Point disk_point(const SystemDef& system, const Disk& disk, const Eigen::VectorXd& u) {
  Point x = disk.base + disk.scale * disk.frame * (u.array() - 0.5).matrix();
  for (const auto& term : disk.perturb) x += term.coeff * std::sin(phase_of(term, u));
  x = system.wrap(std::move(x));
  if (!system.contains(x)) throw std::domain_error("disk '" + disk.id + "' leaves the system domain");
  return x;
}

Matrix disk_tangent(const Disk& disk, const Eigen::VectorXd& u) {
  Matrix t = disk.scale * disk.frame;
  for (const auto& term : disk.perturb) {
    const double c = std::cos(phase_of(term, u));
    for (int j = 0; j < disk.k; ++j) t.col(j) += term.coeff * (c * kTwoPi * term.freq[static_cast<std::size_t>(j)]);
  }
  return t;
}

QuadratureGrid::QuadratureGrid(int k, int nodes_per_axis) : k_(k), n_(nodes_per_axis), size_(1) {
  if (k < 1 || nodes_per_axis < 1) throw std::invalid_argument("QuadratureGrid: k and nodes_per_axis must be >= 1");
  for (int i = 0; i < k; ++i) {
    size_ *= static_cast<std::size_t>(nodes_per_axis);
    if (size_ > 10'000'000) throw std::invalid_argument("QuadratureGrid: too many nodes");
  }
}

Eigen::VectorXd QuadratureGrid::node(std::size_t index) const {
  Eigen::VectorXd u(k_);
  for (int axis = 0; axis < k_; ++axis) {
    const auto digit = index % static_cast<std::size_t>(n_);
    index /= static_cast<std::size_t>(n_);
    u[axis] = (static_cast<double>(digit) + 0.5) / n_;
  }
  return u;
}

QuadratureGrid default_grid(int k) {
  if (k <= 2) return {k, 17};
  if (k == 3) return {k, 9};
  return {k, 5};
}

NodeGrowth node_growth(const SystemDef& system, const Disk& disk, const Eigen::VectorXd& u,
                       const std::vector<int>& schedule) {
  NodeGrowth out;
  const Point x = disk_point(system, disk, u);
  const Matrix tangent = disk_tangent(disk, u);
  const LogNorm vol = exterior_log_norm(tangent, disk.k);
  out.log_volume = vol.value;
  out.floored = vol.is_floor;

  const int horizon = schedule.empty() ? 0 : schedule.back();
  const auto jacs = jacobians_along(system, x, horizon);
  SmallMatrix frame = tangent;
  orthonormalize(frame);
  SmallMatrix next(frame.rows(), frame.cols());

  out.push.reserve(schedule.size());
  double acc = 0.0;
  std::size_t s = 0;
  while (s < schedule.size() && schedule[s] == 0) {
    out.push.push_back(0.0);
    ++s;
  }
  // Same step order and accumulation as push_frame, so prefixes agree bitwise.
  for (int p = 0; p < horizon; ++p) {
    next.noalias() = jacs[static_cast<std::size_t>(p)] * frame;
    frame = next;
    acc += orthonormalize(frame).value;
    while (s < schedule.size() && schedule[s] == p + 1) {
      out.push.push_back(acc);
      ++s;
    }
  }
  return out;
}

double log_volume(const Disk& disk, const QuadratureGrid& grid, Exec exec) {
  if (grid.k() != disk.k) throw std::invalid_argument("log_volume: grid dimension does not match disk");
  const auto node_values = map_indices<LogNorm>(exec, grid.size(), [&](std::size_t i) {
    return exterior_log_norm(disk_tangent(disk, grid.node(i)), disk.k);
  });
  std::vector<double> terms;
  terms.reserve(node_values.size());
  bool any_regular = false;
  for (const auto& v : node_values) {
    any_regular = any_regular || !v.is_floor;
    terms.push_back(grid.log_weight() + v.value);
  }
  if (!any_regular) throw DegenerateDiskError("disk '" + disk.id + "' has zero k-volume at every node");
  return log_sum_exp(terms);
}

std::vector<double> log_iterated_volume_series(const SystemDef& system, const Disk& disk,
                                               const std::vector<int>& schedule, const QuadratureGrid& grid,
                                               Exec exec) {
  check_schedule(schedule, "log_iterated_volume");
  if (grid.k() != disk.k) throw std::invalid_argument("log_iterated_volume: grid dimension does not match disk");
  validate_disk(system, disk);
  const auto nodes = map_indices<NodeGrowth>(
      exec, grid.size(), [&](std::size_t i) { return node_growth(system, disk, grid.node(i), schedule); });
  if (std::all_of(nodes.begin(), nodes.end(), [](const NodeGrowth& g) { return g.floored; })) {
    throw DegenerateDiskError("disk '" + disk.id + "' has zero k-volume at every node");
  }
  std::vector<double> out(schedule.size());
  std::vector<double> terms(nodes.size());
  for (std::size_t s = 0; s < schedule.size(); ++s) {
    for (std::size_t i = 0; i < nodes.size(); ++i) terms[i] = grid.log_weight() + nodes[i].log_volume + nodes[i].push[s];
    out[s] = log_sum_exp(terms);
  }
  return out;
}

double log_iterated_volume(const SystemDef& system, const Disk& disk, int n, const QuadratureGrid& grid,
                           Exec exec) {
  if (n < 0) throw std::invalid_argument("log_iterated_volume: n must be nonnegative");
  return log_iterated_volume_series(system, disk, {n}, grid, exec).front();
}

double slope_fit_estimate(const std::vector<DilationRecord>& records) {
  if (records.empty()) throw std::invalid_argument("slope_fit_estimate: no records");
  const std::size_t first = records.size() / 2;
  const std::size_t count = records.size() - first;
  const auto& last = records.back();
  if (count < 2) return last.n > 0 ? last.best_log_ratio / last.n : 0.0;
  double mean_n = 0.0;
  double mean_r = 0.0;
  for (std::size_t i = first; i < records.size(); ++i) {
    mean_n += records[i].n;
    mean_r += records[i].best_log_ratio;
  }
  mean_n /= static_cast<double>(count);
  mean_r /= static_cast<double>(count);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = first; i < records.size(); ++i) {
    const double dn = records[i].n - mean_n;
    sxy += dn * (records[i].best_log_ratio - mean_r);
    sxx += dn * dn;
  }
  return sxy / sxx;
}

DilationEstimate estimate_dilation(const SystemDef& system, int k, const DiskFamily& family,
                                   const std::vector<int>& schedule, const QuadratureGrid& grid,
                                   DilationMethod method, Exec exec) {
  check_schedule(schedule, "estimate_dilation");
  if (family.empty()) throw DegenerateDiskError("estimate_dilation: empty disk family");
  if (k < 1 || k > system.dim()) throw std::invalid_argument("estimate_dilation: k must lie in [1, d]");

  DilationEstimate est;
  est.k = k;
  est.method = method;
  est.records.resize(schedule.size());
  for (std::size_t s = 0; s < schedule.size(); ++s) {
    est.records[s].n = schedule[s];
    est.records[s].best_log_ratio = -std::numeric_limits<double>::infinity();
  }
  for (std::size_t f = 0; f < family.size(); ++f) {
    const Disk& disk = family[f];
    if (disk.k != k) throw std::invalid_argument("estimate_dilation: disk '" + disk.id + "' has the wrong k");
    const double base = log_volume(disk, grid, exec);
    const auto series = log_iterated_volume_series(system, disk, schedule, grid, exec);
    for (std::size_t s = 0; s < schedule.size(); ++s) {
      const double ratio = series[s] - base;
      if (ratio > est.records[s].best_log_ratio) {
        est.records[s].best_log_ratio = ratio;
        est.records[s].best_disk_id = disk.id;
        est.records[s].best_disk_index = f;
      }
    }
  }
  est.slope_fit = slope_fit_estimate(est.records);
  const auto& last = est.records.back();
  est.last_point = last.n > 0 ? last.best_log_ratio / last.n : 0.0;
  est.d_k_hat = method == DilationMethod::SlopeFit ? est.slope_fit : est.last_point;
  return est;
}

DiskFamily default_disk_family(const SystemDef& system, int k, int budget, std::uint64_t seed) {
  const int d = system.dim();
  if (k < 1 || k > d) throw std::invalid_argument("default_disk_family: k must lie in [1, d]");
  if (budget < 0) throw std::invalid_argument("default_disk_family: budget must be nonnegative");
  constexpr double kScale = 0.1;

  DiskFamily family;
  for (const auto& axes : combinations(d, k)) {
    Disk disk;
    disk.id = "axis";
    for (int a : axes) disk.id += "_" + std::to_string(a);
    disk.k = k;
    disk.base = system.center();
    disk.frame = Matrix::Zero(d, k);
    for (int j = 0; j < k; ++j) disk.frame(axes[static_cast<std::size_t>(j)], j) = 1.0;
    disk.scale = kScale;
    family.push_back(std::move(disk));
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  // Keep box-domain disks inside the box: half-diagonal of the parameter cube image.
  const double margin = system.is_torus() ? 0.0 : 0.5 * kScale * std::sqrt(static_cast<double>(k));
  for (int b = 0; b < budget; ++b) {
    Disk disk;
    disk.id = "random_" + std::to_string(b);
    disk.k = k;
    Eigen::VectorXd u(d);
    for (int i = 0; i < d; ++i) u[i] = margin + (1.0 - 2.0 * margin) * uniform(rng);
    disk.base = system.from_unit_cube(u);
    SmallMatrix frame(d, k);
    for (int j = 0; j < k; ++j) {
      for (int i = 0; i < d; ++i) frame(i, j) = gauss(rng);
    }
    orthonormalize(frame);
    disk.frame = frame;
    disk.scale = kScale;
    family.push_back(std::move(disk));
  }
  return family;
}

}  // namespace dilation

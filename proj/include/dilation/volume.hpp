#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dilation/dynamics.hpp"
#include "dilation/exterior.hpp"
#include "dilation/parallel.hpp"

namespace dilation {

/// Raised when every quadrature node of a disk has a vanishing k-volume.
class DegenerateDiskError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One term coeff * sin(2 pi <freq, u> + phase) of a disk perturbation.
struct TrigTerm {
  std::vector<int> freq;  // length k
  double phase = 0.0;
  Eigen::VectorXd coeff;  // length d
};

/// A C^1 disk sigma : [0,1]^k -> M,
///   sigma(u) = base + scale * frame * (u - 1/2) + sum_t coeff_t sin(2 pi <freq_t, u> + phase_t),
/// wrapped into the domain.
struct Disk {
  std::string id;
  int k = 1;
  Point base;
  Matrix frame;  // d x k, unit columns
  double scale = 0.1;
  std::vector<TrigTerm> perturb;
};

using DiskFamily = std::vector<Disk>;

/// Throws std::invalid_argument when the disk breaks its invariants: sizes,
/// unit-norm frame columns, pairwise |dot| <= 0.99, positive scale.
void validate_disk(const SystemDef& system, const Disk& disk);

/// sigma(u), wrapped. Throws std::domain_error if a box-domain disk leaves the box.
Point disk_point(const SystemDef& system, const Disk& disk, const Eigen::VectorXd& u);

/// T_u sigma, a d x k matrix.
Matrix disk_tangent(const Disk& disk, const Eigen::VectorXd& u);

/// Midpoint rule on the uniform N^k subdivision of [0,1]^k. Node i has
/// axis-0 digit i mod N, axis-1 digit (i / N) mod N, and so on.
class QuadratureGrid {
 public:
  QuadratureGrid(int k, int nodes_per_axis);

  int k() const { return k_; }
  int nodes_per_axis() const { return n_; }
  std::size_t size() const { return size_; }
  double weight() const { return 1.0 / static_cast<double>(size_); }
  double log_weight() const { return -std::log(static_cast<double>(size_)); }
  Eigen::VectorXd node(std::size_t index) const;

 private:
  int k_;
  int n_;
  std::size_t size_;
};

/// 17 nodes per axis for k <= 2, 9 for k = 3, 5 for k >= 4.
QuadratureGrid default_grid(int k);

/// log V(sigma) = log sum_u w |Lambda^k T_u sigma|.
double log_volume(const Disk& disk, const QuadratureGrid& grid, Exec exec = Exec::Parallel);

/// log V(f^n o sigma): at each node the tangent frame T_u sigma is pushed through
/// the QR-renormalized cocycle, which gives log |Lambda^k (T_{sigma(u)} f^n T_u sigma)|
/// exactly. n = 0 reproduces log_volume.
double log_iterated_volume(const SystemDef& system, const Disk& disk, int n, const QuadratureGrid& grid,
                           Exec exec = Exec::Parallel);

/// log V(f^n o sigma) for every n in `schedule` (increasing), sharing one
/// orbit per node. Entry i equals log_iterated_volume(system, disk, schedule[i], grid).
std::vector<double> log_iterated_volume_series(const SystemDef& system, const Disk& disk,
                                               const std::vector<int>& schedule, const QuadratureGrid& grid,
                                               Exec exec = Exec::Parallel);

/// Per-node quantities shared by the volume integrals and the witness search.
struct NodeGrowth {
  double log_volume = 0.0;   // log |Lambda^k T_u sigma|
  std::vector<double> push;  // log growth of the tangent frame at each schedule entry
  bool floored = false;
};

NodeGrowth node_growth(const SystemDef& system, const Disk& disk, const Eigen::VectorXd& u,
                       const std::vector<int>& schedule);

enum class DilationMethod { SlopeFit, LastPoint };

struct DilationRecord {
  int n = 0;
  double best_log_ratio = 0.0;
  std::string best_disk_id;
  std::size_t best_disk_index = 0;
};

struct DilationEstimate {
  int k = 1;
  std::vector<DilationRecord> records;
  double d_k_hat = 0.0;
  DilationMethod method = DilationMethod::SlopeFit;
  double slope_fit = 0.0;
  double last_point = 0.0;
};

/// Least-squares slope through (n, best_log_ratio) over the upper half of the
/// records; falls back to the last ratio / n when that half has one entry.
double slope_fit_estimate(const std::vector<DilationRecord>& records);

DilationEstimate estimate_dilation(const SystemDef& system, int k, const DiskFamily& family,
                                   const std::vector<int>& schedule, const QuadratureGrid& grid,
                                   DilationMethod method = DilationMethod::SlopeFit,
                                   Exec exec = Exec::Parallel);

/// All C(d,k) coordinate-plane disks at the domain center, then `budget` random
/// affine disks (random base, QR-orthonormalized Gaussian frame); scale 0.1.
DiskFamily default_disk_family(const SystemDef& system, int k, int budget, std::uint64_t seed);

}  // namespace dilation

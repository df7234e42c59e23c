#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "dilation/dynamics.hpp"

namespace dilation {

/// Stand-in for log 0 when a singular value or a step's k-volume vanishes,
/// about log of the smallest positive double. Finite log-norms below it are
/// legitimate (long contracting cocycles) and are not clamped.
inline constexpr double kLogFloor = -745.0;

/// log |Lambda^k L| with a flag recording that the singular floor was applied.
struct LogNorm {
  double value = 0.0;
  bool is_floor = false;
};

/// Sum of the logs of the k largest singular values of `a` (d x d', 1 <= k <= min(d, d')).
/// This is the operator norm of Lambda^k a for the induced inner product on
/// k-vectors. If sigma_k = 0 the value is kLogFloor and is_floor is set.
LogNorm exterior_log_norm(const Matrix& a, int k);

/// Lexicographically ordered k-subsets of {0, ..., n-1}.
std::vector<std::vector<int>> combinations(int n, int k);

/// Matrix of all k x k minors of `a`, rows and columns ordered lexicographically.
/// This is the matrix of Lambda^k a in the standard basis of k-vectors.
Matrix compound_matrix(const Matrix& a, int k);

/// Brute-force counterpart of exterior_log_norm: log of the largest singular
/// value of the compound matrix. Refuses dimensions above 8.
LogNorm minor_matrix_log_norm(const Matrix& a, int k);

/// Orthonormalizes the columns of `frame` in place (Gram-Schmidt, two passes)
/// and returns sum_i log |R_ii|, the log k-volume spanned by the input columns.
/// A vanishing column contributes kLogFloor and is replaced by an orthogonal
/// unit vector.
LogNorm orthonormalize(SmallMatrix& frame);

/// Pushes an orthonormal d x k frame through T_{n-1} ... T_0, re-orthonormalizing
/// after every step. Returns the accumulated log k-volume expansion; on return
/// `frame` holds the orthonormalized image.
LogNorm push_frame(std::span<const SmallMatrix> jacobians, SmallMatrix& frame);

/// Fixed well-spread orthonormal d x k frame used to start power iterations.
SmallMatrix generic_frame(int dim, int k);

/// Cocycles up to this length are evaluated as a rescaled product of compound
/// matrices; longer ones by frame power iteration.
inline constexpr int kDenseCocycleMaxSteps = 64;

/// log |Lambda^k (T_{n-1} ... T_0)| for the Jacobians of an orbit segment.
///
/// k = d: sum of log |det T_p|.
/// n <= kDenseCocycleMaxSteps: top singular value of the product of k-th
///   compound matrices, rescaled every step.
/// otherwise: alternating forward/backward QR power iteration of a k-frame,
///   started from `seed` (orthonormalized) or generic_frame, until the
///   forward growth stagnates. Each forward pass is a lower bound for the norm
///   and the passes are nondecreasing.
/// When `seed` is given the result is never below the growth of the seed frame
/// itself.
LogNorm cocycle_log_norm(std::span<const SmallMatrix> jacobians, int k,
                         const SmallMatrix* seed = nullptr);

/// log |Lambda^k T_x f^n|; 0 for n = 0.
LogNorm cocycle_log_norm(const SystemDef& system, const Point& x, int n, int k,
                         const SmallMatrix* seed = nullptr);

/// log(sum_i exp(a_i)) evaluated in index order.
double log_sum_exp(std::span<const double> values);

}  // namespace dilation

#include "dilation/exterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace dilation {

namespace {

void check_k(int k, Eigen::Index rows, Eigen::Index cols, const char* where) {
  if (k < 1 || k > std::min(rows, cols)) {
    throw std::invalid_argument(std::string(where) + ": k=" + std::to_string(k) +
                                " outside [1, " + std::to_string(std::min(rows, cols)) + "]");
  }
}

constexpr int kMaxPowerRounds = 200;
constexpr double kStagnation = 1e-14;

}  // namespace

LogNorm exterior_log_norm(const Matrix& a, int k) {
  check_k(k, a.rows(), a.cols(), "exterior_log_norm");
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& sv = svd.singularValues();
  if (!(sv(k - 1) > 0.0)) return {kLogFloor, true};
  double sum = 0.0;
  for (int i = 0; i < k; ++i) sum += std::log(sv(i));
  return {sum, false};
}

std::vector<std::vector<int>> combinations(int n, int k) {
  std::vector<std::vector<int>> out;
  if (k < 0 || k > n) return out;
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    out.push_back(idx);
    int pos = k - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n - k + pos) --pos;
    if (pos < 0) break;
    ++idx[static_cast<std::size_t>(pos)];
    for (int j = pos + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

Matrix compound_matrix(const Matrix& a, int k) {
  check_k(k, a.rows(), a.cols(), "compound_matrix");
  if (k == 1) return a;
  const auto rows = combinations(static_cast<int>(a.rows()), k);
  const auto cols = combinations(static_cast<int>(a.cols()), k);
  Matrix out(rows.size(), cols.size());
  Matrix sub(k, k);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) sub(i, j) = a(rows[r][static_cast<std::size_t>(i)], cols[c][static_cast<std::size_t>(j)]);
      }
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = sub.determinant();
    }
  }
  return out;
}

LogNorm minor_matrix_log_norm(const Matrix& a, int k) {
  if (a.rows() > 8 || a.cols() > 8) {
    throw std::invalid_argument("minor_matrix_log_norm: dimension above 8 refused");
  }
  check_k(k, a.rows(), a.cols(), "minor_matrix_log_norm");
  const Matrix c = compound_matrix(a, k);
  Eigen::JacobiSVD<Matrix> svd(c);
  const double top = svd.singularValues()(0);
  if (!(top > 0.0)) return {kLogFloor, true};
  return {std::log(top), false};
}

LogNorm orthonormalize(SmallMatrix& frame) {
  const auto d = frame.rows();
  const auto k = frame.cols();
  LogNorm out;
  for (Eigen::Index j = 0; j < k; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index i = 0; i < j; ++i) frame.col(j) -= frame.col(i).dot(frame.col(j)) * frame.col(i);
    }
    const double norm = frame.col(j).norm();
    if (norm > 0.0 && std::isfinite(norm)) {
      out.value += std::log(norm);
      frame.col(j) /= norm;
      continue;
    }
    out.value += kLogFloor;
    out.is_floor = true;
    // Replace with the first coordinate direction that survives orthogonalization.
    for (Eigen::Index t = 0; t < d; ++t) {
      Eigen::VectorXd v = Eigen::VectorXd::Unit(d, t);
      for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index i = 0; i < j; ++i) v -= frame.col(i).dot(v) * frame.col(i);
      }
      if (v.norm() > 0.5) {
        frame.col(j) = v.normalized();
        break;
      }
    }
  }
  return out;
}

LogNorm push_frame(std::span<const SmallMatrix> jacobians, SmallMatrix& frame) {
  LogNorm total;
  SmallMatrix next(frame.rows(), frame.cols());
  for (const auto& jac : jacobians) {
    next.noalias() = jac * frame;
    frame = next;
    const LogNorm step = orthonormalize(frame);
    total.value += step.value;
    total.is_floor = total.is_floor || step.is_floor;
  }
  return total;
}

SmallMatrix generic_frame(int dim, int k) {
  SmallMatrix frame(dim, k);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < k; ++j) frame(i, j) = 1.0 / (i + j + 1.0) + (i == j ? 1.0 : 0.0);
  }
  orthonormalize(frame);
  return frame;
}

namespace {

LogNorm determinant_cocycle(std::span<const SmallMatrix> jacobians) {
  LogNorm out;
  for (const auto& jac : jacobians) {
    const double det = std::abs(jac.determinant());
    if (det > 0.0) {
      out.value += std::log(det);
    } else {
      out.value += kLogFloor;
      out.is_floor = true;
    }
  }
  return out;
}

LogNorm dense_cocycle(std::span<const SmallMatrix> jacobians, int k) {
  Matrix product = compound_matrix(Matrix(jacobians.front()), k);
  double log_scale = 0.0;
  for (std::size_t p = 0; p < jacobians.size(); ++p) {
    if (p > 0) product = compound_matrix(Matrix(jacobians[p]), k) * product;
    const double mag = product.cwiseAbs().maxCoeff();
    if (!(mag > 0.0) || !std::isfinite(mag)) return {kLogFloor, true};
    log_scale += std::log(mag);
    product /= mag;
  }
  Eigen::JacobiSVD<Matrix> svd(product);
  const double top = svd.singularValues()(0);
  if (!(top > 0.0)) return {kLogFloor, true};
  return {log_scale + std::log(top), false};
}

LogNorm power_cocycle(std::span<const SmallMatrix> jacobians, int k, SmallMatrix frame) {
  const int dim = static_cast<int>(jacobians.front().rows());
  LogNorm best{-std::numeric_limits<double>::infinity(), false};
  double previous = best.value;
  SmallMatrix next(dim, k);
  for (int round = 0; round < kMaxPowerRounds; ++round) {
    const LogNorm forward = push_frame(jacobians, frame);
    if (forward.value > best.value) best = forward;
    if (round >= 1 && std::abs(forward.value - previous) <= kStagnation * std::max(1.0, std::abs(forward.value))) {
      break;
    }
    previous = forward.value;
    // frame now approximates the top left singular subspace; pull it back
    // through the transposed cocycle to refine the right singular subspace.
    for (auto it = jacobians.rbegin(); it != jacobians.rend(); ++it) {
      next.noalias() = it->transpose() * frame;
      frame = next;
      orthonormalize(frame);
    }
  }
  return best;
}

}  // namespace

LogNorm cocycle_log_norm(std::span<const SmallMatrix> jacobians, int k, const SmallMatrix* seed) {
  if (jacobians.empty()) return {0.0, false};
  const auto dim = jacobians.front().rows();
  check_k(k, dim, dim, "cocycle_log_norm");

  std::optional<LogNorm> seeded_growth;
  SmallMatrix start = generic_frame(static_cast<int>(dim), k);
  if (seed != nullptr) {
    if (seed->rows() != dim || seed->cols() != k) {
      throw DimensionError("cocycle_log_norm: seed frame must be d x k");
    }
    start = *seed;
    orthonormalize(start);
    SmallMatrix probe = start;
    seeded_growth = push_frame(jacobians, probe);
  }

  LogNorm result;
  if (k == dim) {
    result = determinant_cocycle(jacobians);
  } else if (static_cast<int>(jacobians.size()) <= kDenseCocycleMaxSteps) {
    result = dense_cocycle(jacobians, k);
  } else {
    result = power_cocycle(jacobians, k, start);
  }
  if (seeded_growth && seeded_growth->value > result.value) result = *seeded_growth;
  return result;
}

LogNorm cocycle_log_norm(const SystemDef& system, const Point& x, int n, int k, const SmallMatrix* seed) {
  if (n < 0) throw std::invalid_argument("cocycle_log_norm: n must be nonnegative");
  check_k(k, system.dim(), system.dim(), "cocycle_log_norm");
  if (n == 0) return {0.0, false};
  const auto jacs = jacobians_along(system, x, n);
  return cocycle_log_norm(jacs, k, seed);
}

double log_sum_exp(std::span<const double> values) {
  double top = -std::numeric_limits<double>::infinity();
  for (double v : values) top = std::max(top, v);
  if (!std::isfinite(top)) return top;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - top);
  return top + std::log(acc);
}

}  // namespace dilation

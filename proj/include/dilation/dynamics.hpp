#pragma once

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace dilation {

/// Largest ambient dimension supported. Frames and Jacobians use fixed-capacity
/// storage of this size so the inner QR loops never touch the heap.
inline constexpr int kMaxDim = 8;

using Point = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SmallMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

using Params = std::map<std::string, double>;

/// Flat torus [0,1)^d with the Euclidean metric.
struct TorusDomain {};

/// Axis-aligned forward-invariant box in R^d.
struct BoxDomain {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
};

using Domain = std::variant<TorusDomain, BoxDomain>;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A discrete dynamical system f : M -> M with its tangent map. Immutable after
/// construction; safe to share across threads.
class SystemDef {
 public:
  using MapRule = std::function<Point(const Point&)>;
  using JacobianRule = std::function<Matrix(const Point&)>;

  SystemDef(std::string id, Params params, int dim, Domain domain, MapRule map_rule,
            JacobianRule jacobian_rule, std::optional<double> lipschitz_cap = std::nullopt);

  const std::string& id() const { return id_; }
  const Params& params() const { return params_; }
  int dim() const { return dim_; }
  const Domain& domain() const { return domain_; }
  bool is_torus() const { return std::holds_alternative<TorusDomain>(domain_); }
  std::optional<double> lipschitz_cap() const { return lipschitz_cap_; }

  /// Raw rule, without the torus wrap.
  Point map_raw(const Point& x) const { return map_rule_(x); }
  Matrix jacobian_raw(const Point& x) const { return jacobian_rule_(x); }

  bool contains(const Point& x) const;
  /// Torus: x - floor(x) per coordinate. Box: identity.
  Point wrap(Point x) const;
  /// Center of the domain (0.5 per axis on the torus).
  Point center() const;
  /// Maps unit-cube coordinates onto the domain.
  Point from_unit_cube(const Eigen::VectorXd& u) const;

 private:
  std::string id_;
  Params params_;
  int dim_;
  Domain domain_;
  MapRule map_rule_;
  JacobianRule jacobian_rule_;
  std::optional<double> lipschitz_cap_;
};

struct Orbit {
  std::vector<Point> points;

  const Point& start() const { return points.front(); }
  int length() const { return static_cast<int>(points.size()) - 1; }
};

Point evaluate(const SystemDef& system, const Point& x);
Matrix jacobian(const SystemDef& system, const Point& x);
Orbit iterate(const SystemDef& system, const Point& x, int n);

/// Jacobians T_{f^p x} f for p = 0..n-1, in fixed-capacity storage.
std::vector<SmallMatrix> jacobians_along(const SystemDef& system, const Point& x, int n);

/// L = max(max_x |T_x f|, 1). Uses the analytic cap when the system has one,
/// otherwise the largest spectral norm over the first `samples` points of a
/// Kronecker (golden-ratio) sequence on the domain. The sample sets are nested,
/// so the result is nondecreasing in `samples`.
double lipschitz_bound(const SystemDef& system, int samples);

/// Point number `index` of the nested Kronecker sequence on [0,1)^d.
Eigen::VectorXd kronecker_point(int dim, long long index);

/// Largest relative error between the analytic Jacobian and a central finite
/// difference of the map at x. Torus wrap is undone before differencing.
double jacobian_fd_error(const SystemDef& system, const Point& x, double step = 1e-6);

}  // namespace dilation

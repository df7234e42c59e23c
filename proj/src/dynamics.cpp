#include "dilation/dynamics.hpp"

#include <cmath>
#include <utility>

namespace dilation {

SystemDef::SystemDef(std::string id, Params params, int dim, Domain domain, MapRule map_rule,
                     JacobianRule jacobian_rule, std::optional<double> lipschitz_cap)
    : id_(std::move(id)),
      params_(std::move(params)),
      dim_(dim),
      domain_(std::move(domain)),
      map_rule_(std::move(map_rule)),
      jacobian_rule_(std::move(jacobian_rule)),
      lipschitz_cap_(lipschitz_cap) {
  if (dim_ < 1 || dim_ > kMaxDim) {
    throw DimensionError("system '" + id_ + "': dimension must be in [1, " +
                         std::to_string(kMaxDim) + "]");
  }
  if (const auto* box = std::get_if<BoxDomain>(&domain_)) {
    if (box->lo.size() != dim_ || box->hi.size() != dim_ || (box->hi.array() <= box->lo.array()).any()) {
      throw std::invalid_argument("system '" + id_ + "': malformed box domain");
    }
  }
  if (lipschitz_cap_ && !(*lipschitz_cap_ > 0.0)) {
    throw std::invalid_argument("system '" + id_ + "': lipschitz cap must be positive");
  }
}

bool SystemDef::contains(const Point& x) const {
  if (x.size() != dim_ || !x.allFinite()) return false;
  if (is_torus()) return (x.array() >= 0.0).all() && (x.array() < 1.0).all();
  const auto& box = std::get<BoxDomain>(domain_);
  return (x.array() >= box.lo.array()).all() && (x.array() <= box.hi.array()).all();
}

Point SystemDef::wrap(Point x) const {
  if (!is_torus()) return x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    x[i] -= std::floor(x[i]);
    // x - floor(x) rounds up to 1.0 for tiny negative inputs.
    if (x[i] >= 1.0) x[i] = 0.0;
  }
  return x;
}

Point SystemDef::center() const {
  if (is_torus()) return Point::Constant(dim_, 0.5);
  const auto& box = std::get<BoxDomain>(domain_);
  return 0.5 * (box.lo + box.hi);
}

Point SystemDef::from_unit_cube(const Eigen::VectorXd& u) const {
  if (is_torus()) return u;
  const auto& box = std::get<BoxDomain>(domain_);
  return box.lo.array() + u.array() * (box.hi - box.lo).array();
}

namespace {

void check_dim(const SystemDef& system, const Point& x) {
  if (x.size() != system.dim()) {
    throw DimensionError("system '" + system.id() + "' has dimension " +
                         std::to_string(system.dim()) + ", point has " + std::to_string(x.size()));
  }
}

}  // namespace

Point evaluate(const SystemDef& system, const Point& x) {
  check_dim(system, x);
  return system.wrap(system.map_raw(x));
}

Matrix jacobian(const SystemDef& system, const Point& x) {
  check_dim(system, x);
  return system.jacobian_raw(x);
}

Orbit iterate(const SystemDef& system, const Point& x, int n) {
  if (n < 0) throw std::invalid_argument("iterate: n must be nonnegative");
  check_dim(system, x);
  Orbit orbit;
  orbit.points.reserve(static_cast<std::size_t>(n) + 1);
  orbit.points.push_back(x);
  for (int p = 0; p < n; ++p) orbit.points.push_back(system.wrap(system.map_raw(orbit.points.back())));
  return orbit;
}

std::vector<SmallMatrix> jacobians_along(const SystemDef& system, const Point& x, int n) {
  check_dim(system, x);
  std::vector<SmallMatrix> out;
  out.reserve(static_cast<std::size_t>(std::max(n, 0)));
  Point y = x;
  for (int p = 0; p < n; ++p) {
    out.emplace_back(system.jacobian_raw(y));
    if (p + 1 < n) y = system.wrap(system.map_raw(y));
  }
  return out;
}

Eigen::VectorXd kronecker_point(int dim, long long index) {
  // phi_d is the positive root of x^(d+1) = x + 1.
  double phi = 2.0;
  for (int it = 0; it < 64; ++it) phi = std::pow(1.0 + phi, 1.0 / (dim + 1));
  Eigen::VectorXd u(dim);
  for (int j = 0; j < dim; ++j) {
    const double alpha = 1.0 / std::pow(phi, j + 1);
    const double v = static_cast<double>(index) * alpha;
    u[j] = v - std::floor(v);
  }
  return u;
}

double lipschitz_bound(const SystemDef& system, int samples) {
  if (samples < 1) throw std::invalid_argument("lipschitz_bound: samples must be >= 1");
  if (system.lipschitz_cap()) return std::max(1.0, *system.lipschitz_cap());
  double best = 1.0;
  for (int i = 0; i < samples; ++i) {
    const Point x = system.from_unit_cube(kronecker_point(system.dim(), i));
    Eigen::JacobiSVD<Matrix> svd(system.jacobian_raw(x));
    best = std::max(best, svd.singularValues()(0));
  }
  return best;
}

double jacobian_fd_error(const SystemDef& system, const Point& x, double step) {
  check_dim(system, x);
  const Matrix analytic = system.jacobian_raw(x);
  Matrix fd(system.dim(), system.dim());
  for (int j = 0; j < system.dim(); ++j) {
    Point plus = x;
    Point minus = x;
    plus[j] += step;
    minus[j] -= step;
    fd.col(j) = (system.map_raw(plus) - system.map_raw(minus)) / (2.0 * step);
  }
  return (analytic - fd).norm() / std::max(analytic.norm(), 1.0);
}

}  // namespace dilation

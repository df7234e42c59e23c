#include "dilation/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

namespace dilation {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double param(const Params& p, const std::string& key) { return p.at(key); }

int int_param(const Params& p, const std::string& key, int lo, int hi) {
  const double v = p.at(key);
  if (v != std::round(v) || v < lo || v > hi) {
    throw std::invalid_argument("parameter '" + key + "' must be an integer in [" +
                                std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return static_cast<int>(v);
}

double spectral_norm(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

SystemDef make_linear_torus(const std::string& id, const Params& p, const Matrix& a) {
  const auto dim = static_cast<int>(a.rows());
  return SystemDef(
      id, p, dim, TorusDomain{}, [a](const Point& x) -> Point { return a * x; },
      [a](const Point&) -> Matrix { return a; }, spectral_norm(a));
}

SystemDef make_identity(const Params& p) {
  const int d = int_param(p, "d", 1, kMaxDim);
  return make_linear_torus("identity", p, Matrix::Identity(d, d));
}

SystemDef make_diag_toral(const Params& p) {
  const int a = int_param(p, "a", 1, 1000);
  const int b = int_param(p, "b", 1, 1000);
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return make_linear_torus("diag_toral", p, m);
}

SystemDef make_cat(const Params& p) {
  Matrix m(2, 2);
  m << 2, 1, 1, 1;
  return make_linear_torus("cat_map", p, m);
}

SystemDef make_doubling(const Params& p) {
  return make_linear_torus("doubling", p, Matrix::Constant(1, 1, 2.0));
}

SystemDef make_doubling_nd(const Params& p) {
  const int d = int_param(p, "d", 1, kMaxDim);
  return make_linear_torus("doubling_nd", p, 2.0 * Matrix::Identity(d, d));
}

// Chirikov standard map in (x, y) with y the momentum:
//   y' = y + K/(2 pi) sin(2 pi x),  x' = x + y'.
Matrix standard_jacobian(double k, double x) {
  const double a = k * std::cos(kTwoPi * x);
  Matrix j(2, 2);
  j << 1.0 + a, 1.0, a, 1.0;
  return j;
}

SystemDef make_standard(const Params& p) {
  const double k = param(p, "K");
  if (!std::isfinite(k)) throw std::invalid_argument("parameter 'K' must be finite");
  // |J| is convex in a = K cos(2 pi x), so its sup sits at a = +-K.
  const double cap = std::max(spectral_norm(standard_jacobian(k, 0.0)),
                              spectral_norm(standard_jacobian(k, 0.5)));
  return SystemDef(
      "standard_map", p, 2, TorusDomain{},
      [k](const Point& z) -> Point {
        const double y = z[1] + k / kTwoPi * std::sin(kTwoPi * z[0]);
        return Eigen::Vector2d(z[0] + y, y);
      },
      [k](const Point& z) -> Matrix { return standard_jacobian(k, z[0]); }, cap);
}

// (x, y) -> (2x + y + eps sin(2 pi x), x + y + eps sin(2 pi y)) mod 1.
Matrix perturbed_cat_jacobian(double eps, double cx, double cy) {
  Matrix j(2, 2);
  j << 2.0 + kTwoPi * eps * cx, 1.0, 1.0, 1.0 + kTwoPi * eps * cy;
  return j;
}

SystemDef make_perturbed_cat(const Params& p) {
  const double eps = param(p, "eps");
  if (!(std::abs(eps) <= 0.05)) throw std::invalid_argument("parameter 'eps' must satisfy |eps| <= 0.05");
  double cap = 0.0;
  for (double cx : {-1.0, 1.0}) {
    for (double cy : {-1.0, 1.0}) cap = std::max(cap, spectral_norm(perturbed_cat_jacobian(eps, cx, cy)));
  }
  return SystemDef(
      "perturbed_cat", p, 2, TorusDomain{},
      [eps](const Point& z) -> Point {
        return Eigen::Vector2d(2.0 * z[0] + z[1] + eps * std::sin(kTwoPi * z[0]),
                               z[0] + z[1] + eps * std::sin(kTwoPi * z[1]));
      },
      [eps](const Point& z) -> Matrix {
        return perturbed_cat_jacobian(eps, std::cos(kTwoPi * z[0]), std::cos(kTwoPi * z[1]));
      },
      cap);
}

SystemDef make_contraction(const Params& p) {
  const int d = int_param(p, "d", 1, kMaxDim);
  const double s = param(p, "s");
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("parameter 's' must lie in (0, 1)");
  const Eigen::VectorXd c = Eigen::VectorXd::Constant(d, 0.5);
  BoxDomain box{Eigen::VectorXd::Zero(d), Eigen::VectorXd::Ones(d)};
  return SystemDef(
      "contraction", p, d, box, [c, s](const Point& x) -> Point { return c + s * (x - c); },
      [d, s](const Point&) -> Matrix { return s * Matrix::Identity(d, d); }, s);
}

std::vector<double> sorted_desc(std::vector<double> v) {
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

using Truth = std::optional<std::vector<double>>;

Truth no_truth(const Params&) { return std::nullopt; }

const std::vector<CatalogEntry> kCatalog = {
    {"identity", "identity map on the flat torus T^d", {{"d", 2}}, make_identity,
     [](const Params& p) -> Truth { return std::vector<double>(static_cast<std::size_t>(p.at("d")), 0.0); }},
    {"diag_toral", "diagonal toral endomorphism diag(a, b) mod 1", {{"a", 2}, {"b", 3}}, make_diag_toral,
     [](const Params& p) -> Truth {
       return sorted_desc({std::log(p.at("a")), std::log(p.at("b"))});
     }},
    {"cat_map", "Arnold cat map [[2,1],[1,1]] mod 1", {}, make_cat,
     [](const Params&) -> Truth {
       const double lam = std::log((3.0 + std::sqrt(5.0)) / 2.0);
       return std::vector<double>{lam, -lam};
     }},
    {"doubling", "doubling map x -> 2x mod 1 on the circle", {}, make_doubling,
     [](const Params&) -> Truth { return std::vector<double>{std::log(2.0)}; }},
    {"doubling_nd", "coordinatewise doubling map on T^d", {{"d", 2}}, make_doubling_nd,
     [](const Params& p) -> Truth {
       return std::vector<double>(static_cast<std::size_t>(p.at("d")), std::log(2.0));
     }},
    {"standard_map", "Chirikov standard map on T^2", {{"K", 1.0}}, make_standard, no_truth},
    {"perturbed_cat", "cat map plus eps*(sin 2pi x, sin 2pi y)", {{"eps", 0.02}}, make_perturbed_cat, no_truth},
    {"contraction", "linear contraction toward the center of [0,1]^d", {{"d", 2}, {"s", 0.5}},
     make_contraction,
     [](const Params& p) -> Truth {
       return std::vector<double>(static_cast<std::size_t>(p.at("d")), std::log(p.at("s")));
     }},
};

Params merged(const CatalogEntry& entry, const Params& overrides) {
  Params p = entry.defaults;
  for (const auto& [key, value] : overrides) {
    if (!entry.defaults.contains(key)) {
      throw std::invalid_argument("system '" + entry.id + "' has no parameter '" + key + "'");
    }
    p[key] = value;
  }
  return p;
}

}  // namespace

const std::vector<CatalogEntry>& catalog() { return kCatalog; }

const CatalogEntry& catalog_entry(const std::string& id) {
  for (const auto& entry : kCatalog) {
    if (entry.id == id) return entry;
  }
  throw std::invalid_argument("unknown system id '" + id + "'");
}

SystemDef make_system(const std::string& id, const Params& overrides) {
  const auto& entry = catalog_entry(id);
  return entry.make(merged(entry, overrides));
}

std::optional<std::vector<double>> known_spectrum(const std::string& id, const Params& overrides) {
  const auto& entry = catalog_entry(id);
  return entry.ground_truth(merged(entry, overrides));
}

}  // namespace dilation

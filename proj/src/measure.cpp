#include "dilation/measure.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "dilation/exterior.hpp"

namespace dilation {

namespace {

struct NodeWitness {
  NodeGrowth growth;
  LogNorm cocycle;
};

}  // namespace

WitnessResult witness_point(const SystemDef& system, const Disk& disk, int n, int k, const QuadratureGrid& grid,
                            Exec exec) {
  if (n < 1) throw std::invalid_argument("witness_point: n must be >= 1");
  if (disk.k != k || grid.k() != k) throw std::invalid_argument("witness_point: disk/grid dimension must equal k");
  validate_disk(system, disk);

  const std::vector<int> schedule{n};
  const auto nodes = map_indices<NodeWitness>(exec, grid.size(), [&](std::size_t i) {
    const auto u = grid.node(i);
    NodeWitness w;
    w.growth = node_growth(system, disk, u, schedule);
    const SmallMatrix seed = disk_tangent(disk, u);
    w.cocycle = cocycle_log_norm(system, disk_point(system, disk, u), n, k, &seed);
    return w;
  });

  std::vector<double> vol_terms(nodes.size());
  std::vector<double> iter_terms(nodes.size());
  std::size_t best = nodes.size();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    vol_terms[i] = grid.log_weight() + nodes[i].growth.log_volume;
    iter_terms[i] = vol_terms[i] + nodes[i].growth.push.front();
    if (nodes[i].cocycle.is_floor) continue;
    if (best == nodes.size() || nodes[i].cocycle.value > nodes[best].cocycle.value) best = i;
  }
  if (best == nodes.size()) throw DegenerateDiskError("witness_point: cocycle floored at every node");

  WitnessResult out;
  out.disk_id = disk.id;
  out.node_index = best;
  out.u_star = grid.node(best);
  out.x_witness = disk_point(system, disk, out.u_star);
  out.n = n;
  out.k = k;
  out.log_cocycle = nodes[best].cocycle.value;
  out.log_ratio = log_sum_exp(iter_terms) - log_sum_exp(vol_terms);
  out.epsilon = (out.log_ratio - out.log_cocycle) / n;
  return out;
}

EmpiricalMeasure build_empirical_measure(const SystemDef& system, const Point& x, int n_l, int m) {
  if (m < 1 || m >= n_l) throw std::invalid_argument("empirical measure: need 1 <= m < n_l");
  Orbit orbit = iterate(system, x, n_l - m);
  return {std::move(orbit.points), n_l, m};
}

SpreadResult spread_in_time(const SystemDef& system, const WitnessResult& witness, int m, int k, double floor_r,
                            Exec exec) {
  const int n_l = witness.n;
  if (m < 1 || m >= n_l) {
    throw std::invalid_argument("spread_in_time: need 1 <= m < n_l (m=" + std::to_string(m) +
                                ", n_l=" + std::to_string(n_l) + ")");
  }
  if (k < 1 || k > system.dim()) throw std::invalid_argument("spread_in_time: k must lie in [1, d]");

  const auto jacs = jacobians_along(system, witness.x_witness, n_l);
  const std::span<const SmallMatrix> all(jacs);
  const auto cocycle = [&](int from, int steps) { return cocycle_log_norm(all.subspan(from, steps), k).value; };

  SpreadResult result;
  result.measure = build_empirical_measure(system, witness.x_witness, n_l, m);

  // block[p] = log |Lambda^k T_{f^p x} f^m| for every atom p = 0..n_l - m.
  const auto blocks = map_indices<double>(exec, result.measure.atoms.size(),
                                          [&](std::size_t p) { return cocycle(static_cast<int>(p), m); });

  SpreadReport& rep = result.report;
  rep.n_l = n_l;
  rep.m = m;
  rep.k = k;
  rep.log_full = witness.log_cocycle;
  rep.lhs = witness.log_cocycle / n_l;
  rep.bound_L = lipschitz_bound(system, kLipschitzSamples);
  rep.ab_bound = static_cast<double>(k) * m * m / (static_cast<double>(m) * n_l) * std::log(rep.bound_L);

  double tail_sum = 0.0;
  double head_sum = 0.0;
  for (int i = 0; i < m; ++i) {
    const int q = (n_l - i) / m;
    const int r = n_l - i - m * q;
    rep.q.push_back(q);
    rep.r.push_back(r);
    const double tail = cocycle(i + m * q, r);
    const double head = cocycle(0, i);
    double split = tail + head;
    for (int j = 0; j < q; ++j) split += blocks[static_cast<std::size_t>(i + j * m)];
    rep.telescoped.push_back(split);
    tail_sum += tail;
    head_sum += head;
  }
  rep.a_l = tail_sum / (static_cast<double>(m) * n_l);
  rep.b_l = head_sum / (static_cast<double>(m) * n_l);

  double integral = 0.0;
  for (double v : blocks) integral += std::max(v, -floor_r * m);
  rep.middle = integral * result.measure.atom_weight() / m;
  rep.eps_prime = rep.lhs - rep.middle;
  rep.chain_slack = rep.lhs - (rep.a_l + rep.middle + rep.b_l);
  return result;
}

double integrate_log_norm(const EmpiricalMeasure& measure, const SystemDef& system, int m, int k, double r,
                          Exec exec) {
  if (!(r >= 0.0)) throw std::invalid_argument("integrate_log_norm: r must be >= 0");
  if (m < 1) throw std::invalid_argument("integrate_log_norm: m must be >= 1");
  const auto values = map_indices<double>(exec, measure.atoms.size(), [&](std::size_t p) {
    return std::max(cocycle_log_norm(system, measure.atoms[p], m, k).value, -r);
  });
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum * measure.atom_weight() / m;
}

double TestFunction::operator()(const SystemDef& system, const Point& x) const {
  Eigen::VectorXd xi = x;
  if (const auto* box = std::get_if<BoxDomain>(&system.domain())) {
    xi = ((x - box->lo).array() / (box->hi - box->lo).array()).matrix();
  }
  return std::cos(2.0 * std::numbers::pi * wave.cast<double>().dot(xi) + phase);
}

std::vector<TestFunction> make_test_functions(int dim, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> wave(-3, 3);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::vector<TestFunction> out;
  while (static_cast<int>(out.size()) < count) {
    TestFunction g;
    g.wave.resize(dim);
    for (int i = 0; i < dim; ++i) g.wave[i] = wave(rng);
    g.phase = phase(rng);
    if (g.wave.isZero()) continue;
    out.push_back(std::move(g));
  }
  return out;
}

double test_function_residual(const EmpiricalMeasure& measure, const SystemDef& system, const TestFunction& g) {
  double sum = 0.0;
  for (const auto& atom : measure.atoms) sum += g(system, evaluate(system, atom)) - g(system, atom);
  return std::abs(sum * measure.atom_weight());
}

double invariance_residual(const EmpiricalMeasure& measure, const SystemDef& system, int test_functions,
                           std::uint64_t seed) {
  if (test_functions < 1) throw std::invalid_argument("invariance_residual: need at least one test function");
  double worst = 0.0;
  for (const auto& g : make_test_functions(system.dim(), test_functions, seed)) {
    worst = std::max(worst, test_function_residual(measure, system, g));
  }
  return worst;
}

namespace {

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string params_text(const SystemDef& system) {
  std::string out;
  for (const auto& [key, value] : system.params()) out += key + "=" + format_double(value) + ";";
  return out.empty() ? "-" : out;
}

}  // namespace

std::string measure_cache_key(const SystemDef& system, const Point& start, int n_l, int m) {
  std::string text = system.id() + "|" + params_text(system) + "|";
  for (Eigen::Index i = 0; i < start.size(); ++i) {
    text += std::to_string(std::bit_cast<std::uint64_t>(start[i])) + ",";
  }
  text += "|" + std::to_string(n_l) + "|" + std::to_string(m);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(text)));
  return std::string("measure_") + buf + ".txt";
}

void save_measure(const std::filesystem::path& path, const SystemDef& system, const EmpiricalMeasure& measure) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write measure cache " + tmp.string());
    out << "# empirical measure atoms\n";
    out << "system " << system.id() << "\n";
    out << "params " << params_text(system) << "\n";
    out << "n_l " << measure.n_l << "\nm " << measure.m << "\n";
    out << "dim " << system.dim() << "\natoms " << measure.atoms.size() << "\n";
    for (const auto& atom : measure.atoms) {
      for (Eigen::Index i = 0; i < atom.size(); ++i) out << (i ? " " : "") << format_double(atom[i]);
      out << "\n";
    }
  }
  std::filesystem::rename(tmp, path);
}

std::optional<EmpiricalMeasure> load_measure(const std::filesystem::path& path, const SystemDef& system) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string line;
  std::getline(in, line);
  std::string key;
  std::string id;
  std::string params;
  EmpiricalMeasure measure;
  int dim = 0;
  std::size_t count = 0;
  if (!(in >> key >> id) || key != "system" || id != system.id()) return std::nullopt;
  if (!(in >> key >> params) || key != "params" || params != params_text(system)) return std::nullopt;
  if (!(in >> key >> measure.n_l) || key != "n_l") return std::nullopt;
  if (!(in >> key >> measure.m) || key != "m") return std::nullopt;
  if (!(in >> key >> dim) || key != "dim" || dim != system.dim()) return std::nullopt;
  if (!(in >> key >> count) || key != "atoms") return std::nullopt;
  measure.atoms.reserve(count);
  for (std::size_t a = 0; a < count; ++a) {
    Point x(dim);
    for (int i = 0; i < dim; ++i) {
      std::string token;
      if (!(in >> token)) return std::nullopt;
      x[i] = std::strtod(token.c_str(), nullptr);
    }
    measure.atoms.push_back(std::move(x));
  }
  return measure;
}

EmpiricalMeasure cached_empirical_measure(const std::filesystem::path& cache_dir, const SystemDef& system,
                                          const Point& x, int n_l, int m) {
  const auto path = cache_dir / measure_cache_key(system, x, n_l, m);
  if (auto hit = load_measure(path, system); hit && hit->n_l == n_l && hit->m == m && !hit->atoms.empty() &&
                                               hit->atoms.front() == x) {
    return *std::move(hit);
  }
  auto measure = build_empirical_measure(system, x, n_l, m);
  std::filesystem::create_directories(cache_dir);
  save_measure(path, system, measure);
  return measure;
}

}  // namespace dilation

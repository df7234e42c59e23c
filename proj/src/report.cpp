#include "dilation/report.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>

#include "dilation/catalog.hpp"

namespace dilation {

using nlohmann::json;

namespace {

json vec(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json mat(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* method_name(DilationMethod m) { return m == DilationMethod::SlopeFit ? "slope_fit" : "last_point"; }

}  // namespace

json to_json(const Disk& disk) {
  json terms = json::array();
  for (const auto& t : disk.perturb) terms.push_back({{"freq", t.freq}, {"phase", t.phase}, {"coeff", vec(t.coeff)}});
  return {{"id", disk.id},       {"k", disk.k},         {"base", vec(disk.base)},
          {"frame", mat(disk.frame)}, {"scale", disk.scale}, {"perturbation", terms}};
}

json to_json(const DilationEstimate& est) {
  json records = json::array();
  for (const auto& r : est.records) {
    records.push_back({{"n", r.n}, {"best_log_ratio", r.best_log_ratio}, {"best_disk_id", r.best_disk_id}});
  }
  return {{"k", est.k},
          {"records", records},
          {"method", method_name(est.method)},
          {"d_k_hat", est.d_k_hat},
          {"slope_fit", est.slope_fit},
          {"last_point", est.last_point}};
}

json to_json(const WitnessResult& w) {
  return {{"disk_id", w.disk_id},         {"node_index", w.node_index}, {"u_star", vec(w.u_star)},
          {"x_witness", vec(w.x_witness)}, {"n", w.n},                   {"k", w.k},
          {"log_cocycle", w.log_cocycle}, {"log_ratio", w.log_ratio},   {"epsilon", w.epsilon}};
}

json to_json(const SpreadReport& s) {
  return {{"n_l", s.n_l},
          {"m", s.m},
          {"k", s.k},
          {"q", s.q},
          {"r", s.r},
          {"a_l", s.a_l},
          {"b_l", s.b_l},
          {"middle", s.middle},
          {"lhs", s.lhs},
          {"bound_L", s.bound_L},
          {"ab_bound", s.ab_bound},
          {"eps_prime", s.eps_prime},
          {"chain_slack", s.chain_slack},
          {"log_full", s.log_full},
          {"telescoped", s.telescoped}};
}

json to_json(const Spectrum& s) {
  return {{"chis", s.chis}, {"n_used", s.n_used}, {"transient_discarded", s.transient_discarded}, {"floored", s.floored}};
}

json to_json(const TheoremReport& rep) {
  json family = json::array();
  for (const auto& disk : rep.family) family.push_back(to_json(disk));
  json levels = json::array();
  json eps_trail = json::array();
  for (const auto& level : rep.levels) {
    json spreads = json::array();
    for (const auto& s : level.spreads) {
      spreads.push_back(to_json(s));
      eps_trail.push_back({{"n_l", s.n_l}, {"m", s.m}, {"eps_prime", s.eps_prime}});
    }
    levels.push_back({{"n_l", level.n_l},
                      {"witness", to_json(level.witness)},
                      {"spreads", spreads},
                      {"invariance_residual", level.invariance_residual}});
  }
  json limit = json::array();
  for (const auto& [m, value] : rep.limit_diagnostic) limit.push_back({{"m", m}, {"value", value}});
  json params = json::object();
  for (const auto& [key, value] : rep.params) params[key] = value;
  return {{"system", rep.system_id},
          {"params", params},
          {"k", rep.k},
          {"disk_family", family},
          {"dilation", to_json(rep.dilation)},
          {"dilation_witness", to_json(rep.dilation_witness)},
          {"levels", levels},
          {"eps_prime_trail", eps_trail},
          {"limit_diagnostic", limit},
          {"spectrum", to_json(rep.spectrum)},
          {"chi_partial_sum", rep.chi_partial_sum},
          {"d_k_hat", rep.dilation.d_k_hat},
          {"tolerance", rep.tolerance},
          {"verdict", rep.verdict}};
}

RunReport run(const RunConfig& config) {
  // Usage checks first, before any computation.
  std::optional<SystemDef> system;
  try {
    system.emplace(make_system(config.system_id, config.params));
    validate(config.theorem);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  std::vector<int> ks = config.ks;
  if (ks.empty()) {
    for (int k = 1; k <= system->dim(); ++k) ks.push_back(k);
  }
  for (int k : ks) {
    if (k < 1 || k > system->dim()) {
      throw ConfigError("run.k: " + std::to_string(k) + " outside [1, " + std::to_string(system->dim()) + "]");
    }
  }

  RunReport out;
  out.all_verdicts = true;
  json theorems = json::array();
  json stage_timing = json::array();
  const auto start = std::chrono::steady_clock::now();
  for (int k : ks) {
    out.theorems.push_back(verify_theorem(*system, k, config.theorem));
    const auto& rep = out.theorems.back();
    out.all_verdicts = out.all_verdicts && rep.verdict;
    theorems.push_back(to_json(rep));
    json stages = json::object();
    for (const auto& [name, seconds] : rep.stage_seconds) stages[name] = seconds;
    stage_timing.push_back({{"k", k}, {"stage_seconds", stages}});
  }
  const std::chrono::duration<double> total = std::chrono::steady_clock::now() - start;

  json truth = json(nullptr);
  if (const auto known = known_spectrum(config.system_id, config.params)) truth = *known;

  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(config)));
  out.body = {{"tool", {{"name", kToolName}, {"version", kToolVersion}}},
              {"config_hash", hash},
              {"config", canonical_text(config)},
              {"ground_truth_spectrum", truth},
              {"theorems", theorems},
              {"all_verdicts", out.all_verdicts},
              {"notes",
               {"The measure is the witness-orbit empirical measure at the largest n_l; no ergodic decomposition is "
                "performed, so the verdict is the mixture-level inequality d_k <= int sum_{i<=k} chi_i dnu.",
                "The weak-* limit is replaced by the finite-n_l invariance residuals reported per level."}}};
  out.timing = {{"total_seconds", total.count()}, {"per_k", stage_timing}};
  return out;
}

std::string body_text(const RunReport& report) { return report.body.dump(2); }

std::string dilation_csv(const DilationEstimate& est) {
  std::string out = "n,best_log_ratio,best_disk_id\n";
  for (const auto& r : est.records) out += std::to_string(r.n) + "," + g17(r.best_log_ratio) + "," + r.best_disk_id + "\n";
  return out;
}

std::string limit_csv(const std::vector<std::pair<int, double>>& series) {
  std::string out = "m,value\n";
  for (const auto& [m, v] : series) out += std::to_string(m) + "," + g17(v) + "\n";
  return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_report(const RunReport& report, const RunConfig& config) {
  const json doc = {{"body", report.body}, {"timing", report.timing}};
  write_atomic(config.output, doc.dump(2) + "\n");
  if (!config.write_csv) return;
  const auto stem = config.output.parent_path() / config.output.stem();
  for (const auto& rep : report.theorems) {
    const std::string k = std::to_string(rep.k);
    write_atomic(stem.string() + ".dilation_k" + k + ".csv", dilation_csv(rep.dilation));
    write_atomic(stem.string() + ".limit_k" + k + ".csv", limit_csv(rep.limit_diagnostic));
  }
}

}  // namespace dilation

// Command-line front end: run, list-systems, dilation, spectrum.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

#include "dilation/catalog.hpp"
#include "dilation/config.hpp"
#include "dilation/report.hpp"

namespace {

using namespace dilation;

Params parse_params(const std::vector<std::string>& items) {
  Params out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("--param: expected key=value, got '" + item + "'");
    char* end = nullptr;
    const std::string raw = item.substr(eq + 1);
    const double v = std::strtod(raw.c_str(), &end);
    if (raw.empty() || *end != '\0') throw ConfigError("--param " + item.substr(0, eq) + ": not a number");
    out[item.substr(0, eq)] = v;
  }
  return out;
}

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int list_systems() {
  std::cout << "id\td\tparameters\tground_truth_exponents\tdescription\n";
  for (const auto& entry : catalog()) {
    const SystemDef system = entry.make(entry.defaults);
    std::string params;
    for (const auto& [key, value] : entry.defaults) params += (params.empty() ? "" : ",") + key + "=" + g17(value);
    std::string truth;
    if (const auto chis = entry.ground_truth(entry.defaults)) {
      for (double c : *chis) truth += (truth.empty() ? "" : ",") + g17(c);
    }
    std::cout << entry.id << '\t' << system.dim() << '\t' << (params.empty() ? "-" : params) << '\t' << truth << '\t'
              << entry.description << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  configure_threads_from_env();
  CLI::App app{"k-dilation, empirical-measure construction and Lyapunov verification toolkit"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "Run the full pipeline from a config file");
  std::string config_path;
  std::vector<std::string> overrides;
  run_cmd->add_option("--config", config_path, "Config file")->required();
  run_cmd->add_option("--set", overrides, "Override, section.key=value (repeatable)");

  app.add_subcommand("list-systems", "List catalog systems");

  auto* dil_cmd = app.add_subcommand("dilation", "Estimate the k-dilation only");
  std::string system_id;
  std::vector<std::string> param_items;
  int k = 1;
  int budget = 8;
  std::uint64_t seed = 1;
  std::vector<int> schedule{5, 10, 15, 20, 25, 30};
  int nodes = 0;
  std::string csv_path;
  dil_cmd->add_option("--system", system_id, "Catalog id")->required();
  dil_cmd->add_option("--param", param_items, "System parameter key=value (repeatable)");
  dil_cmd->add_option("--k", k, "Disk dimension")->required();
  dil_cmd->add_option("--budget", budget, "Random disks in the family");
  dil_cmd->add_option("--seed", seed, "Family seed");
  dil_cmd->add_option("--schedule", schedule, "Iteration counts n")->delimiter(',');
  dil_cmd->add_option("--nodes", nodes, "Quadrature nodes per axis (0 = default)");
  dil_cmd->add_option("--csv", csv_path, "Write the dilation series CSV here");

  auto* spec_cmd = app.add_subcommand("spectrum", "Lyapunov spectrum along one orbit");
  std::vector<double> x0;
  int n = 10000;
  int transient = 1000;
  spec_cmd->add_option("--system", system_id, "Catalog id")->required();
  spec_cmd->add_option("--param", param_items, "System parameter key=value (repeatable)");
  spec_cmd->add_option("--x0", x0, "Start point (default: Kronecker point 1 of the domain)")->delimiter(',');
  spec_cmd->add_option("--n", n, "Total steps");
  spec_cmd->add_option("--transient", transient, "Discarded initial steps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (app.got_subcommand("list-systems")) return list_systems();

    if (app.got_subcommand(run_cmd)) {
      ConfigTable table = load_config_file(config_path);
      for (const auto& o : overrides) apply_override(table, o);
      const RunConfig config = to_run_config(table);
      const RunReport report = run(config);
      write_report(report, config);
      for (const auto& rep : report.theorems) {
        std::cout << rep.system_id << " k=" << rep.k << " d_k_hat=" << g17(rep.dilation.d_k_hat)
                  << " chi_sum=" << g17(rep.chi_partial_sum) << " tolerance=" << g17(rep.tolerance)
                  << " verdict=" << (rep.verdict ? "true" : "false") << '\n';
      }
      std::cout << "report: " << config.output.string() << '\n';
      return report.all_verdicts ? kExitOk : kExitVerdictFailed;
    }

    const Params params = parse_params(param_items);
    const SystemDef system = [&] {
      try {
        return make_system(system_id, params);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }();

    if (app.got_subcommand(dil_cmd)) {
      if (k < 1 || k > system.dim()) throw ConfigError("--k: must lie in [1, " + std::to_string(system.dim()) + "]");
      if (budget < 0) throw ConfigError("--budget: must be >= 0");
      const QuadratureGrid grid = nodes > 0 ? QuadratureGrid(k, nodes) : default_grid(k);
      const auto family = default_disk_family(system, k, budget, seed);
      const auto est = estimate_dilation(system, k, family, schedule, grid);
      const std::string csv = dilation_csv(est);
      if (!csv_path.empty()) write_atomic(csv_path, csv);
      std::cout << csv << "slope_fit," << g17(est.slope_fit) << "\nlast_point," << g17(est.last_point) << '\n';
      return kExitOk;
    }

    if (app.got_subcommand(spec_cmd)) {
      Point start = system.from_unit_cube(kronecker_point(system.dim(), 1));
      if (!x0.empty()) start = Eigen::Map<const Eigen::VectorXd>(x0.data(), static_cast<Eigen::Index>(x0.size()));
      if (start.size() != system.dim() || !system.contains(start)) throw ConfigError("--x0: not a point of the domain");
      if (transient < 0 || n <= transient) throw ConfigError("--n/--transient: need n > transient >= 0");
      const Spectrum s = lyapunov_spectrum(system, start, n, transient);
      for (std::size_t i = 0; i < s.chis.size(); ++i) std::cout << "chi_" << i + 1 << "," << g17(s.chis[i]) << '\n';
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const StageError& e) {
    std::cerr << "stage failure [" << e.stage() << "]: " << e.what() << '\n';
    return kExitStageFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitStageFailure;
  }
  return kExitUsage;
}

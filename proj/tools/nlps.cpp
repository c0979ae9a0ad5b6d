#include "nlps/harness/sweep.hpp"

#include <CLI11.hpp>

#include <iomanip>
#include <iostream>

namespace {

using namespace nlps;
using namespace nlps::harness;

constexpr int kOk = 0;
constexpr int kConfigFailure = 1;
constexpr int kRuntimeFailure = 2;

ScenarioConfig load_with_overrides(const std::string& path, const std::vector<std::string>& sets) {
  auto tree = ConfigTree::load(path);
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
    tree.set(s.substr(0, eq), s.substr(eq + 1), "--set", 0);
  }
  return scenario_from_tree(tree);
}

int execute(const ScenarioConfig& cfg, const std::string& out_override) {
  const auto rows = run_scenario(cfg);
  const std::filesystem::path out = out_override.empty() ? cfg.output : out_override;
  write_csv(rows, out);
  std::size_t failed = 0;
  for (const auto& r : rows) {
    if (r.status != "ok") {
      ++failed;
      std::cerr << cfg.id << " " << r.variant << " " << r.sweep_value << ": " << r.status << "\n";
    }
  }
  std::cout << "wrote " << rows.size() << " rows to " << out.string() << (failed ? " (" + std::to_string(failed) + " failed)" : "") << "\n";
  return failed ? kRuntimeFailure : kOk;
}

int report(const std::string& path) {
  const auto t = read_csv(path);
  const std::vector<std::string> shown{"variant", "sweep_value", "seed", "power_dbm", "snr_db", "air", "se", "air_stderr", "gain_se", "gain_se_stderr", "status"};
  std::vector<std::size_t> idx;
  for (const auto& c : shown) idx.push_back(t.column(c));
  for (const auto& c : shown) std::cout << std::setw(14) << c;
  std::cout << "\n";
  for (const auto& row : t.rows) {
    for (auto i : idx) std::cout << std::setw(14) << row[i].substr(0, 13);
    std::cout << "\n";
  }
  // Best SE per variant over the sweep.
  const auto v = t.column("variant"), se = t.column("se"), sv = t.column("sweep_value");
  std::map<std::string, std::pair<double, std::string>> best;
  for (const auto& row : t.rows) {
    if (row[se].empty()) continue;
    const double s = std::stod(row[se]);
    auto [it, fresh] = best.emplace(row[v], std::make_pair(s, row[sv]));
    if (!fresh && s > it->second.first) it->second = {s, row[sv]};
  }
  for (const auto& [name, b] : best) std::cout << "peak SE " << name << ": " << b.first << " at " << (b.second.empty() ? "base" : b.second) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequence-selection shaping lab: run scenarios, sweeps and reports"};
  app.require_subcommand(1);
  std::string config, out, axis, csv_path;
  std::vector<std::string> sets;

  auto* run = app.add_subcommand("run", "run every variant of a scenario at its base point");
  run->add_option("config", config, "scenario config")->required();
  run->add_option("--out", out, "CSV path (default: the config's output)");
  run->add_option("--set", sets, "override a config key (key=value)");

  auto* sweep = app.add_subcommand("sweep", "run a scenario over a sweep axis");
  sweep->add_option("config", config, "scenario config")->required();
  sweep->add_option("--axis", axis, "sweep axis (default: the config's sweep.axis)");
  sweep->add_option("--out", out, "CSV path (default: the config's output)");
  sweep->add_option("--set", sets, "override a config key (key=value)");

  auto* validate = app.add_subcommand("validate", "check a config and build every job without simulating");
  validate->add_option("config", config, "scenario config")->required();
  validate->add_option("--set", sets, "override a config key (key=value)");

  auto* rep = app.add_subcommand("report", "summarize a result CSV");
  rep->add_option("csv", csv_path, "result CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigFailure;
  }

  try {
    if (*rep) return report(csv_path);
    auto cfg = load_with_overrides(config, sets);
    if (*run) {
      cfg.sweep.axis = "none";
      return execute(cfg, out);
    }
    if (*sweep) {
      if (!axis.empty()) {
        if (std::find(sweep_axes().begin(), sweep_axes().end(), axis) == sweep_axes().end()) throw ConfigError("unknown sweep axis '" + axis + "'");
        if (axis != cfg.sweep.axis && !cfg.sweep.values.empty() && cfg.sweep.axis != "none")
          throw ConfigError("--axis " + axis + " differs from the config's sweep.axis = " + cfg.sweep.axis + " whose values would be reused");
        cfg.sweep.axis = axis;
      }
      if (cfg.sweep.axis == "none") throw ConfigError("no sweep axis: set sweep.axis in the config or pass --axis");
      return execute(cfg, out);
    }
    const auto jobs = plan_jobs(cfg);
    std::cout << cfg.id << ": ok, " << jobs.size() << " jobs" << (cfg.expensive ? " (expensive: full-scale settings)" : "") << "\n";
    return kOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigFailure;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << "\n";
    return kRuntimeFailure;
  }
}

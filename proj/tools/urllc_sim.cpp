// urllc_sim: link-level experiments for adaptive MCS / K-repetition selection
// in grant-free uplink.

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "urllc/experiment.hpp"
#include "urllc/scenario_io.hpp"

using namespace urllc;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;

struct CommonOptions {
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  int parallel = 1;
};

struct SweepOptions {
  std::vector<double> snr_list{-4, -2, 0, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
  double target_plr = 1e-3;
  int replicates = 5;
  double edge_snr_db = -4.0;
  std::vector<double> windows_ms{500, 1000, 5000};
  std::vector<double> plr_lows{1e-4, 1e-5, 1e-6};
  std::vector<double> plr_highs{1e-3};
};

ScenarioConfig load_base(const CommonOptions& o) {
  ScenarioConfig sc = o.config_path.empty() ? ScenarioConfig{} : load_scenario(o.config_path);
  if (o.seed) sc.seed = *o.seed;
  return sc;
}

void emit(const CommonOptions& o, std::vector<ResultRow> rows) {
  if (o.out_path.empty()) {
    write_results_csv(std::cout, std::move(rows));
    return;
  }
  std::ofstream out(o.out_path);
  if (!out) throw std::runtime_error("cannot write " + o.out_path);
  write_results_csv(out, std::move(rows));
}

std::string mode_of(const ScenarioConfig& sc) {
  return sc.fixed_config ? "fixed:" + to_string(*sc.fixed_config) : "adaptive";
}

SweepSpec make_spec(const ScenarioConfig& sc, const CommonOptions& o, const SweepOptions& s) {
  SweepSpec spec;
  spec.snr_grid_db = s.snr_list;
  spec.weights = snr_distribution_weights(s.snr_list, s.edge_snr_db,
                                          hata_distance_slope_db(sc.pathloss));
  spec.replicates = s.replicates;
  spec.master_seed = sc.seed;
  spec.threads = o.parallel;
  return spec;
}

int cmd_run(const CommonOptions& o, const std::string& event_log_path) {
  const ScenarioConfig sc = load_base(o);
  const BlerModel model = make_bler_model(sc);
  std::ofstream log;
  if (!event_log_path.empty()) {
    log.open(event_log_path);
    if (!log) throw ConfigError("cannot write event log " + event_log_path);
  }
  const SimMetrics m = run(sc, model, event_log_path.empty() ? nullptr : &log);
  emit(o, {{"wideband_snr", resolved_wideband_snr_db(sc), sc.seed, m.plr, m.mean_rbgs_per_packet,
            m.reconf_per_s(), mode_of(sc)}});
  return 0;
}

int cmd_optimal_search(const CommonOptions& o, const SweepOptions& s, double snr) {
  const ScenarioConfig sc = load_base(o);
  const BlerModel model = make_bler_model(sc);
  validate(sc, model);
  std::vector<std::uint64_t> seeds;
  for (int r = 0; r < s.replicates; ++r) seeds.push_back(point_seed(sc.seed, snr, r));
  const auto res = optimal_search(sc, model, snr, s.target_plr, seeds, o.parallel);

  std::vector<ResultRow> rows;
  for (std::size_t i = 0; i < seeds.size(); ++i)
    for (const auto& c : res.per_seed[i]) {
      rows.push_back({"wideband_snr", snr, seeds[i], c.plr, static_cast<double>(c.cost), 0.0,
                      "fixed:" + to_string(c.config)});
      if (res.best && c.config == res.best->config)
        rows.push_back({"wideband_snr", snr, seeds[i], c.plr, static_cast<double>(c.cost), 0.0,
                        "optimal"});
    }
  emit(o, std::move(rows));
  if (res.best)
    std::cerr << "optimal: " << to_string(res.best->config) << " cost=" << res.best->cost
              << " plr=" << res.best->plr << " packets=" << res.best->packets << '\n';
  else
    std::cerr << "optimal: none-feasible\n";
  return 0;
}

int cmd_compare(const CommonOptions& o, const SweepOptions& s) {
  ScenarioConfig sc = load_base(o);
  sc.fixed_config.reset();
  const BlerModel model = make_bler_model(sc);
  validate(sc, model);
  const auto points = compare(sc, model, s.snr_list, s.target_plr, s.replicates, sc.seed, o.parallel);
  emit(o, compare_rows(points));

  const auto weights = snr_distribution_weights(s.snr_list, s.edge_snr_db,
                                                hata_distance_slope_db(sc.pathloss));
  std::cerr << std::setw(8) << "snr_db" << std::setw(10) << "mcs0" << std::setw(10) << "adaptive"
            << std::setw(10) << "optimal" << std::setw(12) << "adapt_plr" << '\n';
  for (const auto& p : points) {
    std::cerr << std::setw(8) << p.wideband_snr_db << std::setw(10)
              << (p.mcs0 ? std::to_string(p.mcs0->cost) : "-") << std::setw(10)
              << std::setprecision(4) << p.adaptive_mean_rbgs() << std::setw(10)
              << (p.optimal ? std::to_string(p.optimal->cost) : "-") << std::setw(12)
              << p.adaptive_plr() << '\n';
  }
  const auto avg = distribution_average(points, weights);
  std::cerr << "distribution average: mcs0=" << avg.mcs0_mean_rbgs
            << " adaptive=" << avg.adaptive_mean_rbgs << " optimal=" << avg.optimal_mean_rbgs
            << '\n';
  return 0;
}

int cmd_sweep_window(const CommonOptions& o, const SweepOptions& s) {
  ScenarioConfig sc = load_base(o);
  sc.fixed_config.reset();
  const BlerModel model = make_bler_model(sc);
  validate(sc, model);
  emit(o, sweep_window(sc, model, s.windows_ms, make_spec(sc, o, s)));
  return 0;
}

int cmd_sweep_thresholds(const CommonOptions& o, const SweepOptions& s) {
  ScenarioConfig sc = load_base(o);
  sc.fixed_config.reset();
  const BlerModel model = make_bler_model(sc);
  validate(sc, model);
  emit(o, sweep_thresholds(sc, model, s.windows_ms, s.plr_lows, s.plr_highs, s.target_plr,
                           make_spec(sc, o, s)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive MCS and K-repetition selection for grant-free uplink URLLC"};
  app.require_subcommand(1);

  CommonOptions common;
  SweepOptions sweep;
  std::string event_log;
  double snr = 0.0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", common.config_path, "Scenario config file (key = value)");
    cmd->add_option("--out", common.out_path, "Output CSV (default: stdout)");
    cmd->add_option("--seed", common.seed, "Master seed (overrides the config seed)");
    cmd->add_option("--parallel", common.parallel, "Worker threads")->check(CLI::PositiveNumber);
  };
  auto add_sweep = [&](CLI::App* cmd) {
    cmd->add_option("--snr-list", sweep.snr_list, "Wideband SNR grid in dB")->delimiter(',');
    cmd->add_option("--target-plr", sweep.target_plr, "Reliability target");
    cmd->add_option("--replicates", sweep.replicates, "Seeds per sweep point")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--edge-snr", sweep.edge_snr_db, "SNR_wb at the cell edge (dB)");
  };

  auto* run_cmd = app.add_subcommand("run", "Run one scenario, write one CSV row");
  add_common(run_cmd);
  run_cmd->get_option("--config")->required();
  run_cmd->add_option("--event-log", event_log, "Write time,event_type,detail lines here");

  auto* opt_cmd = app.add_subcommand("optimal-search", "Exhaustive fixed-configuration search");
  add_common(opt_cmd);
  add_sweep(opt_cmd);
  opt_cmd->add_option("--snr", snr, "Wideband SNR in dB")->required();

  auto* cmp_cmd = app.add_subcommand("compare", "Fixed MCS 0 vs adaptive vs optimal");
  add_common(cmp_cmd);
  add_sweep(cmp_cmd);

  auto* win_cmd = app.add_subcommand("sweep-window", "Adaptive metrics vs window size");
  add_common(win_cmd);
  add_sweep(win_cmd);
  win_cmd->add_option("--windows-ms", sweep.windows_ms, "Window sizes in ms")->delimiter(',');

  auto* thr_cmd = app.add_subcommand("sweep-thresholds", "Threshold pairs vs window size");
  add_common(thr_cmd);
  add_sweep(thr_cmd);
  thr_cmd->add_option("--windows-ms", sweep.windows_ms, "Window sizes in ms")->delimiter(',');
  thr_cmd->add_option("--plr-low-list", sweep.plr_lows, "Candidate PLR_low values")->delimiter(',');
  thr_cmd->add_option("--plr-high-list", sweep.plr_highs, "Candidate PLR_high values")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*run_cmd) return cmd_run(common, event_log);
    if (*opt_cmd) return cmd_optimal_search(common, sweep, snr);
    if (*cmp_cmd) return cmd_compare(common, sweep);
    if (*win_cmd) return cmd_sweep_window(common, sweep);
    if (*thr_cmd) return cmd_sweep_thresholds(common, sweep);
  } catch (const ConfigurationInfeasible& e) {
    std::cerr << "infeasible scenario: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "urllc/sim_engine.hpp"

namespace urllc {

// ---------------------------------------------------------------------------
// Result rows
// ---------------------------------------------------------------------------

inline constexpr const char* kResultsHeader = "axis,value,seed,plr,mean_rbgs,reconf_per_s,mode";

struct ResultRow {
  std::string axis;  // wideband_snr | window | thresholds
  double value = 0.0;
  std::uint64_t seed = 0;
  double plr = 0.0;
  double mean_rbgs = 0.0;
  double reconf_per_s = 0.0;
  std::string mode;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

/// Sorts by (axis, value, mode, seed) and writes the header plus one line
/// per row. Row order never depends on execution order.
void write_results_csv(std::ostream& out, std::vector<ResultRow> rows);

/// Seed for replicate `replicate` of the sweep point at `axis_value`.
std::uint64_t point_seed(std::uint64_t master, double axis_value, int replicate);

/// Runs body(i) for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

// ---------------------------------------------------------------------------
// Offline optimal search
// ---------------------------------------------------------------------------

struct ConfigResult {
  TxConfig config;
  int cost = 0;  // RBGs per packet, M_MCS * K
  std::int64_t packets = 0;
  std::int64_t lost = 0;
  double plr = 0.0;
};

struct OptimalSearchResult {
  double wideband_snr_db = 0.0;
  std::vector<ConfigResult> per_config;  // pooled over seeds
  std::vector<std::vector<ConfigResult>> per_seed;
  std::vector<std::uint64_t> seeds;
  std::optional<ConfigResult> best;  // nullopt: none feasible
};

/// Fixed-configuration simulation of every feasible {MCS, K} at snr_wb for
/// each seed. Picks the minimum-cost configuration whose pooled PLR is at
/// most target_plr (ties: lower PLR, then lower K).
OptimalSearchResult optimal_search(const ScenarioConfig& base, const BlerModel& model,
                                   double snr_wb_db, double target_plr,
                                   std::span<const std::uint64_t> seeds, int threads = 1);

/// Cheapest configuration meeting the target among those with the given
/// MCS (for MCS 0 this is the fixed robust baseline: minimal feasible K).
std::optional<ConfigResult> min_k_for_mcs(const OptimalSearchResult& r, int mcs, double target_plr);

// ---------------------------------------------------------------------------
// Fixed vs adaptive vs optimal
// ---------------------------------------------------------------------------

struct ComparePoint {
  double wideband_snr_db = 0.0;
  std::vector<std::uint64_t> seeds;
  std::optional<ConfigResult> mcs0;
  std::optional<ConfigResult> optimal;
  std::vector<SimMetrics> adaptive;  // one per seed
  OptimalSearchResult search;

  double adaptive_mean_rbgs() const;
  double adaptive_plr() const;
  double adaptive_reconf_per_s() const;
  bool feasible() const { return mcs0.has_value() && optimal.has_value(); }
};

std::vector<ComparePoint> compare(const ScenarioConfig& base, const BlerModel& model,
                                  std::span<const double> snr_list_db, double target_plr,
                                  int replicates, std::uint64_t master_seed, int threads = 1);

/// Per seed: one row each for mcs0, adaptive and optimal. Infeasible
/// baselines get NaN mean_rbgs.
std::vector<ResultRow> compare_rows(std::span<const ComparePoint> points);

// ---------------------------------------------------------------------------
// SNR_wb distribution of a UE uniform in a disc
// ---------------------------------------------------------------------------

/// Probability mass on each grid point for a UE uniformly placed in a disc
/// whose edge has SNR_wb = edge_snr_db, with SNR_wb falling by
/// slope_db_per_decade per decade of distance. P(SNR_wb >= s) =
/// 10^(-2 (s - edge) / slope). Grid points split the axis at midpoints; the
/// last bin extends to +inf. Points below the edge get zero weight.
std::vector<double> snr_distribution_weights(std::span<const double> grid_db, double edge_snr_db,
                                             double slope_db_per_decade);

struct DistributionAverage {
  double mcs0_mean_rbgs = 0.0;
  double adaptive_mean_rbgs = 0.0;
  double optimal_mean_rbgs = 0.0;
  double total_weight = 0.0;  // mass of the feasible points
};

/// Weighted means over feasible compare points (weights renormalized).
DistributionAverage distribution_average(std::span<const ComparePoint> points,
                                         std::span<const double> weights);

// ---------------------------------------------------------------------------
// Window and threshold sweeps
// ---------------------------------------------------------------------------

struct AdaptiveSummary {
  double mean_rbgs = 0.0;     // distribution-weighted
  double plr = 0.0;           // distribution-weighted
  double max_plr = 0.0;       // worst grid point
  double reconf_per_s = 0.0;  // distribution-weighted
};

/// Adaptive runs at each grid point with one seed, summarized with the
/// distribution weights.
AdaptiveSummary run_adaptive_over_grid(const ScenarioConfig& sc, const BlerModel& model,
                                       std::span<const double> grid_db,
                                       std::span<const double> weights);

struct SweepSpec {
  std::vector<double> snr_grid_db;
  std::vector<double> weights;  // same length as snr_grid_db
  int replicates = 1;
  std::uint64_t master_seed = 1;
  int threads = 1;
};

/// One row per (W, replicate): axis=window, value=W in ms, mode=adaptive.
std::vector<ResultRow> sweep_window(const ScenarioConfig& base, const BlerModel& model,
                                    std::span<const double> windows_ms, const SweepSpec& spec);

/// For every W and every (plr_low < plr_high) pair: rows with axis=thresholds,
/// value=plr_low, mode=adaptive/w=<W>/high=<plr_high>, plr = worst grid
/// point. Per W, one extra row mode=selected/w=<W>/high=<plr_high> for the
/// pair with the least mean RBGs whose worst-point PLR, maximized over
/// replicates, is at most target_plr.
std::vector<ResultRow> sweep_thresholds(const ScenarioConfig& base, const BlerModel& model,
                                        std::span<const double> windows_ms,
                                        std::span<const double> plr_lows,
                                        std::span<const double> plr_highs, double target_plr,
                                        const SweepSpec& spec);

}  // namespace urllc

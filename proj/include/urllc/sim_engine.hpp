#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "urllc/adaptive_selector.hpp"
#include "urllc/channel_model.hpp"
#include "urllc/link_abstraction.hpp"
#include "urllc/rng.hpp"
#include "urllc/types.hpp"

namespace urllc {

enum class DecodeMode {
  independent,  // attempt i fails independently with BLER_i; loss prob = product
  nested,       // one uniform draw against BLER_1..BLER_K; loss prob = BLER_K
};

/// One-UE scenario. Defaults follow the reference setup: 100 MHz split in
/// 16 RBGs, 71.4 us mini-slots, 32-byte packets every 10 ms, SRS every
/// 5 ms, 14 slots of delay budget, 23 dBm, K_max = 4.
struct ScenarioConfig {
  double bandwidth_hz = 100e6;
  int rbg_count = 16;
  double slot_length_s = 71.4e-6;
  int packet_size_bytes = 32;
  double packet_period_s = 10e-3;
  double srs_period_s = 5e-3;
  int delay_budget_slots = 14;
  double latency_requirement_s = 1e-3;
  double tx_power_dbm = 23.0;
  int k_max = 4;

  PathlossParams pathloss;
  double noise_psd_dbm_hz = -174.0;
  double noise_figure_db = 0.0;
  std::optional<double> distance_m;  // when set, overrides wideband_snr_db
  double wideband_snr_db = 0.0;

  bool fading = true;
  double doppler_hz = 5.0;
  int sinusoids_per_tap = 16;

  double window_ms = 1000.0;
  double plr_low = 1e-4;
  double plr_high = 1e-3;
  std::optional<TxConfig> fixed_config;  // disables the adaptive selector

  double duration_s = 100.0;
  std::uint64_t seed = 1;
  DecodeMode decode_mode = DecodeMode::independent;

  SyntheticCurveParams curves = default_curve_params();
  std::string bler_table_path;  // when set, curves come from this CSV
};

/// Throws ConfigError for malformed values and ConfigurationInfeasible for
/// well-formed but unrealizable scenarios (K_max beyond the delay budget,
/// budget longer than the latency requirement, infeasible fixed MCS).
void validate(const ScenarioConfig& sc);
void validate(const ScenarioConfig& sc, const BlerModel& model);

double resolved_wideband_snr_db(const ScenarioConfig& sc);
SelectorParams selector_params(const ScenarioConfig& sc);
BlerModel make_bler_model(const ScenarioConfig& sc);

/// Every {MCS, K <= k_max} whose MCS fits the packet into the band.
std::vector<TxConfig> feasible_configs(const ScenarioConfig& sc, const BlerModel& model);

struct SimMetrics {
  std::int64_t packets_sent = 0;
  std::int64_t packets_lost = 0;
  double plr = 0.0;
  std::int64_t total_rbgs = 0;
  double mean_rbgs_per_packet = 0.0;
  std::vector<double> reconfiguration_times;
  std::vector<int> latency_samples;  // delivery slot of each delivered packet
  double duration_s = 0.0;

  double reconf_per_s() const {
    return duration_s > 0.0 ? static_cast<double>(reconfiguration_times.size()) / duration_s : 0.0;
  }

  friend bool operator==(const SimMetrics&, const SimMetrics&) = default;
};

/// Index of the first successful attempt, or nullopt when the packet is
/// lost. Throws std::domain_error for an empty list.
std::optional<int> sample_decode(std::span<const double> blers_cumulative, DecodeMode mode,
                                 Rng& rng);

/// Runs one scenario. Deterministic given sc.seed. When event_log is given,
/// writes `time,event_type,detail` lines to it.
SimMetrics run(const ScenarioConfig& sc, const BlerModel& model, std::ostream* event_log = nullptr);
SimMetrics run(const ScenarioConfig& sc);

/// Runs one fixed-configuration simulation per entry of configs, sharing
/// the channel evaluation. Result i equals run() with fixed_config =
/// configs[i].
std::vector<SimMetrics> run_fixed_batch(const ScenarioConfig& sc, const BlerModel& model,
                                        std::span<const TxConfig> configs);

}  // namespace urllc

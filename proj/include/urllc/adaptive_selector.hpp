#pragma once

#include <span>
#include <vector>

#include "urllc/channel_model.hpp"
#include "urllc/link_abstraction.hpp"
#include "urllc/rng.hpp"
#include "urllc/types.hpp"

namespace urllc {

enum class Marking { invalid, valid };

struct SelectorParams {
  double window = 200.0;  // W, in SRS receptions
  double plr_low = 1e-4;
  double plr_high = 1e-3;
  int k_max = 4;

  /// Throws ConfigError unless window >= 1, 0 <= plr_low < plr_high <= 1
  /// and k_max >= 1.
  void validate() const;
};

/// The most robust configuration, {MCS 0, k_max}. Throws std::domain_error
/// for k_max < 1.
TxConfig initial_config(int k_max);

/// (1/w) * sample + (1 - 1/w) * prev, evaluated as prev + (sample - prev)/w.
/// Throws std::domain_error for w < 1.
double ewma_update(double prev, double sample, double w);

struct ConfigEstimate {
  TxConfig config;
  int cost = 0;  // M_MCS * K; 0 when infeasible
  bool feasible = false;
  bool seeded = false;
  double ewma_plr = 1.0;
  Marking marking = Marking::invalid;
};

struct Selection {
  TxConfig config;
  bool reconfigured = false;
};

/// gNB-side selector for one UE. Keeps an EWMA PLR estimate per {MCS, K},
/// marks configurations with two thresholds, and picks the cheapest valid
/// one. Estimates inside (plr_low, plr_high) keep their previous marking.
class AdaptiveSelector {
 public:
  /// Throws ConfigurationInfeasible when MCS 0 cannot carry the packet.
  AdaptiveSelector(BlerModel model, SelectorParams params, int m_total, int packet_size_bytes);

  const SelectorParams& params() const { return params_; }
  const BlerModel& model() const { return model_; }
  const TxConfig& current() const { return current_; }
  std::span<const ConfigEstimate> estimates() const { return estimates_; }

  std::size_t index_of(const TxConfig& c) const;
  const ConfigEstimate& estimate(const TxConfig& c) const { return estimates_[index_of(c)]; }

  /// One PLR sample per feasible configuration from an SRS measurement,
  /// folded into the estimates. Configurations sharing an MCS reuse the
  /// same k_max RBG draws, each K taking the first K attempts.
  void update_on_srs(const RbgSnrVector& srs_snrs, Rng& rng);

  /// Folds externally computed samples, one per configuration in
  /// estimates() order. Entries for infeasible configurations are ignored.
  void observe(std::span<const double> plr_samples);

  /// Cheapest valid configuration (ties: lower EWMA, then lower K, then
  /// lower MCS), or {MCS 0, k_max} when nothing is valid. Becomes the
  /// current configuration.
  Selection select_config();

  int reconfiguration_count() const { return reconfigurations_; }

 private:
  BlerModel model_;
  SelectorParams params_;
  int m_total_;
  int packet_size_bytes_;
  std::vector<ConfigEstimate> estimates_;
  std::vector<double> scratch_;
  TxConfig current_;
  int reconfigurations_ = 0;
};

}  // namespace urllc

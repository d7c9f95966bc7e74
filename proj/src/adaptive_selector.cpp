#include "urllc/adaptive_selector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace urllc {

void SelectorParams::validate() const {
  if (!(window >= 1.0)) throw ConfigError("selector window must be >= 1 SRS reception");
  if (!(plr_low >= 0.0 && plr_high <= 1.0 && plr_low < plr_high))
    throw ConfigError("need 0 <= plr_low < plr_high <= 1");
  if (k_max < 1) throw ConfigError("k_max must be >= 1");
}

TxConfig initial_config(int k_max) {
  if (k_max < 1) throw std::domain_error("k_max must be >= 1");
  return {0, k_max};
}

double ewma_update(double prev, double sample, double w) {
  if (!(w >= 1.0)) throw std::domain_error("EWMA window must be >= 1");
  if (w == 1.0) return sample;
  return std::clamp(prev + (sample - prev) / w, 0.0, 1.0);
}

AdaptiveSelector::AdaptiveSelector(BlerModel model, SelectorParams params, int m_total,
                                   int packet_size_bytes)
    : model_(std::move(model)),
      params_(params),
      m_total_(m_total),
      packet_size_bytes_(packet_size_bytes),
      current_(initial_config(params.k_max)) {
  params_.validate();
  required_rbgs(model_, 0, packet_size_bytes_, m_total_);  // throws if MCS 0 is infeasible

  for (int mcs = 0; mcs < model_.mcs_count(); ++mcs) {
    int m_mcs = 0;
    bool feasible = true;
    try {
      m_mcs = required_rbgs(model_, mcs, packet_size_bytes_, m_total_);
    } catch (const ConfigurationInfeasible&) {
      feasible = false;
    }
    for (int k = 1; k <= params_.k_max; ++k) {
      ConfigEstimate e;
      e.config = {mcs, k};
      e.feasible = feasible;
      e.cost = feasible ? m_mcs * k : 0;
      e.marking = (e.config == current_) ? Marking::valid : Marking::invalid;
      estimates_.push_back(e);
    }
  }
  scratch_.resize(estimates_.size());
}

std::size_t AdaptiveSelector::index_of(const TxConfig& c) const {
  if (c.mcs < 0 || c.mcs >= model_.mcs_count() || c.k < 1 || c.k > params_.k_max)
    throw std::domain_error("configuration outside the search space: " + to_string(c));
  return static_cast<std::size_t>(c.mcs * params_.k_max + (c.k - 1));
}

void AdaptiveSelector::update_on_srs(const RbgSnrVector& srs_snrs, Rng& rng) {
  if (srs_snrs.size() != m_total_) throw std::domain_error("SRS vector length must equal M");
  for (int mcs = 0; mcs < model_.mcs_count(); ++mcs) {
    const std::size_t base = static_cast<std::size_t>(mcs * params_.k_max);
    if (!estimates_[base].feasible) continue;
    const auto blers =
        estimate_attempt_blers(srs_snrs, mcs, params_.k_max, model_, packet_size_bytes_, rng);
    double plr = 1.0;
    for (int k = 1; k <= params_.k_max; ++k) {
      plr *= blers[static_cast<std::size_t>(k - 1)];
      scratch_[base + static_cast<std::size_t>(k - 1)] = plr;
    }
  }
  observe(scratch_);
}

void AdaptiveSelector::observe(std::span<const double> plr_samples) {
  if (plr_samples.size() != estimates_.size())
    throw std::domain_error("need one PLR sample per configuration");
  for (std::size_t i = 0; i < estimates_.size(); ++i) {
    auto& e = estimates_[i];
    if (!e.feasible) continue;
    const double x = plr_samples[i];
    if (!e.seeded) {
      e.ewma_plr = x;
      e.seeded = true;
    } else {
      e.ewma_plr = ewma_update(e.ewma_plr, x, params_.window);
    }
    if (e.ewma_plr < params_.plr_low)
      e.marking = Marking::valid;
    else if (e.ewma_plr > params_.plr_high)
      e.marking = Marking::invalid;
  }
}

Selection AdaptiveSelector::select_config() {
  const ConfigEstimate* best = nullptr;
  for (const auto& e : estimates_) {
    if (!e.feasible || e.marking != Marking::valid) continue;
    if (best == nullptr || e.cost < best->cost ||
        (e.cost == best->cost &&
         (e.ewma_plr < best->ewma_plr ||
          (e.ewma_plr == best->ewma_plr &&
           (e.config.k < best->config.k ||
            (e.config.k == best->config.k && e.config.mcs < best->config.mcs)))))) {
      best = &e;
    }
  }
  const TxConfig chosen = best ? best->config : initial_config(params_.k_max);
  Selection s{chosen, chosen != current_};
  if (s.reconfigured) {
    current_ = chosen;
    ++reconfigurations_;
  }
  return s;
}

}  // namespace urllc

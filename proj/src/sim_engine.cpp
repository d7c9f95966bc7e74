#include "urllc/sim_engine.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <queue>
#include <sstream>

#include "urllc/grant_scheduler.hpp"

namespace urllc {

namespace {

enum StreamId : std::uint64_t { kFading = 1, kSelector = 2, kRbg = 3, kDecode = 4 };

std::int64_t to_ns(double s) { return std::llround(s * 1e9); }

std::uint64_t config_stream(const std::optional<TxConfig>& c) {
  return c ? 1 + static_cast<std::uint64_t>(c->mcs) * 64 + static_cast<std::uint64_t>(c->k) : 0;
}

void check(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

/// Per-RBG SNR source. With fading disabled every RBG sees SNR_wb.
class Channel {
 public:
  Channel(const ScenarioConfig& sc, double snr_wb_db)
      : snr_wb_db_(snr_wb_db),
        flat_(RbgSnrVector::Constant(sc.rbg_count, db_to_linear(snr_wb_db))) {
    if (sc.fading) {
      fading_.emplace(epa_profile(), sc.doppler_hz, derive_seed(sc.seed, kFading),
                      sc.sinusoids_per_tap);
      const auto f = rbg_center_frequencies(sc.bandwidth_hz, sc.rbg_count);
      grid_.emplace(f, fading_->profile());
    }
  }

  RbgSnrVector at(std::int64_t t_ns) {
    if (!fading_) return flat_;
    return sample_at(*fading_, static_cast<double>(t_ns) * 1e-9, snr_wb_db_, *grid_).per_rbg_snr;
  }

 private:
  double snr_wb_db_;
  RbgSnrVector flat_;
  std::optional<FadingState> fading_;
  std::optional<FrequencyGrid> grid_;
};

/// Lazily evaluated channel snapshots for the slots of one packet.
class PacketSlots {
 public:
  PacketSlots(Channel& ch, int budget, std::int64_t slot_ns)
      : ch_(ch), slot_ns_(slot_ns), snaps_(static_cast<std::size_t>(budget)) {}

  void reset(std::int64_t t0_ns) {
    t0_ns_ = t0_ns;
    for (auto& s : snaps_) s.reset();
  }

  const RbgSnrVector& at(int slot) {
    auto& s = snaps_[static_cast<std::size_t>(slot)];
    if (!s) s = ch_.at(t0_ns_ + slot * slot_ns_);
    return *s;
  }

 private:
  Channel& ch_;
  std::int64_t slot_ns_;
  std::int64_t t0_ns_ = 0;
  std::vector<std::optional<RbgSnrVector>> snaps_;
};

/// One UE-side packet stream: its own RBG and decode random streams.
struct Transmitter {
  Rng rbg_rng;
  Rng decode_rng;
  SimMetrics metrics;
};

struct PacketOutcome {
  std::optional<int> slot;  // delivery slot when delivered
  int rbgs = 0;
};

PacketOutcome transmit(const ScenarioConfig& sc, const BlerModel& model, const TxConfig& cfg,
                       PacketSlots& slots, Transmitter& tx) {
  const int m_total = sc.rbg_count;
  const int m_mcs = required_rbgs(model, cfg.mcs, sc.packet_size_bytes, m_total);
  const auto schedule = select_slots(cfg.k, sc.delay_budget_slots);
  const double factor = static_cast<double>(m_total) / static_cast<double>(m_mcs);

  AttemptSnrMatrix attempts(cfg.k, m_mcs);
  for (int j = 0; j < cfg.k; ++j) {
    const auto& snap = slots.at(schedule.slots[static_cast<std::size_t>(j)]);
    const auto sel = select_rbgs(m_total, m_mcs, tx.rbg_rng);
    for (int i = 0; i < m_mcs; ++i)
      attempts(j, i) = snap(sel.indices[static_cast<std::size_t>(i)]) * factor;
  }
  const auto blers = cumulative_blers(attempts, model, cfg.mcs);
  const auto attempt = sample_decode(blers, sc.decode_mode, tx.decode_rng);

  PacketOutcome out;
  out.rbgs = m_mcs * cfg.k;
  if (attempt) out.slot = schedule.slots[static_cast<std::size_t>(*attempt)];

  auto& m = tx.metrics;
  ++m.packets_sent;
  m.total_rbgs += out.rbgs;
  if (out.slot)
    m.latency_samples.push_back(*out.slot);
  else
    ++m.packets_lost;
  return out;
}

void finalize(SimMetrics& m, double duration_s) {
  m.duration_s = duration_s;
  if (m.packets_sent > 0) {
    m.plr = static_cast<double>(m.packets_lost) / static_cast<double>(m.packets_sent);
    m.mean_rbgs_per_packet =
        static_cast<double>(m.total_rbgs) / static_cast<double>(m.packets_sent);
  }
}

std::string fmt_time(std::int64_t t_ns) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(9) << static_cast<double>(t_ns) * 1e-9;
  return s.str();
}

enum class EventKind { srs = 0, packet = 1 };

struct Event {
  std::int64_t t_ns;
  EventKind kind;
  std::uint64_t seq;

  // Min-heap on (time, kind, seq); SRS before a packet at the same instant.
  bool operator>(const Event& o) const {
    if (t_ns != o.t_ns) return t_ns > o.t_ns;
    if (kind != o.kind) return kind > o.kind;
    return seq > o.seq;
  }
};

}  // namespace

void validate(const ScenarioConfig& sc) {
  check(sc.bandwidth_hz > 0.0, "bandwidth_hz must be positive");
  check(sc.rbg_count >= 1, "rbg_count must be >= 1");
  check(sc.slot_length_s > 0.0, "slot_length_s must be positive");
  check(sc.packet_size_bytes >= 1, "packet_size_bytes must be >= 1");
  check(sc.packet_period_s > 0.0, "packet_period_s must be positive");
  check(sc.srs_period_s > 0.0, "srs_period_s must be positive");
  check(sc.delay_budget_slots >= 1, "delay_budget_slots must be >= 1");
  check(sc.latency_requirement_s > 0.0, "latency_requirement_s must be positive");
  check(sc.k_max >= 1, "k_max must be >= 1");
  check(sc.doppler_hz >= 0.0, "doppler_hz must be non-negative");
  check(sc.sinusoids_per_tap >= 1, "sinusoids_per_tap must be >= 1");
  check(sc.window_ms > 0.0, "window_ms must be positive");
  check(sc.duration_s >= 0.0, "duration_s must be non-negative");
  check(!sc.distance_m || *sc.distance_m > 0.0, "distance_m must be positive");
  try {
    sc.pathloss.validate();
  } catch (const std::domain_error& e) {
    throw ConfigError(e.what());
  }
  selector_params(sc).validate();

  if (sc.k_max > sc.delay_budget_slots)
    throw ConfigurationInfeasible("k_max " + std::to_string(sc.k_max) + " exceeds the " +
                                  std::to_string(sc.delay_budget_slots) + "-slot delay budget");
  if (to_ns(sc.slot_length_s) * sc.delay_budget_slots > to_ns(sc.latency_requirement_s))
    throw ConfigurationInfeasible("delay budget exceeds the latency requirement");
  if (sc.fixed_config && (sc.fixed_config->k < 1 || sc.fixed_config->k > sc.k_max))
    throw ConfigurationInfeasible("fixed configuration K outside [1, k_max]");
}

void validate(const ScenarioConfig& sc, const BlerModel& model) {
  validate(sc);
  try {
    required_rbgs(model, 0, sc.packet_size_bytes, sc.rbg_count);
    if (sc.fixed_config) required_rbgs(model, sc.fixed_config->mcs, sc.packet_size_bytes, sc.rbg_count);
  } catch (const std::domain_error& e) {
    throw ConfigurationInfeasible(e.what());
  }
}

double resolved_wideband_snr_db(const ScenarioConfig& sc) {
  if (!sc.distance_m) return sc.wideband_snr_db;
  return wideband_snr_db(sc.tx_power_dbm, path_loss_db(*sc.distance_m, sc.pathloss),
                         sc.noise_psd_dbm_hz, sc.bandwidth_hz, sc.noise_figure_db);
}

SelectorParams selector_params(const ScenarioConfig& sc) {
  SelectorParams p;
  p.window = sc.window_ms / (sc.srs_period_s * 1e3);
  p.plr_low = sc.plr_low;
  p.plr_high = sc.plr_high;
  p.k_max = sc.k_max;
  return p;
}

BlerModel make_bler_model(const ScenarioConfig& sc) {
  if (sc.bler_table_path.empty()) {
    try {
      return synthetic_bler_model(sc.curves);
    } catch (const std::domain_error& e) {
      throw ConfigError(e.what());
    }
  }
  std::ifstream in(sc.bler_table_path);
  if (!in) throw ConfigError("cannot open BLER table " + sc.bler_table_path);
  return load_bler_table(in, sc.curves.beta, sc.curves.bits_per_rbg);
}

std::vector<TxConfig> feasible_configs(const ScenarioConfig& sc, const BlerModel& model) {
  std::vector<TxConfig> out;
  for (int mcs = 0; mcs < model.mcs_count(); ++mcs) {
    try {
      required_rbgs(model, mcs, sc.packet_size_bytes, sc.rbg_count);
    } catch (const ConfigurationInfeasible&) {
      continue;
    }
    for (int k = 1; k <= sc.k_max; ++k) out.push_back({mcs, k});
  }
  return out;
}

std::optional<int> sample_decode(std::span<const double> blers_cumulative, DecodeMode mode,
                                 Rng& rng) {
  if (blers_cumulative.empty()) throw std::domain_error("sample_decode needs at least one BLER");
  const int k = static_cast<int>(blers_cumulative.size());
  if (mode == DecodeMode::independent) {
    for (int i = 0; i < k; ++i)
      if (uniform01(rng) >= blers_cumulative[static_cast<std::size_t>(i)]) return i;
    return std::nullopt;
  }
  const double u = uniform01(rng);
  for (int i = 0; i < k; ++i)
    if (u >= blers_cumulative[static_cast<std::size_t>(i)]) return i;
  return std::nullopt;
}

SimMetrics run(const ScenarioConfig& sc) { return run(sc, make_bler_model(sc)); }

SimMetrics run(const ScenarioConfig& sc, const BlerModel& model, std::ostream* event_log) {
  validate(sc, model);

  const double snr_wb = resolved_wideband_snr_db(sc);
  Channel channel(sc, snr_wb);
  PacketSlots slots(channel, sc.delay_budget_slots, to_ns(sc.slot_length_s));

  const std::uint64_t stream = config_stream(sc.fixed_config);
  Transmitter tx{Rng(derive_seed(sc.seed, kRbg, stream)),
                 Rng(derive_seed(sc.seed, kDecode, stream)), {}};

  std::optional<AdaptiveSelector> selector;
  Rng selector_rng(derive_seed(sc.seed, kSelector));
  if (!sc.fixed_config)
    selector.emplace(model, selector_params(sc), sc.rbg_count, sc.packet_size_bytes);

  const std::int64_t end_ns = to_ns(sc.duration_s);
  const std::int64_t srs_ns = to_ns(sc.srs_period_s);
  const std::int64_t pkt_ns = to_ns(sc.packet_period_s);

  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue;
  std::uint64_t seq = 0;
  if (end_ns > 0) {
    queue.push({0, EventKind::packet, seq++});
    if (selector) queue.push({0, EventKind::srs, seq++});
  }

  while (!queue.empty()) {
    const Event ev = queue.top();
    queue.pop();

    if (ev.kind == EventKind::srs) {
      selector->update_on_srs(channel.at(ev.t_ns), selector_rng);
      const TxConfig before = selector->current();
      const Selection sel = selector->select_config();
      if (event_log) *event_log << fmt_time(ev.t_ns) << ",srs," << to_string(sel.config) << '\n';
      if (sel.reconfigured) {
        tx.metrics.reconfiguration_times.push_back(static_cast<double>(ev.t_ns) * 1e-9);
        if (event_log)
          *event_log << fmt_time(ev.t_ns) << ",reconfig," << to_string(before) << "->"
                     << to_string(sel.config) << '\n';
      }
      if (ev.t_ns + srs_ns < end_ns) queue.push({ev.t_ns + srs_ns, EventKind::srs, seq++});
    } else {
      const TxConfig cfg = selector ? selector->current() : *sc.fixed_config;
      slots.reset(ev.t_ns);
      const auto out = transmit(sc, model, cfg, slots, tx);
      if (event_log) {
        *event_log << fmt_time(ev.t_ns) << ",packet," << to_string(cfg) << ";rbgs=" << out.rbgs
                   << ';';
        if (out.slot)
          *event_log << "delivered@" << *out.slot << '\n';
        else
          *event_log << "lost\n";
      }
      if (ev.t_ns + pkt_ns < end_ns) queue.push({ev.t_ns + pkt_ns, EventKind::packet, seq++});
    }
  }

  finalize(tx.metrics, sc.duration_s);
  return tx.metrics;
}

std::vector<SimMetrics> run_fixed_batch(const ScenarioConfig& sc, const BlerModel& model,
                                        std::span<const TxConfig> configs) {
  std::vector<Transmitter> txs;
  txs.reserve(configs.size());
  for (const auto& c : configs) {
    ScenarioConfig one = sc;
    one.fixed_config = c;
    validate(one, model);
    const std::uint64_t stream = config_stream(c);
    txs.push_back({Rng(derive_seed(sc.seed, kRbg, stream)),
                   Rng(derive_seed(sc.seed, kDecode, stream)), {}});
  }

  Channel channel(sc, resolved_wideband_snr_db(sc));
  PacketSlots slots(channel, sc.delay_budget_slots, to_ns(sc.slot_length_s));
  const std::int64_t end_ns = to_ns(sc.duration_s);
  const std::int64_t pkt_ns = to_ns(sc.packet_period_s);

  for (std::int64_t t = 0; t < end_ns; t += pkt_ns) {
    slots.reset(t);
    for (std::size_t i = 0; i < configs.size(); ++i) transmit(sc, model, configs[i], slots, txs[i]);
  }

  std::vector<SimMetrics> out;
  out.reserve(txs.size());
  for (auto& tx : txs) {
    finalize(tx.metrics, sc.duration_s);
    out.push_back(std::move(tx.metrics));
  }
  return out;
}

}  // namespace urllc

#include "urllc/experiment.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <tuple>

namespace urllc {

namespace {

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream s;
  s << std::setprecision(10) << x;
  return s.str();
}

ScenarioConfig at_point(const ScenarioConfig& base, double snr_wb_db, std::uint64_t seed) {
  ScenarioConfig sc = base;
  sc.distance_m.reset();
  sc.wideband_snr_db = snr_wb_db;
  sc.seed = seed;
  return sc;
}

bool better(const ConfigResult& a, const ConfigResult& b) {
  return std::tie(a.cost, a.plr, a.config.k, a.config.mcs) <
         std::tie(b.cost, b.plr, b.config.k, b.config.mcs);
}

ConfigResult make_result(const TxConfig& c, const SimMetrics& m, int m_mcs) {
  return {c, m_mcs * c.k, m.packets_sent, m.packets_lost, m.plr};
}

}  // namespace

void write_results_csv(std::ostream& out, std::vector<ResultRow> rows) {
  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.axis, a.value, a.mode, a.seed) < std::tie(b.axis, b.value, b.mode, b.seed);
  });
  out << kResultsHeader << '\n';
  for (const auto& r : rows)
    out << r.axis << ',' << num(r.value) << ',' << r.seed << ',' << num(r.plr) << ','
        << num(r.mean_rbgs) << ',' << num(r.reconf_per_s) << ',' << r.mode << '\n';
}

std::uint64_t point_seed(std::uint64_t master, double axis_value, int replicate) {
  return derive_seed(master, std::bit_cast<std::uint64_t>(axis_value),
                     static_cast<std::uint64_t>(replicate));
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

OptimalSearchResult optimal_search(const ScenarioConfig& base, const BlerModel& model,
                                   double snr_wb_db, double target_plr,
                                   std::span<const std::uint64_t> seeds, int threads) {
  ScenarioConfig probe = at_point(base, snr_wb_db, base.seed);
  probe.fixed_config.reset();
  const auto configs = feasible_configs(probe, model);

  OptimalSearchResult r;
  r.wideband_snr_db = snr_wb_db;
  r.seeds.assign(seeds.begin(), seeds.end());
  r.per_seed.resize(seeds.size());
  parallel_for(seeds.size(), threads, [&](std::size_t i) {
    ScenarioConfig sc = probe;
    sc.seed = seeds[i];
    const auto metrics = run_fixed_batch(sc, model, configs);
    auto& out = r.per_seed[i];
    for (std::size_t c = 0; c < configs.size(); ++c)
      out.push_back(make_result(configs[c], metrics[c],
                                required_rbgs(model, configs[c].mcs, sc.packet_size_bytes, sc.rbg_count)));
  });

  for (std::size_t c = 0; c < configs.size(); ++c) {
    ConfigResult pooled = r.per_seed.empty() ? ConfigResult{configs[c], 0, 0, 0, 0.0}
                                             : r.per_seed.front()[c];
    pooled.packets = 0;
    pooled.lost = 0;
    for (const auto& s : r.per_seed) {
      pooled.packets += s[c].packets;
      pooled.lost += s[c].lost;
    }
    pooled.plr = pooled.packets > 0
                     ? static_cast<double>(pooled.lost) / static_cast<double>(pooled.packets)
                     : 1.0;
    r.per_config.push_back(pooled);
  }

  for (const auto& c : r.per_config)
    if (c.packets > 0 && c.plr <= target_plr && (!r.best || better(c, *r.best))) r.best = c;
  return r;
}

std::optional<ConfigResult> min_k_for_mcs(const OptimalSearchResult& r, int mcs, double target_plr) {
  std::optional<ConfigResult> best;
  for (const auto& c : r.per_config)
    if (c.config.mcs == mcs && c.packets > 0 && c.plr <= target_plr && (!best || better(c, *best)))
      best = c;
  return best;
}

double ComparePoint::adaptive_mean_rbgs() const {
  std::int64_t rbgs = 0, packets = 0;
  for (const auto& m : adaptive) {
    rbgs += m.total_rbgs;
    packets += m.packets_sent;
  }
  return packets > 0 ? static_cast<double>(rbgs) / static_cast<double>(packets) : 0.0;
}

double ComparePoint::adaptive_plr() const {
  std::int64_t lost = 0, packets = 0;
  for (const auto& m : adaptive) {
    lost += m.packets_lost;
    packets += m.packets_sent;
  }
  return packets > 0 ? static_cast<double>(lost) / static_cast<double>(packets) : 0.0;
}

double ComparePoint::adaptive_reconf_per_s() const {
  double reconf = 0.0, duration = 0.0;
  for (const auto& m : adaptive) {
    reconf += static_cast<double>(m.reconfiguration_times.size());
    duration += m.duration_s;
  }
  return duration > 0.0 ? reconf / duration : 0.0;
}

std::vector<ComparePoint> compare(const ScenarioConfig& base, const BlerModel& model,
                                  std::span<const double> snr_list_db, double target_plr,
                                  int replicates, std::uint64_t master_seed, int threads) {
  std::vector<ComparePoint> points(snr_list_db.size());
  for (std::size_t p = 0; p < points.size(); ++p) {
    points[p].wideband_snr_db = snr_list_db[p];
    points[p].adaptive.resize(static_cast<std::size_t>(replicates));
    for (int r = 0; r < replicates; ++r)
      points[p].seeds.push_back(point_seed(master_seed, snr_list_db[p], r));
  }

  // Adaptive runs, one task per (point, replicate).
  const std::size_t reps = static_cast<std::size_t>(replicates);
  parallel_for(points.size() * reps, threads, [&](std::size_t task) {
    auto& pt = points[task / reps];
    const std::size_t r = task % reps;
    ScenarioConfig sc = at_point(base, pt.wideband_snr_db, pt.seeds[r]);
    sc.fixed_config.reset();
    pt.adaptive[r] = run(sc, model);
  });

  for (auto& pt : points) {
    pt.search = optimal_search(base, model, pt.wideband_snr_db, target_plr, pt.seeds, threads);
    pt.optimal = pt.search.best;
    pt.mcs0 = min_k_for_mcs(pt.search, 0, target_plr);
  }
  return points;
}

std::vector<ResultRow> compare_rows(std::span<const ComparePoint> points) {
  std::vector<ResultRow> rows;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& pt : points) {
    for (std::size_t r = 0; r < pt.seeds.size(); ++r) {
      const auto seed = pt.seeds[r];
      const auto& a = pt.adaptive[r];
      rows.push_back({"wideband_snr", pt.wideband_snr_db, seed, a.plr, a.mean_rbgs_per_packet,
                      a.reconf_per_s(), "adaptive"});
      for (const auto& [mode, choice] : {std::pair{"mcs0", pt.mcs0}, std::pair{"optimal", pt.optimal}}) {
        if (!choice) {
          rows.push_back({"wideband_snr", pt.wideband_snr_db, seed, nan, nan, 0.0, mode});
          continue;
        }
        double plr = nan;
        for (const auto& c : pt.search.per_seed[r])
          if (c.config == choice->config) plr = c.plr;
        rows.push_back({"wideband_snr", pt.wideband_snr_db, seed, plr,
                        static_cast<double>(choice->cost), 0.0, mode});
      }
    }
  }
  return rows;
}

std::vector<double> snr_distribution_weights(std::span<const double> grid_db, double edge_snr_db,
                                             double slope_db_per_decade) {
  const auto tail = [&](double s) {  // P(SNR_wb >= s)
    if (s <= edge_snr_db) return 1.0;
    return std::pow(10.0, -2.0 * (s - edge_snr_db) / slope_db_per_decade);
  };
  std::vector<double> w(grid_db.size(), 0.0);
  for (std::size_t i = 0; i < grid_db.size(); ++i) {
    if (grid_db[i] < edge_snr_db) continue;
    const double lo = (i == 0) ? edge_snr_db : std::max(edge_snr_db, 0.5 * (grid_db[i - 1] + grid_db[i]));
    const double hi_tail = (i + 1 == grid_db.size()) ? 0.0 : tail(0.5 * (grid_db[i] + grid_db[i + 1]));
    w[i] = tail(lo) - hi_tail;
  }
  return w;
}

DistributionAverage distribution_average(std::span<const ComparePoint> points,
                                         std::span<const double> weights) {
  DistributionAverage avg;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& pt = points[i];
    if (!pt.feasible() || weights[i] <= 0.0) continue;
    avg.total_weight += weights[i];
    avg.mcs0_mean_rbgs += weights[i] * pt.mcs0->cost;
    avg.optimal_mean_rbgs += weights[i] * pt.optimal->cost;
    avg.adaptive_mean_rbgs += weights[i] * pt.adaptive_mean_rbgs();
  }
  if (avg.total_weight > 0.0) {
    avg.mcs0_mean_rbgs /= avg.total_weight;
    avg.optimal_mean_rbgs /= avg.total_weight;
    avg.adaptive_mean_rbgs /= avg.total_weight;
  }
  return avg;
}

AdaptiveSummary run_adaptive_over_grid(const ScenarioConfig& sc, const BlerModel& model,
                                       std::span<const double> grid_db,
                                       std::span<const double> weights) {
  AdaptiveSummary s;
  double total = 0.0;
  for (std::size_t i = 0; i < grid_db.size(); ++i) {
    ScenarioConfig one = at_point(sc, grid_db[i], sc.seed);
    one.fixed_config.reset();
    const auto m = run(one, model);
    s.max_plr = std::max(s.max_plr, m.plr);
    if (weights[i] <= 0.0) continue;
    total += weights[i];
    s.mean_rbgs += weights[i] * m.mean_rbgs_per_packet;
    s.plr += weights[i] * m.plr;
    s.reconf_per_s += weights[i] * m.reconf_per_s();
  }
  if (total > 0.0) {
    s.mean_rbgs /= total;
    s.plr /= total;
    s.reconf_per_s /= total;
  }
  return s;
}

std::vector<ResultRow> sweep_window(const ScenarioConfig& base, const BlerModel& model,
                                    std::span<const double> windows_ms, const SweepSpec& spec) {
  const std::size_t reps = static_cast<std::size_t>(spec.replicates);
  std::vector<ResultRow> rows(windows_ms.size() * reps);
  parallel_for(rows.size(), spec.threads, [&](std::size_t task) {
    const double w = windows_ms[task / reps];
    const int r = static_cast<int>(task % reps);
    ScenarioConfig sc = base;
    sc.window_ms = w;
    sc.seed = point_seed(spec.master_seed, w, r);
    const auto s = run_adaptive_over_grid(sc, model, spec.snr_grid_db, spec.weights);
    rows[task] = {"window", w, sc.seed, s.plr, s.mean_rbgs, s.reconf_per_s, "adaptive"};
  });
  return rows;
}

std::vector<ResultRow> sweep_thresholds(const ScenarioConfig& base, const BlerModel& model,
                                        std::span<const double> windows_ms,
                                        std::span<const double> plr_lows,
                                        std::span<const double> plr_highs, double target_plr,
                                        const SweepSpec& spec) {
  struct Task {
    double w, low, high;
    int replicate;
  };
  std::vector<Task> tasks;
  for (double w : windows_ms)
    for (double high : plr_highs)
      for (double low : plr_lows)
        if (low < high)
          for (int r = 0; r < spec.replicates; ++r) tasks.push_back({w, low, high, r});

  std::vector<ResultRow> rows(tasks.size());
  std::vector<AdaptiveSummary> summaries(tasks.size());
  parallel_for(tasks.size(), spec.threads, [&](std::size_t i) {
    const auto& t = tasks[i];
    ScenarioConfig sc = base;
    sc.window_ms = t.w;
    sc.plr_low = t.low;
    sc.plr_high = t.high;
    // Keyed by W only, so every threshold pair sees the same channels.
    sc.seed = point_seed(spec.master_seed, t.w, t.replicate);
    summaries[i] = run_adaptive_over_grid(sc, model, spec.snr_grid_db, spec.weights);
    std::ostringstream mode;
    mode << "adaptive/w=" << num(t.w) << "/high=" << num(t.high);
    rows[i] = {"thresholds", t.low, sc.seed, summaries[i].max_plr, summaries[i].mean_rbgs,
               summaries[i].reconf_per_s, mode.str()};
  });

  // Pool replicates per (W, low, high) and pick the cheapest admissible pair.
  struct Pool {
    double max_plr = 0.0, rbgs = 0.0, reconf = 0.0;
    int n = 0;
  };
  std::map<std::tuple<double, double, double>, Pool> pools;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    auto& p = pools[{tasks[i].w, tasks[i].high, tasks[i].low}];
    p.max_plr = std::max(p.max_plr, summaries[i].max_plr);
    p.rbgs += summaries[i].mean_rbgs;
    p.reconf += summaries[i].reconf_per_s;
    ++p.n;
  }
  for (double w : windows_ms) {
    const Pool* best = nullptr;
    double best_low = 0.0, best_high = 0.0;
    for (const auto& [key, p] : pools) {
      const auto& [pw, high, low] = key;
      if (pw != w || p.max_plr > target_plr) continue;
      if (!best || p.rbgs / p.n < best->rbgs / best->n) {
        best = &p;
        best_low = low;
        best_high = high;
      }
    }
    if (!best) continue;
    std::ostringstream mode;
    mode << "selected/w=" << num(w) << "/high=" << num(best_high);
    rows.push_back({"thresholds", best_low, 0, best->max_plr, best->rbgs / best->n,
                    best->reconf / best->n, mode.str()});
  }
  return rows;
}

}  // namespace urllc

#include "urllc/link_abstraction.hpp"

#include <istream>
#include <sstream>
#include <string>

#include "urllc/grant_scheduler.hpp"

namespace urllc {

AttemptSnrMatrix attempt_matrix_from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows.front().empty())
    throw std::domain_error("attempt matrix needs at least one non-empty row");
  const std::size_t width = rows.front().size();
  AttemptSnrMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    if (rows[j].size() != width) throw std::domain_error("ragged attempt matrix");
    for (std::size_t i = 0; i < width; ++i) {
      if (!(rows[j][i] > 0.0)) throw std::domain_error("attempt SNRs must be positive");
      m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = rows[j][i];
    }
  }
  return m;
}

BlerModel::BlerModel(std::vector<McsEntry> entries) : entries_(std::move(entries)) {
  for (std::size_t m = 0; m < entries_.size(); ++m) {
    const auto& e = entries_[m];
    const std::string who = "MCS " + std::to_string(m) + ": ";
    if (!(e.beta > 0.0)) throw std::domain_error(who + "beta must be positive");
    if (e.bits_per_rbg < 1) throw std::domain_error(who + "bits_per_rbg must be >= 1");
    if (e.curve.empty()) throw std::domain_error(who + "empty BLER curve");
    for (std::size_t i = 0; i < e.curve.size(); ++i) {
      const auto& p = e.curve[i];
      if (!(p.bler >= 0.0 && p.bler <= 1.0)) throw std::domain_error(who + "BLER outside [0, 1]");
      if (i > 0) {
        if (!(p.snr_db > e.curve[i - 1].snr_db))
          throw std::domain_error(who + "curve SNRs must be strictly increasing");
        if (!(p.bler < e.curve[i - 1].bler))
          throw std::domain_error(who + "curve BLER must be strictly decreasing");
      }
    }
  }
}

const McsEntry& BlerModel::entry(int mcs) const {
  if (mcs < 0 || mcs >= mcs_count()) throw std::domain_error("unknown MCS " + std::to_string(mcs));
  return entries_[static_cast<std::size_t>(mcs)];
}

double bler_lookup(const BlerModel& model, int mcs, double snr_eff_linear) {
  const auto& curve = model.entry(mcs).curve;
  if (!(snr_eff_linear > 0.0)) return 1.0;
  const double x = linear_to_db(snr_eff_linear);
  if (x < curve.front().snr_db) return 1.0;
  if (x >= curve.back().snr_db) return curve.back().bler;

  const auto hi = std::upper_bound(curve.begin(), curve.end(), x,
                                   [](double v, const CurvePoint& p) { return v < p.snr_db; });
  const auto lo = hi - 1;
  const double t = (x - lo->snr_db) / (hi->snr_db - lo->snr_db);
  if (lo->bler > 0.0 && hi->bler > 0.0) {
    const double l0 = std::log10(lo->bler);
    const double l1 = std::log10(hi->bler);
    return std::clamp(std::pow(10.0, l0 + t * (l1 - l0)), hi->bler, lo->bler);
  }
  return lo->bler + t * (hi->bler - lo->bler);
}

SyntheticCurveParams default_curve_params() {
  SyntheticCurveParams p;
  p.threshold_db = {-8.0, -4.0, 0.0, 4.5, 10.0, 16.0, 22.0, 28.0};
  p.beta = {1.5, 1.6, 1.8, 4.0, 5.5, 12.0, 20.0, 30.0};
  p.bits_per_rbg = {32, 64, 128, 256, 512, 1024, 2048, 4096};
  p.sigma_db = 1.0;
  p.step_db = 0.25;
  return p;
}

BlerModel synthetic_bler_model(const SyntheticCurveParams& params) {
  const std::size_t n = params.threshold_db.size();
  if (params.beta.size() != n || params.bits_per_rbg.size() != n)
    throw std::domain_error("threshold, beta and bits_per_rbg lists must have equal length");
  if (!(params.sigma_db > 0.0) || !(params.step_db > 0.0))
    throw std::domain_error("sigma and step must be positive");

  std::vector<McsEntry> entries(n);
  const int points = static_cast<int>(std::floor(12.0 * params.sigma_db / params.step_db)) + 1;
  for (std::size_t m = 0; m < n; ++m) {
    auto& e = entries[m];
    e.beta = params.beta[m];
    e.bits_per_rbg = params.bits_per_rbg[m];
    const double start = params.threshold_db[m] - 4.0 * params.sigma_db;
    for (int i = 0; i < points; ++i) {
      const double s = start + i * params.step_db;
      e.curve.push_back({s, 0.5 * std::erfc((s - params.threshold_db[m]) / params.sigma_db)});
    }
  }
  return BlerModel(std::move(entries));
}

BlerModel load_bler_table(std::istream& in, std::span<const double> beta,
                          std::span<const int> bits_per_rbg) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("BLER table is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "mcs,snr_db,bler") throw ConfigError("BLER table header must be 'mcs,snr_db,bler'");

  std::vector<McsEntry> entries;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string a, b, c;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c))
      throw ConfigError("BLER table line " + std::to_string(line_no) + ": expected 3 fields");
    int mcs = 0;
    double snr = 0.0, bler = 0.0;
    try {
      std::size_t pos = 0;
      mcs = std::stoi(a, &pos);
      if (pos != a.size()) throw std::invalid_argument(a);
      snr = std::stod(b);
      bler = std::stod(c);
    } catch (const std::exception&) {
      throw ConfigError("BLER table line " + std::to_string(line_no) + ": unparsable value");
    }
    if (mcs == static_cast<int>(entries.size())) {
      entries.emplace_back();
    } else if (mcs != static_cast<int>(entries.size()) - 1) {
      throw ConfigError("BLER table line " + std::to_string(line_no) +
                        ": MCS indices must be contiguous from 0 and sorted");
    }
    entries.back().curve.push_back({snr, bler});
  }
  if (entries.empty()) throw ConfigError("BLER table has no rows");
  if (beta.size() != entries.size() || bits_per_rbg.size() != entries.size())
    throw ConfigError("BLER table has " + std::to_string(entries.size()) +
                      " MCS curves but beta/bits_per_rbg lists differ in length");
  for (std::size_t m = 0; m < entries.size(); ++m) {
    entries[m].beta = beta[m];
    entries[m].bits_per_rbg = bits_per_rbg[m];
  }
  try {
    return BlerModel(std::move(entries));
  } catch (const std::domain_error& e) {
    throw ConfigError(std::string("BLER table: ") + e.what());
  }
}

int required_rbgs(const BlerModel& model, int mcs, int packet_size_bytes, int m_total) {
  if (packet_size_bytes <= 0) throw std::domain_error("packet size must be positive");
  const int bits = model.entry(mcs).bits_per_rbg;
  const int need = (packet_size_bytes * 8 + bits - 1) / bits;
  if (need > m_total)
    throw ConfigurationInfeasible("MCS " + std::to_string(mcs) + " needs " + std::to_string(need) +
                                  " RBGs, only " + std::to_string(m_total) + " available");
  return need;
}

std::vector<double> cumulative_blers(const AttemptSnrMatrix& attempts, const BlerModel& model,
                                     int mcs) {
  const double beta = model.beta(mcs);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(attempts.rows()));
  Eigen::VectorXd combined = Eigen::VectorXd::Zero(attempts.cols());
  for (Eigen::Index j = 0; j < attempts.rows(); ++j) {
    if (j == 0)
      combined = attempts.row(0).transpose();
    else
      combined += attempts.row(j).transpose();
    out.push_back(bler_lookup(model, mcs, eesm(combined, beta)));
  }
  return out;
}

std::vector<double> estimate_attempt_blers(const RbgSnrVector& srs_snrs, int mcs, int k,
                                           const BlerModel& model, int packet_size_bytes,
                                           Rng& rng) {
  if (k < 1) throw std::domain_error("k must be >= 1");
  const int m_total = static_cast<int>(srs_snrs.size());
  const int m_mcs = required_rbgs(model, mcs, packet_size_bytes, m_total);
  const RbgSnrVector scaled = reallocate_power(srs_snrs, m_total, m_mcs);
  AttemptSnrMatrix attempts(k, m_mcs);
  for (int j = 0; j < k; ++j) {
    const auto sel = select_rbgs(m_total, m_mcs, rng);
    for (int i = 0; i < m_mcs; ++i) attempts(j, i) = scaled(sel.indices[static_cast<std::size_t>(i)]);
  }
  return cumulative_blers(attempts, model, mcs);
}

double plr_for_config(const RbgSnrVector& srs_snrs, const TxConfig& config,
                      const BlerModel& model, int packet_size_bytes, Rng& rng) {
  const auto blers = estimate_attempt_blers(srs_snrs, config.mcs, config.k, model,
                                            packet_size_bytes, rng);
  double plr = 1.0;
  for (double b : blers) plr *= b;
  return plr;
}

}  // namespace urllc

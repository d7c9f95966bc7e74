#pragma once

#include <algorithm>
#include <cmath>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "urllc/channel_model.hpp"
#include "urllc/rng.hpp"
#include "urllc/types.hpp"

namespace urllc {

/// Rows are transmission attempts, columns the attempt's allocated RBGs.
/// Entry (j, m) is the linear SNR seen on the m-th RBG of attempt j.
using AttemptSnrMatrix = Eigen::MatrixXd;

/// Builds an attempt matrix from nested rows. Throws std::domain_error on
/// ragged or empty input or non-positive entries.
AttemptSnrMatrix attempt_matrix_from_rows(const std::vector<std::vector<double>>& rows);

// ---------------------------------------------------------------------------
// EESM
// ---------------------------------------------------------------------------

/// Exponential effective SNR mapping:
///
///   snr_eff = -beta * ln( (1/N) * sum_n exp(-snr_n / beta) )
///
/// evaluated relative to the minimum entry so large SNRs do not underflow.
/// Input and output are linear scale.
template <typename Derived>
typename Derived::Scalar eesm(const Eigen::MatrixBase<Derived>& snrs,
                              typename Derived::Scalar beta) {
  using Scalar = typename Derived::Scalar;
  if (snrs.size() == 0) throw std::domain_error("eesm of an empty SNR list");
  if (!(beta > Scalar(0))) throw std::domain_error("eesm beta must be positive");
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v = snrs.reshaped();
  const Scalar lo = v.minCoeff();
  const Scalar mean = (-(v.array() - lo) / beta).exp().mean();
  return lo - beta * std::log(mean);
}

/// Chase-combining EESM over attempts 1..q (all rows of the matrix):
///
///   snr_eff^q = -beta * ln( (1/|w|) * sum_m exp(-(1/beta) * sum_j snr_{m,j}) )
///
/// With one row this is exactly eesm() of that row.
template <typename Derived>
typename Derived::Scalar eesm_cc(const Eigen::MatrixBase<Derived>& attempts,
                                 typename Derived::Scalar beta) {
  using Scalar = typename Derived::Scalar;
  if (attempts.rows() == 0 || attempts.cols() == 0)
    throw std::domain_error("eesm_cc needs at least one attempt and one RBG");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> combined = attempts.row(0).transpose();
  for (Eigen::Index j = 1; j < attempts.rows(); ++j) combined += attempts.row(j).transpose();
  return eesm(combined, beta);
}

// ---------------------------------------------------------------------------
// BLER model
// ---------------------------------------------------------------------------

struct CurvePoint {
  double snr_db;
  double bler;
};

struct McsEntry {
  double beta = 1.0;     // EESM scaling, linear
  int bits_per_rbg = 1;  // payload bits one RBG carries in one mini-slot
  std::vector<CurvePoint> curve;
};

/// Per-MCS SNR->BLER curves plus EESM beta and RBG capacity.
class BlerModel {
 public:
  BlerModel() = default;

  /// Throws std::domain_error if an entry breaks the invariants: beta > 0,
  /// bits_per_rbg >= 1, curve non-empty with strictly increasing SNR,
  /// strictly decreasing BLER, BLER in [0, 1].
  explicit BlerModel(std::vector<McsEntry> entries);

  int mcs_count() const { return static_cast<int>(entries_.size()); }
  const McsEntry& entry(int mcs) const;
  double beta(int mcs) const { return entry(mcs).beta; }

 private:
  std::vector<McsEntry> entries_;
};

/// Curve lookup at a linear effective SNR. Log-linear interpolation in
/// (snr_db, log10 bler); 1.0 below the first point, the last BLER above the
/// final point. Throws std::domain_error for an unknown MCS.
double bler_lookup(const BlerModel& model, int mcs, double snr_eff_linear);

/// Parameters of the synthetic curve family
///   bler(snr_db) = 0.5 * erfc((snr_db - threshold_db[mcs]) / sigma_db)
/// sampled every step_db from threshold - 4 sigma to threshold + 8 sigma.
struct SyntheticCurveParams {
  std::vector<double> threshold_db;
  std::vector<double> beta;
  std::vector<int> bits_per_rbg;
  double sigma_db = 1.0;
  double step_db = 0.25;
};

SyntheticCurveParams default_curve_params();
BlerModel synthetic_bler_model(const SyntheticCurveParams& params);

/// Reads a `mcs,snr_db,bler` CSV (header required, rows sorted by mcs then
/// snr_db). beta and bits_per_rbg supply the per-MCS scalars; their length
/// must match the number of MCS indices in the table. Throws ConfigError on
/// malformed input.
BlerModel load_bler_table(std::istream& in, std::span<const double> beta,
                          std::span<const int> bits_per_rbg);

// ---------------------------------------------------------------------------
// PLR pipeline
// ---------------------------------------------------------------------------

/// M_MCS = ceil(8 * packet_size / bits_per_rbg). Throws
/// ConfigurationInfeasible when the result exceeds m_total and
/// std::domain_error for a non-positive packet size or unknown MCS.
int required_rbgs(const BlerModel& model, int mcs, int packet_size_bytes, int m_total);

/// Scales every entry by m_total / m_mcs (total power spread over fewer RBGs).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> reallocate_power(
    const Eigen::MatrixBase<Derived>& measured, int m_total, int m_mcs) {
  using Scalar = typename Derived::Scalar;
  if (m_mcs < 1 || m_mcs > m_total) throw std::domain_error("need 1 <= m_mcs <= m_total");
  const Scalar factor = static_cast<Scalar>(m_total) / static_cast<Scalar>(m_mcs);
  return measured.reshaped() * factor;
}

/// BLER(snr_eff^i) for i = 1..rows, where snr_eff^i is the Chase-combined
/// EESM over the first i attempts of an already power-reallocated matrix.
std::vector<double> cumulative_blers(const AttemptSnrMatrix& attempts, const BlerModel& model,
                                     int mcs);

/// Draws k uniformly spaced RBG selections from one SRS measurement,
/// reallocates power, and returns BLER(snr_eff^i) for i = 1..k.
std::vector<double> estimate_attempt_blers(const RbgSnrVector& srs_snrs, int mcs, int k,
                                           const BlerModel& model, int packet_size_bytes,
                                           Rng& rng);

/// PLR_{MCS,K} = BLER_1 * ... * BLER_K for one SRS measurement.
double plr_for_config(const RbgSnrVector& srs_snrs, const TxConfig& config,
                      const BlerModel& model, int packet_size_bytes, Rng& rng);

}  // namespace urllc

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace urllc {

/// Per-RBG SNR in linear scale (one entry per resource block group).
using RbgSnrVector = Eigen::VectorXd;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

// ---------------------------------------------------------------------------
// Pathloss
// ---------------------------------------------------------------------------

enum class HataEnvironment { urban_large_city };

struct PathlossParams {
  double carrier_frequency_hz = 1.5e9;
  double ue_height_m = 1.5;
  double gnb_height_m = 30.0;
  HataEnvironment environment = HataEnvironment::urban_large_city;

  /// Throws std::domain_error when a field is out of range.
  void validate() const;
};

/// Okumura-Hata pathloss in dB. Distances below 1 km use the 1 km value.
/// Throws std::domain_error for distance <= 0.
double path_loss_db(double distance_m, const PathlossParams& params);

/// Distance slope of the Hata formula, in dB per decade of distance.
double hata_distance_slope_db(const PathlossParams& params);

/// SNR_wb = P_tx - PL - (N0 + NF + 10 log10 BW), all in dB.
double wideband_snr_db(double tx_power_dbm, double pathloss_db, double noise_psd_dbm_hz,
                       double bandwidth_hz, double noise_figure_db = 0.0);

// ---------------------------------------------------------------------------
// Tapped-delay-line fading
// ---------------------------------------------------------------------------

struct TapProfile {
  std::vector<double> delays_s;
  std::vector<double> powers_db;
};

/// Extended Pedestrian A power-delay profile (7 taps, 0..410 ns).
TapProfile epa_profile();

/// Evaluation frequencies for a fading channel, with the per-tap delay
/// phasors exp(-j 2 pi f tau) cached as a (frequency x tap) matrix.
class FrequencyGrid {
 public:
  FrequencyGrid(std::span<const double> frequencies_hz, const TapProfile& profile);

  Eigen::Index size() const { return steering_.rows(); }
  const Eigen::MatrixXcd& steering() const { return steering_; }

 private:
  Eigen::MatrixXcd steering_;
};

/// RBG center frequencies (baseband, Hz) for rbg_count groups spanning
/// the band uniformly.
std::vector<double> rbg_center_frequencies(double bandwidth_hz, int rbg_count);

/// Time-evolving Rayleigh tapped-delay line. Each tap is a sum of
/// sinusoids with arrival angles stratified over [0, pi), which gives the
/// Jakes Doppler spectrum. The tap gains are a closed-form function of
/// absolute time, so advancing and sampling is exact and repeatable.
class FadingState {
 public:
  FadingState(const TapProfile& profile, double doppler_hz, std::uint64_t seed,
              int sinusoids_per_tap = 16);

  double time() const { return time_s_; }
  double doppler_frequency() const { return doppler_hz_; }
  const TapProfile& profile() const { return profile_; }

  /// Linear tap powers, normalized to sum to 1.
  const Eigen::ArrayXd& tap_powers() const { return tap_powers_; }

  void advance(double dt_s);
  void set_time(double t_s);

  /// Complex tap amplitudes at the current time.
  Eigen::VectorXcd tap_gains() const;

  /// |H(f)|^2 at every grid frequency.
  Eigen::VectorXd power_response(const FrequencyGrid& grid) const;

 private:
  TapProfile profile_;
  double doppler_hz_;
  double time_s_ = 0.0;
  Eigen::ArrayXd tap_powers_;
  Eigen::ArrayXXd omega_;  // sinusoid x tap, rad/s
  Eigen::ArrayXXd phase_;  // sinusoid x tap, rad
};

struct ChannelSnapshot {
  RbgSnrVector per_rbg_snr;
  double wideband_snr_db = 0.0;
};

/// Advances the fading process by dt and returns the per-RBG linear SNR
/// linear(snr_wb) * |H(f_rbg)|^2. Throws std::domain_error for dt < 0 or an
/// empty grid.
ChannelSnapshot evolve_and_sample(FadingState& state, double dt_s, double wideband_snr_db,
                                  const FrequencyGrid& grid);

/// Convenience overload building the RBG grid for a band of bandwidth_hz.
ChannelSnapshot evolve_and_sample(FadingState& state, double dt_s, double wideband_snr_db,
                                  int rbg_count, double bandwidth_hz);

/// Moves the process to absolute time t_s and samples.
ChannelSnapshot sample_at(FadingState& state, double t_s, double wideband_snr_db,
                          const FrequencyGrid& grid);

}  // namespace urllc

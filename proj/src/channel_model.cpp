#include "urllc/channel_model.hpp"

#include <numbers>
#include <stdexcept>

#include "urllc/rng.hpp"

namespace urllc {

void PathlossParams::validate() const {
  if (!(carrier_frequency_hz > 0.0)) throw std::domain_error("carrier frequency must be positive");
  if (!(ue_height_m > 0.0) || !(gnb_height_m > 0.0))
    throw std::domain_error("antenna heights must be positive");
  if (!(ue_height_m < gnb_height_m)) throw std::domain_error("UE must be lower than the gNB");
}

namespace {

// Mobile antenna correction for large cities, f >= 300 MHz.
double mobile_height_correction_db(const PathlossParams& p) {
  const double x = std::log10(11.75 * p.ue_height_m);
  return 3.2 * x * x - 4.97;
}

}  // namespace

double hata_distance_slope_db(const PathlossParams& params) {
  return 44.9 - 6.55 * std::log10(params.gnb_height_m);
}

double path_loss_db(double distance_m, const PathlossParams& params) {
  if (!(distance_m > 0.0)) throw std::domain_error("distance must be positive");
  params.validate();
  const double d_km = std::max(distance_m, 1000.0) / 1000.0;
  const double f_mhz = params.carrier_frequency_hz / 1e6;
  return 69.55 + 26.16 * std::log10(f_mhz) - 13.82 * std::log10(params.gnb_height_m) -
         mobile_height_correction_db(params) + hata_distance_slope_db(params) * std::log10(d_km);
}

double wideband_snr_db(double tx_power_dbm, double pathloss_db, double noise_psd_dbm_hz,
                       double bandwidth_hz, double noise_figure_db) {
  if (!(bandwidth_hz > 0.0)) throw std::domain_error("bandwidth must be positive");
  const double noise_dbm = noise_psd_dbm_hz + noise_figure_db + 10.0 * std::log10(bandwidth_hz);
  return tx_power_dbm - pathloss_db - noise_dbm;
}

TapProfile epa_profile() {
  return {{0.0, 30e-9, 70e-9, 90e-9, 110e-9, 190e-9, 410e-9},
          {0.0, -1.0, -2.0, -3.0, -8.0, -17.2, -20.8}};
}

FrequencyGrid::FrequencyGrid(std::span<const double> frequencies_hz, const TapProfile& profile)
    : steering_(static_cast<Eigen::Index>(frequencies_hz.size()),
                static_cast<Eigen::Index>(profile.delays_s.size())) {
  for (Eigen::Index r = 0; r < steering_.rows(); ++r)
    for (Eigen::Index l = 0; l < steering_.cols(); ++l)
      steering_(r, l) = std::polar(
          1.0, -2.0 * std::numbers::pi * frequencies_hz[static_cast<std::size_t>(r)] *
                   profile.delays_s[static_cast<std::size_t>(l)]);
}

std::vector<double> rbg_center_frequencies(double bandwidth_hz, int rbg_count) {
  if (rbg_count <= 0) throw std::domain_error("rbg_count must be positive");
  std::vector<double> f(static_cast<std::size_t>(rbg_count));
  const double width = bandwidth_hz / rbg_count;
  for (int r = 0; r < rbg_count; ++r) f[static_cast<std::size_t>(r)] = -0.5 * bandwidth_hz + (r + 0.5) * width;
  return f;
}

FadingState::FadingState(const TapProfile& profile, double doppler_hz, std::uint64_t seed,
                         int sinusoids_per_tap)
    : profile_(profile), doppler_hz_(doppler_hz) {
  if (profile.delays_s.empty() || profile.delays_s.size() != profile.powers_db.size())
    throw std::domain_error("tap profile must have matching, non-empty delays and powers");
  if (!(doppler_hz >= 0.0)) throw std::domain_error("doppler frequency must be non-negative");
  if (sinusoids_per_tap < 1) throw std::domain_error("need at least one sinusoid per tap");

  const auto taps = static_cast<Eigen::Index>(profile.delays_s.size());
  tap_powers_.resize(taps);
  for (Eigen::Index l = 0; l < taps; ++l)
    tap_powers_(l) = db_to_linear(profile.powers_db[static_cast<std::size_t>(l)]);
  tap_powers_ /= tap_powers_.sum();

  const Eigen::Index n = sinusoids_per_tap;
  omega_.resize(n, taps);
  phase_.resize(n, taps);
  Rng rng(seed);
  const double pi = std::numbers::pi;
  for (Eigen::Index l = 0; l < taps; ++l) {
    for (Eigen::Index i = 0; i < n; ++i) {
      // Jitter within the middle half of each stratum keeps Doppler
      // frequencies distinct, so the time-average power converges to 1.
      const double alpha = pi * (static_cast<double>(i) + 0.25 + 0.5 * uniform01(rng)) / static_cast<double>(n);
      omega_(i, l) = 2.0 * pi * doppler_hz * std::cos(alpha);
      phase_(i, l) = 2.0 * pi * uniform01(rng);
    }
  }
}

void FadingState::advance(double dt_s) {
  if (!(dt_s >= 0.0)) throw std::domain_error("dt must be non-negative");
  time_s_ += dt_s;
}

void FadingState::set_time(double t_s) { time_s_ = t_s; }

Eigen::VectorXcd FadingState::tap_gains() const {
  const Eigen::ArrayXXd arg = omega_ * time_s_ + phase_;
  const Eigen::ArrayXd amp = (tap_powers_ / static_cast<double>(omega_.rows())).sqrt();
  Eigen::VectorXcd g(tap_powers_.size());
  const Eigen::ArrayXd re = arg.cos().colwise().sum().transpose();
  const Eigen::ArrayXd im = arg.sin().colwise().sum().transpose();
  g.real() = (re * amp).matrix();
  g.imag() = (im * amp).matrix();
  return g;
}

Eigen::VectorXd FadingState::power_response(const FrequencyGrid& grid) const {
  return (grid.steering() * tap_gains()).cwiseAbs2();
}

ChannelSnapshot sample_at(FadingState& state, double t_s, double wideband_snr_db,
                          const FrequencyGrid& grid) {
  if (grid.size() == 0) throw std::domain_error("rbg_count must be positive");
  state.set_time(t_s);
  return {db_to_linear(wideband_snr_db) * state.power_response(grid), wideband_snr_db};
}

ChannelSnapshot evolve_and_sample(FadingState& state, double dt_s, double wideband_snr_db,
                                  const FrequencyGrid& grid) {
  if (grid.size() == 0) throw std::domain_error("rbg_count must be positive");
  state.advance(dt_s);
  return {db_to_linear(wideband_snr_db) * state.power_response(grid), wideband_snr_db};
}

ChannelSnapshot evolve_and_sample(FadingState& state, double dt_s, double wideband_snr_db,
                                  int rbg_count, double bandwidth_hz) {
  if (rbg_count <= 0) throw std::domain_error("rbg_count must be positive");
  const auto f = rbg_center_frequencies(bandwidth_hz, rbg_count);
  return evolve_and_sample(state, dt_s, wideband_snr_db, FrequencyGrid(f, state.profile()));
}

}  // namespace urllc

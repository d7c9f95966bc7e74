#include <cmath>
#include <vector>

#include "doctest.h"
#include "urllc/channel_model.hpp"

using namespace urllc;

namespace {

// Reference Okumura-Hata values, urban large city, evaluated by hand:
//   a(1.5 m) = 3.2 (log10 17.625)^2 - 4.97        = -0.000919 dB
//   L(1 km)  = 69.55 + 26.16 log10 1500 - 13.82 log10 30 - a(1.5)
//            = 69.55 + 83.0869 - 20.4138 + 0.0009  = 132.22365 dB
//   slope    = 44.9 - 6.55 log10 30                = 35.224856 dB/decade
constexpr double kHata1km = 132.22365;
constexpr double kHataSlope = 35.224856;

double sample_mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double autocorrelation(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = sample_mean(a), mb = sample_mean(b);
  double num = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  return num / std::sqrt(va * vb);
}

}  // namespace

TEST_CASE("path_loss matches the hand-evaluated Hata formula") {
  PathlossParams p;
  CHECK(std::abs(path_loss_db(1000.0, p) - kHata1km) < 0.05);
  CHECK(hata_distance_slope_db(p) == doctest::Approx(kHataSlope).epsilon(1e-6));
  CHECK(path_loss_db(10000.0, p) == doctest::Approx(kHata1km + kHataSlope).epsilon(1e-6));
}

TEST_CASE("path_loss is monotone, clamps below 1 km and rejects bad input") {
  PathlossParams p;
  CHECK(path_loss_db(2000.0, p) > path_loss_db(1000.0, p));
  CHECK(path_loss_db(1.0, p) == path_loss_db(1000.0, p));
  CHECK(path_loss_db(500.0, p) == path_loss_db(1000.0, p));
  CHECK(path_loss_db(1234.5, p) == path_loss_db(1234.5, p));
  CHECK_THROWS_AS(path_loss_db(0.0, p), std::domain_error);
  CHECK_THROWS_AS(path_loss_db(-5.0, p), std::domain_error);

  PathlossParams inverted;
  inverted.ue_height_m = 40.0;
  CHECK_THROWS_AS(path_loss_db(1000.0, inverted), std::domain_error);
  PathlossParams no_freq;
  no_freq.carrier_frequency_hz = 0.0;
  CHECK_THROWS_AS(path_loss_db(1000.0, no_freq), std::domain_error);
}

TEST_CASE("wideband_snr dB arithmetic") {
  CHECK(wideband_snr_db(23.0, 120.0, -174.0, 100e6) == doctest::Approx(-3.0));
  CHECK(wideband_snr_db(23.0, 117.0, -174.0, 100e6) == doctest::Approx(0.0));
  CHECK(wideband_snr_db(23.0, 130.0, -174.0, 100e6) ==
        doctest::Approx(wideband_snr_db(23.0, 120.0, -174.0, 100e6) - 10.0));
  CHECK(wideband_snr_db(23.0, 117.0, -174.0, 100e6, 5.0) == doctest::Approx(-5.0));
  CHECK_THROWS_AS(wideband_snr_db(23.0, 117.0, -174.0, 0.0), std::domain_error);
}

TEST_CASE("EPA profile and tap power normalization") {
  const auto epa = epa_profile();
  REQUIRE(epa.delays_s.size() == 7);
  CHECK(epa.delays_s.back() == doctest::Approx(410e-9));
  CHECK(epa.powers_db.back() == doctest::Approx(-20.8));
  FadingState st(epa, 5.0, 42);
  CHECK(std::abs(st.tap_powers().sum() - 1.0) < 1e-9);
}

TEST_CASE("rbg center frequencies span the band") {
  const auto f = rbg_center_frequencies(100e6, 16);
  REQUIRE(f.size() == 16);
  CHECK(f.front() == doctest::Approx(-50e6 + 3.125e6));
  CHECK(f.back() == doctest::Approx(50e6 - 3.125e6));
  CHECK(f[1] - f[0] == doctest::Approx(6.25e6));
}

TEST_CASE("evolve_and_sample basic contracts") {
  FadingState st(epa_profile(), 5.0, 7);
  const auto a = evolve_and_sample(st, 0.0, 3.0, 16, 100e6);
  const auto b = evolve_and_sample(st, 0.0, 3.0, 16, 100e6);
  CHECK(a.per_rbg_snr == b.per_rbg_snr);
  CHECK(a.per_rbg_snr.size() == 16);
  CHECK((a.per_rbg_snr.array() > 0.0).all());
  CHECK(a.wideband_snr_db == 3.0);

  CHECK_THROWS_AS(evolve_and_sample(st, 0.0, 3.0, 0, 100e6), std::domain_error);
  CHECK_THROWS_AS(evolve_and_sample(st, -1e-3, 3.0, 16, 100e6), std::domain_error);

  // Identical center frequencies see the identical response.
  const std::vector<double> freqs{1e6, 1e6, -20e6};
  const FrequencyGrid grid(freqs, st.profile());
  const auto c = evolve_and_sample(st, 0.013, 0.0, grid);
  CHECK(c.per_rbg_snr(0) == c.per_rbg_snr(1));
}

TEST_CASE("fading is frequency selective and repeatable per seed") {
  FadingState s1(epa_profile(), 5.0, 99);
  FadingState s2(epa_profile(), 5.0, 99);
  const auto a = evolve_and_sample(s1, 0.25, 0.0, 16, 100e6);
  const auto b = evolve_and_sample(s2, 0.25, 0.0, 16, 100e6);
  CHECK(a.per_rbg_snr == b.per_rbg_snr);
  CHECK(a.per_rbg_snr.maxCoeff() / a.per_rbg_snr.minCoeff() > 1.01);

  FadingState s3(epa_profile(), 5.0, 100);
  const auto c = evolve_and_sample(s3, 0.25, 0.0, 16, 100e6);
  CHECK(c.per_rbg_snr != a.per_rbg_snr);
}

TEST_CASE("long-run mean SNR equals the wideband SNR") {
  // Rayleigh power normalized to unit mean: the time average of the linear
  // per-RBG SNR over 1e5 samples converges to linear(SNR_wb).
  const double doppler = 5.0;
  const double dt = 0.5 / doppler;
  const double snr_wb_db = 4.0;
  FadingState st(epa_profile(), doppler, 2024);
  const auto freqs = rbg_center_frequencies(100e6, 16);
  const FrequencyGrid grid(freqs, st.profile());

  Eigen::VectorXd sum = Eigen::VectorXd::Zero(16);
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += evolve_and_sample(st, dt, snr_wb_db, grid).per_rbg_snr;
  const Eigen::VectorXd mean = sum / n;
  const double target = db_to_linear(snr_wb_db);
  for (Eigen::Index r = 0; r < 16; ++r) CHECK(std::abs(mean(r) / target - 1.0) < 0.02);
}

TEST_CASE("fading power decorrelates with lag") {
  const double doppler = 5.0;
  FadingState st(epa_profile(), doppler, 5);
  const std::vector<double> f0{0.0};
  const FrequencyGrid grid(f0, st.profile());

  const auto series = [&](double lag, int n, double spacing) {
    std::pair<std::vector<double>, std::vector<double>> out;
    for (int i = 0; i < n; ++i) {
      const double t = i * spacing;
      st.set_time(t);
      out.first.push_back(st.power_response(grid)(0));
      st.set_time(t + lag);
      out.second.push_back(st.power_response(grid)(0));
    }
    return out;
  };

  const auto [a0, b0] = series(0.01 / doppler, 20000, 0.37 / doppler);
  const auto [a1, b1] = series(10.0 / doppler, 20000, 0.37 / doppler);
  const double near = autocorrelation(a0, b0);
  const double far = autocorrelation(a1, b1);
  CHECK(near > 0.95);
  CHECK(far < near);
  CHECK(std::abs(far) < 0.2);
}

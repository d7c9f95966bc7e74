#include "urllc/scenario_io.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace urllc {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || p != end) throw ConfigError(key + ": not a number: '" + v + "'");
  return x;
}

long long to_int(const std::string& key, const std::string& v) {
  long long x = 0;
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || p != end) throw ConfigError(key + ": not an integer: '" + v + "'");
  return x;
}

int to_int32(const std::string& key, const std::string& v) {
  const long long x = to_int(key, v);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
    throw ConfigError(key + ": out of range");
  return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true/false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

template <typename T, typename F>
std::vector<T> to_list(const std::string& key, const std::string& v, F conv) {
  std::vector<T> out;
  for (const auto& s : split_list(v)) out.push_back(conv(key, s));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

template <typename T>
std::string join(const std::vector<T>& xs) {
  std::ostringstream s;
  s << std::setprecision(17);
  for (std::size_t i = 0; i < xs.size(); ++i) s << (i ? "," : "") << xs[i];
  return s.str();
}

}  // namespace

ScenarioConfig parse_scenario(std::istream& in, const std::filesystem::path& base_dir) {
  ScenarioConfig sc;
  std::optional<int> fixed_mcs, fixed_k;

  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"bandwidth_hz", [&](auto& k, auto& v) { sc.bandwidth_hz = to_double(k, v); }},
      {"rbg_count", [&](auto& k, auto& v) { sc.rbg_count = to_int32(k, v); }},
      {"slot_length_s", [&](auto& k, auto& v) { sc.slot_length_s = to_double(k, v); }},
      {"packet_size_bytes", [&](auto& k, auto& v) { sc.packet_size_bytes = to_int32(k, v); }},
      {"packet_period_s", [&](auto& k, auto& v) { sc.packet_period_s = to_double(k, v); }},
      {"srs_period_s", [&](auto& k, auto& v) { sc.srs_period_s = to_double(k, v); }},
      {"delay_budget_slots", [&](auto& k, auto& v) { sc.delay_budget_slots = to_int32(k, v); }},
      {"latency_requirement_s", [&](auto& k, auto& v) { sc.latency_requirement_s = to_double(k, v); }},
      {"tx_power_dbm", [&](auto& k, auto& v) { sc.tx_power_dbm = to_double(k, v); }},
      {"k_max", [&](auto& k, auto& v) { sc.k_max = to_int32(k, v); }},
      {"carrier_frequency_hz", [&](auto& k, auto& v) { sc.pathloss.carrier_frequency_hz = to_double(k, v); }},
      {"ue_height_m", [&](auto& k, auto& v) { sc.pathloss.ue_height_m = to_double(k, v); }},
      {"gnb_height_m", [&](auto& k, auto& v) { sc.pathloss.gnb_height_m = to_double(k, v); }},
      {"environment",
       [&](auto& k, auto& v) {
         if (v != "urban-large-city") throw ConfigError(k + ": only 'urban-large-city' is supported");
         sc.pathloss.environment = HataEnvironment::urban_large_city;
       }},
      {"noise_psd_dbm_hz", [&](auto& k, auto& v) { sc.noise_psd_dbm_hz = to_double(k, v); }},
      {"noise_figure_db", [&](auto& k, auto& v) { sc.noise_figure_db = to_double(k, v); }},
      {"distance_m", [&](auto& k, auto& v) { sc.distance_m = to_double(k, v); }},
      {"wideband_snr_db", [&](auto& k, auto& v) { sc.wideband_snr_db = to_double(k, v); }},
      {"fading", [&](auto& k, auto& v) { sc.fading = to_bool(k, v); }},
      {"doppler_hz", [&](auto& k, auto& v) { sc.doppler_hz = to_double(k, v); }},
      {"sinusoids_per_tap", [&](auto& k, auto& v) { sc.sinusoids_per_tap = to_int32(k, v); }},
      {"window_ms", [&](auto& k, auto& v) { sc.window_ms = to_double(k, v); }},
      {"plr_low", [&](auto& k, auto& v) { sc.plr_low = to_double(k, v); }},
      {"plr_high", [&](auto& k, auto& v) { sc.plr_high = to_double(k, v); }},
      {"fixed_mcs", [&](auto& k, auto& v) { fixed_mcs = to_int32(k, v); }},
      {"fixed_k", [&](auto& k, auto& v) { fixed_k = to_int32(k, v); }},
      {"duration_s", [&](auto& k, auto& v) { sc.duration_s = to_double(k, v); }},
      {"seed",
       [&](auto& k, auto& v) {
         std::uint64_t s = 0;
         const auto* end = v.data() + v.size();
         const auto [p, ec] = std::from_chars(v.data(), end, s);
         if (ec != std::errc() || p != end)
           throw ConfigError(k + ": expected a non-negative integer, got '" + v + "'");
         sc.seed = s;
       }},
      {"decode_mode",
       [&](auto& k, auto& v) {
         if (v == "independent")
           sc.decode_mode = DecodeMode::independent;
         else if (v == "nested")
           sc.decode_mode = DecodeMode::nested;
         else
           throw ConfigError(k + ": expected 'independent' or 'nested'");
       }},
      {"curve_threshold_db",
       [&](auto& k, auto& v) { sc.curves.threshold_db = to_list<double>(k, v, to_double); }},
      {"curve_sigma_db", [&](auto& k, auto& v) { sc.curves.sigma_db = to_double(k, v); }},
      {"curve_step_db", [&](auto& k, auto& v) { sc.curves.step_db = to_double(k, v); }},
      {"mcs_beta", [&](auto& k, auto& v) { sc.curves.beta = to_list<double>(k, v, to_double); }},
      {"mcs_bits_per_rbg",
       [&](auto& k, auto& v) { sc.curves.bits_per_rbg = to_list<int>(k, v, to_int32); }},
      {"bler_table",
       [&](auto&, auto& v) {
         std::filesystem::path p(v);
         if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
         sc.bler_table_path = p.string();
       }},
  };

  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end())
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (!seen.insert(key).second)
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    if (value.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty value for '" + key + "'");
    it->second(key, value);
  }

  if (fixed_mcs.has_value() != fixed_k.has_value())
    throw ConfigError("fixed_mcs and fixed_k must be given together");
  if (fixed_mcs) sc.fixed_config = TxConfig{*fixed_mcs, *fixed_k};
  return sc;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_scenario(in, path.parent_path());
}

void write_scenario(std::ostream& out, const ScenarioConfig& sc) {
  const auto old_precision = out.precision(17);
  out << "bandwidth_hz = " << sc.bandwidth_hz << '\n'
      << "rbg_count = " << sc.rbg_count << '\n'
      << "slot_length_s = " << sc.slot_length_s << '\n'
      << "packet_size_bytes = " << sc.packet_size_bytes << '\n'
      << "packet_period_s = " << sc.packet_period_s << '\n'
      << "srs_period_s = " << sc.srs_period_s << '\n'
      << "delay_budget_slots = " << sc.delay_budget_slots << '\n'
      << "latency_requirement_s = " << sc.latency_requirement_s << '\n'
      << "tx_power_dbm = " << sc.tx_power_dbm << '\n'
      << "k_max = " << sc.k_max << '\n'
      << "carrier_frequency_hz = " << sc.pathloss.carrier_frequency_hz << '\n'
      << "ue_height_m = " << sc.pathloss.ue_height_m << '\n'
      << "gnb_height_m = " << sc.pathloss.gnb_height_m << '\n'
      << "environment = urban-large-city\n"
      << "noise_psd_dbm_hz = " << sc.noise_psd_dbm_hz << '\n'
      << "noise_figure_db = " << sc.noise_figure_db << '\n';
  if (sc.distance_m) out << "distance_m = " << *sc.distance_m << '\n';
  out << "wideband_snr_db = " << sc.wideband_snr_db << '\n'
      << "fading = " << (sc.fading ? "true" : "false") << '\n'
      << "doppler_hz = " << sc.doppler_hz << '\n'
      << "sinusoids_per_tap = " << sc.sinusoids_per_tap << '\n'
      << "window_ms = " << sc.window_ms << '\n'
      << "plr_low = " << sc.plr_low << '\n'
      << "plr_high = " << sc.plr_high << '\n';
  if (sc.fixed_config)
    out << "fixed_mcs = " << sc.fixed_config->mcs << '\n' << "fixed_k = " << sc.fixed_config->k << '\n';
  out << "duration_s = " << sc.duration_s << '\n'
      << "seed = " << sc.seed << '\n'
      << "decode_mode = " << (sc.decode_mode == DecodeMode::nested ? "nested" : "independent") << '\n'
      << "curve_threshold_db = " << join(sc.curves.threshold_db) << '\n'
      << "curve_sigma_db = " << sc.curves.sigma_db << '\n'
      << "curve_step_db = " << sc.curves.step_db << '\n'
      << "mcs_beta = " << join(sc.curves.beta) << '\n'
      << "mcs_bits_per_rbg = " << join(sc.curves.bits_per_rbg) << '\n';
  if (!sc.bler_table_path.empty()) out << "bler_table = " << sc.bler_table_path << '\n';
  out.precision(old_precision);
}

}  // namespace urllc

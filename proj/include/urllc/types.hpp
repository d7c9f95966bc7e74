#pragma once

#include <compare>
#include <stdexcept>
#include <string>

namespace urllc {

/// A candidate uplink transmission configuration {MCS index, repetitions K}.
struct TxConfig {
  int mcs = 0;
  int k = 1;

  friend auto operator<=>(const TxConfig&, const TxConfig&) = default;
};

inline std::string to_string(const TxConfig& c) {
  return "mcs" + std::to_string(c.mcs) + ":k" + std::to_string(c.k);
}

/// The requested MCS cannot carry the packet within the available RBGs.
class ConfigurationInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A scenario or config file is malformed (bad key, unparsable value,
/// value out of range).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace urllc

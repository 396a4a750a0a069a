#pragma once

// INI-style configuration:
//
//   [emitter]  gamma1_wg gamma2_wg gamma1_loss gamma2_loss gamma_dephase
//              delta_h_ghz | delta_h  kappa_flip t2_star_ns beta_factor
//              split1_r split2_r cyclicity kappa_g
//   [pulse]    sigma_o sigma_e detuning t_pulse_ns n_bar
//   [rotations] t_pi_ns t_pi2_ns
//   [readout]  fidelity_r
//   [channels] pure_dephasing spin_flip driving_dephasing readout_error
//              flip_noise = photonic_input | heralded_trace
//   [gate]     theta_p
//
// delta_h_ghz is multiplied by 2 pi here and nowhere else.

#include "tbgate/core.hpp"
#include "tbgate/protocol.hpp"

#include <map>
#include <stdexcept>
#include <string>

namespace tbgate {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, std::string field, const std::string& message);

  int line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  int line_;
  std::string field_;
};

struct Config {
  EmitterParams emitter;
  PulseParams pulse;
  ChannelConfig channels;
  double theta_p = 0.0;
};

/// Parses and validates. `source` names the input in diagnostics.
Config parse_config(const std::string& text, const std::string& source = "<config>");
Config load_config(const std::string& path);

/// Text that parse_config maps back to an identical Config.
std::string serialize_config(const Config& config);

/// Recognized sweepable field paths, e.g. "emitter.kappa_flip".
bool set_config_field(Config& config, const std::string& path, double value);
const std::map<std::string, std::string>& sweepable_fields();

}  // namespace tbgate

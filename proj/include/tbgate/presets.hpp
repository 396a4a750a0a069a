#pragma once

// Parameter sets for the measured device and for an ideal emitter.

#include "tbgate/config.hpp"

namespace tbgate::presets {

/// Gamma = 2.48/ns with gamma_1 = gamma_2 = 0.05/ns, the remaining waveguide
/// rate split 14.7 : 1 between the vertical and diagonal transitions.
inline EmitterParams measured_emitter() {
  EmitterParams e;
  const double cyclicity = 14.7;
  const double waveguide = 2.48 - 0.1;
  e.gamma1_wg = waveguide * cyclicity / (cyclicity + 1.0);
  e.gamma2_wg = waveguide / (cyclicity + 1.0);
  e.gamma1_loss = 0.05;
  e.gamma2_loss = 0.05;
  e.gamma_dephase = 0.092;
  e.delta_h = kTwoPi * 7.3;
  e.kappa_flip = 0.021;
  e.t2_star = 23.2;
  e.beta_factor = 0.95;
  e.cyclicity = cyclicity;
  return e;
}

inline PulseParams measured_pulse() { return PulseParams::from_duration(2.0, 0.3, 0.0, 0.0732); }

inline ChannelConfig measured_channels() {
  ChannelConfig c;
  c.readout_fidelity = 0.966;
  c.half_pi = RotationPulse::y(kPi / 2.0, 3.5);
  c.pi = RotationPulse::y(kPi, 7.0);
  return c;
}

inline Config measured() { return Config{measured_emitter(), measured_pulse(), measured_channels(), 0.0}; }

/// Lossless, dephasing-free emitter with a splitting far above the linewidth,
/// no spin errors and perfect readout.
inline Config ideal() {
  Config c;
  c.emitter.gamma1_wg = 2.48;
  c.emitter.delta_h = kTwoPi * 1e6;
  c.emitter.t2_star = 1e9;
  c.pulse = PulseParams::from_duration(2.0);
  c.channels.readout_fidelity = 1.0;
  return c;
}

}  // namespace tbgate::presets

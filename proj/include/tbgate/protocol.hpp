#pragma once

// Gate sequence R_y(pi/2) -> S_e -> R_y(pi) -> S_l on the joint spin-photon
// state, with the error channels applied in closed form.

#include "tbgate/core.hpp"
#include "tbgate/scattering.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tbgate {

/// How the depolarizing part of an imperfect rotation is weighted inside the
/// joint pipeline. `photonic_input` adds (p/2) rho_p (x) I with rho_p the
/// photonic input state, as the closed-form budget does; it is not trace
/// preserving once a bin has been heralded. `heralded_trace` weights each
/// photonic block by its own trace and preserves the trace.
enum class FlipNoiseWeighting { photonic_input, heralded_trace };

struct ChannelConfig {
  bool enable_pure_dephasing = true;
  bool enable_spin_flip = true;
  bool enable_driving_dephasing = true;
  bool enable_readout_error = true;
  double readout_fidelity = 1.0;
  RotationPulse half_pi = RotationPulse::y(kPi / 2.0, 3.5);
  RotationPulse pi = RotationPulse::y(kPi, 7.0);
  FlipNoiseWeighting flip_noise = FlipNoiseWeighting::photonic_input;
  /// Also propagate the transmitted-port branch.
  bool keep_transmitted = false;
  /// Use these amplitudes at every frequency instead of the emitter response.
  std::optional<ScatterAmplitudes> fixed_amplitudes;
  /// Extra detuning seen by the late bin only (debug: unequal early/late amps).
  double late_bin_mismatch = 0.0;
  /// Fill GateOutcome::budget with per-channel multipliers.
  bool compute_budget = false;
  SpectralOptions spectral{};

  static ChannelConfig all_off();
};

void validate(const ChannelConfig& c);

struct BudgetEntry {
  std::string channel;
  double multiplier = 1.0;
};

struct GateOutcome {
  JointDensity rho_heralded;
  double success_prob = 0.0;
  double fidelity = 0.0;  // phi_minus overlap of the normalized heralded state
  std::vector<BudgetEntry> budget;
  std::optional<JointDensity> rho_transmitted;
  std::vector<std::string> warnings;
  double error_bound = 0.0;
};

// ---------------------------------------------------------------------------
// Rotations

SpinDensity ideal_rotation(const SpinDensity& spin, const RotationPulse& pulse);
/// Rotation of the spin factor of a joint state.
JointDensity ideal_rotation(const JointDensity& joint, const RotationPulse& pulse);

struct RotationFidelity {
  double flip_prob = 0.0;           // p = 1 - exp(-kappa T_r)
  double coherent_fidelity = 1.0;   // F = 1 - (2/pi^2)(T_r/T2*)^2
  double total = 1.0;               // (1 - p) F + p/2
};

/// Throws ValidationError when T_r/T2* > pi/sqrt2.
RotationFidelity rotation_fidelity(const RotationPulse& pulse, const EmitterParams& params);

/// (1-p)(F R rho R^dag + (1-F) rho_err) + (p/2) Tr(rho) I. rho_err is
/// Tr(rho)|-><-| for a pi/2 pulse and rho itself for a pi pulse.
SpinDensity depolarizing_rotation(const SpinDensity& spin, const RotationPulse& pulse,
                                  const EmitterParams& params);
/// Joint-state version; `photonic_input` is the 2x2 time-bin input state used
/// by the photonic_input weighting.
JointDensity depolarizing_rotation(const JointDensity& joint, const RotationPulse& pulse,
                                   const EmitterParams& params, FlipNoiseWeighting weighting,
                                   const Matrix2c& photonic_input);

// ---------------------------------------------------------------------------
// Scattering and dephasing

/// Multiplies the chosen bin's spin-up amplitude by amps.r1 and its spin-down
/// amplitude by amps.r1_off, keeping only the heralded reflected branch.
/// Throws ValidationError if the bin has already scattered.
JointDensity scatter_timebin(const JointDensity& joint, TimeBin bin, const ScatterAmplitudes& amps);
/// Same with the transmitted coefficients t1 / t1_off.
JointDensity transmit_timebin(const JointDensity& joint, TimeBin bin,
                              const ScatterAmplitudes& amps);

/// Spin coherences (within every photonic block) scaled by 1 - p_d.
JointDensity phase_damping(const JointDensity& joint, double p_d);
SpinDensity phase_damping(const SpinDensity& spin, double p_d);

/// P_omega1 + P_omega2 = 1 - 2((g1+g2)/Gamma)(1 - 1/(C+1) - g1/Gamma), Gamma = gamma_total_rad.
double driving_scatter_sum(const EmitterParams& params);
/// p_d = 1 - exp(-n_bar (P_omega1 + P_omega2)).
double driving_dephasing_prob(const PulseParams& pulse, const EmitterParams& params);

/// Incoherent reflection probability after a dephasing-induced jump,
/// (2gd/G)(1 - 1/(C+1) - g1/G)[(1 - 1/(C+1))(1 - 2gd/G) - g1/G] with G = gamma_total_deph.
double pure_dephasing_probability(const EmitterParams& params);
/// Jump probability for a pulse whose carrier is detuned by pulse.detuning:
/// the resonant value scaled by the ratio of the Lorentzian overlaps at the
/// given detuning and at zero detuning.
double pure_dephasing_probability(const EmitterParams& params, const PulseParams& pulse,
                                  const SpectralOptions& opts = {});

/// Incoherent terms added to the final heralded state: |alpha|^2 P/2 on
/// e-down (the early injection after the echo pulse) and |beta|^2 P/2 on l-up.
Matrix4c pure_dephasing_injection(const EmitterParams& params, cplx alpha, cplx beta);

JointDensity readout_error(const JointDensity& joint, double f_r);
SpinDensity readout_error(const SpinDensity& spin, double f_r);

// ---------------------------------------------------------------------------
// Spin echo

struct EchoFactors {
  cplx up;
  cplx down;
};

/// Phase factors of the echo operator for a static detuning delta_g.
/// Requires t0 <= t_pi <= t_r.
EchoFactors spin_echo_factor(double delta_g, double t0, double t_pi, double t_r);

/// Fringe contrast |E[lambda_up / lambda_down]| for a Gaussian delta_g of
/// standard deviation sigma_g and timing error dt = 2 t_pi - t_r - t0.
double echo_contrast(double sigma_g, double dt);

// ---------------------------------------------------------------------------

GateOutcome run_gate(const EmitterParams& emitter, const PulseParams& pulse,
                     const ChannelConfig& channels, double theta_p = 0.0);

/// Amplitudes of a perfect mirror for the spin-up state: r1 = -1, r1_off = 0.
ScatterAmplitudes ideal_amplitudes();

}  // namespace tbgate

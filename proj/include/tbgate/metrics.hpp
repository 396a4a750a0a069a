#pragma once

// Fidelities, contrasts, success probability, visibility and concurrence.

#include "tbgate/core.hpp"
#include "tbgate/protocol.hpp"
#include "tbgate/scattering.hpp"

#include <cstdint>
#include <optional>

namespace tbgate {

/// Correlation contrasts <sigma_i (x) sigma_i>. The spin Paulis are taken in
/// the (down, up) ordering, so the ideal phi-minus state gives (-1, +1, +1).
struct Contrasts {
  double m_x = 0.0;
  double m_y = 0.0;
  double m_z = 0.0;

  double p_z() const { return 0.5 * (1.0 + m_z); }
  static Contrasts from_pz(double p_z, double m_x, double m_y) {
    return Contrasts{m_x, m_y, 2.0 * p_z - 1.0};
  }
};

/// Overlap with the target Bell state, normalized by the trace.
double bell_fidelity(const JointDensity& rho, BellTarget target = BellTarget::phi_minus,
                     double theta_p = 0.0);

/// i_res/(i_res + i_off), or with pure dephasing
/// (i_res + (|a|^4 + |b|^4) P)/(i_res + i_off + P).
double conditional_fidelity_formula(const OverlapIntegrals& overlaps, double pure_dephasing_prob = 0.0,
                                    double alpha_sq = 0.5);
/// 1 - gd/G - G^2/(4 dh^2), G = gamma_total_rad.
double conditional_fidelity_perturbative(const EmitterParams& params);
/// 1 - (5pi/4)(kappa/Omega) - (3/2)/(Omega T2*)^2 with Omega = pi / T_pi.
double spin_flip_fidelity_perturbative(const EmitterParams& params, const RotationPulse& pi_pulse);
/// (1 + (1 - p_d)^2)/2.
double driving_dephasing_fidelity(const PulseParams& pulse, const EmitterParams& params);

/// Contrasts of the normalized state after removing the photonic phase theta_p.
Contrasts contrasts_from_state(const JointDensity& rho, double theta_p = 0.0);
/// P_z/2 + (M_y - M_x)/4.
double fidelity_from_contrasts(const Contrasts& c);

/// Approximate closed form for the heralding probability with G = gamma_total_rad:
/// (1/2)[1 - 4so^2/G^2 - 4se^2/G^2 - 2/(C+1) - (2gd/G)(1 - 1/(C+1)) - 2g1/G
///       + (G^2/4dh^2)(1 - 1/(C+1) - g1/G)^2].
double success_probability_closed_form(const EmitterParams& params, const PulseParams& pulse);
/// Trace of the heralded state from run_gate.
double success_probability_exact(const EmitterParams& params, const PulseParams& pulse,
                                 const ChannelConfig& channels);

struct Visibility {
  double exact = 1.0;   // i_res / (i_res + P_gd)
  double linear = 1.0;  // 1 - 2 gd / gamma_total_rad
};

Visibility photon_visibility(const EmitterParams& params, const PulseParams& pulse,
                             const SpectralOptions& opts = {});

/// Wootters concurrence of the trace-normalized state. Throws ValidationError
/// for a non-PSD or zero-trace input.
double concurrence(const JointDensity& rho);

/// Coincidence counts. The mid-window entries count correlated (plus) and
/// anticorrelated (minus) outcomes in the equatorial bases.
struct CoincidenceCounts {
  double e_up = 0.0;
  double e_down = 0.0;
  double l_up = 0.0;
  double l_down = 0.0;
  std::optional<double> mid_x_plus, mid_x_minus, mid_y_plus, mid_y_minus;

  bool has_mid_x() const { return mid_x_plus && mid_x_minus; }
  bool has_mid_y() const { return mid_y_plus && mid_y_minus; }
  /// Equatorial contrast from mid counts when present, else `fallback`.
  double contrast_x(double fallback) const;
  double contrast_y(double fallback) const;
};

/// X-form state: populations from normalized Z counts, real coherence
/// (M_x - M_y)/4 at (e-down, l-up), clamped to keep the state PSD.
JointDensity density_from_counts(const CoincidenceCounts& counts, double m_x, double m_y);

struct BootstrapResult {
  double point = 0.0;     // concurrence of the unresampled counts
  double estimate = 0.0;  // mean over resamples
  double std = 0.0;
  int resamples = 0;
  std::uint64_t seed = 0;
};

/// Splitmix64 seed for shard k of a bootstrap run. Shard results are
/// concatenated in shard order, so output depends only on (seed, n_resamples).
std::uint64_t shard_seed(std::uint64_t seed, std::uint64_t shard);

/// Poisson-resamples every count, recomputes mid contrasts when mid counts are
/// present, and reports mean and standard deviation of the concurrence.
/// `jobs` only sets the number of worker threads.
BootstrapResult bootstrap_concurrence(const CoincidenceCounts& counts, double m_x, double m_y,
                                      int n_resamples, std::uint64_t seed, int jobs = 1);

}  // namespace tbgate

#pragma once

// Frequency-domain reflection/transmission coefficients of the emitter and
// their overlap with a Gaussian input pulse.

#include "tbgate/core.hpp"
#include "tbgate/quadrature.hpp"

#include <functional>
#include <string>
#include <vector>

namespace tbgate {

/// Gaussian spectral density |Phi(omega)|^2 with unit integral.
struct SpectralProfile {
  double center = 0.0;
  double sigma = 1.0;

  double density(double omega) const;
};

/// Coefficients for a photon detuned by `detuning` from omega_1. The
/// coherent response uses the linewidth gamma_total_deph.
ScatterAmplitudes coefficients_at(const EmitterParams& params, double detuning);

enum class OverlapMethod { quadrature, perturbative };

struct OverlapIntegrals {
  double i_res = 0.0;        // int |Phi|^2 |r1|^2
  double i_off = 0.0;        // int |Phi|^2 |r1_off|^2
  double i_trans_res = 0.0;  // int |Phi|^2 |t1|^2
  double i_trans_off = 0.0;  // int |Phi|^2 |t1_off|^2
  double error_bound = 0.0;
  std::vector<std::string> warnings;
};

struct SpectralOptions {
  QuadratureOptions quad{};
  int hermite_nodes = 41;
  double window_sigmas = 12.0;
};

OverlapIntegrals overlap_integrals(const EmitterParams& params, const PulseParams& pulse,
                                   OverlapMethod method = OverlapMethod::quadrature,
                                   const SpectralOptions& opts = {});

/// E[g(delta)] where delta = detuning + x + d_e with x ~ N(0, sigma_o^2) from the
/// pulse spectrum and d_e ~ N(0, sigma_e^2) from spectral diffusion. The inner
/// average is adaptive Gauss-Kronrod, the outer one Gauss-Hermite. Throws
/// NumericalError when the inner integral does not reach its tolerance.
Eigen::VectorXd spectral_average(const EmitterParams& params, const PulseParams& pulse,
                                 const std::function<Eigen::VectorXd(double)>& g,
                                 const SpectralOptions& opts = {}, double* error_bound = nullptr);

}  // namespace tbgate

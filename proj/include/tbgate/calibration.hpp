#pragma once

// Saturation-curve fit, mean photon number and dephasing extraction from
// the visibility intercept.

#include "tbgate/core.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tbgate {

struct SaturationPoint {
  double power_nw = 0.0;
  double counts = 0.0;
  std::string spin_state = "up";
};

struct SaturationFitOptions {
  /// Hold b2 at this value. I = b3 b1 P/(1 + b2 b1 P) only determines b1 b2
  /// and b3/b2, so one parameter has to be pinned to report all three.
  std::optional<double> b2_fixed;
  int max_iterations = 2000;  // function evaluations
  double tolerance = 1e-12;
};

struct SaturationFit {
  double b1 = 0.0;
  double b2 = 0.0;
  double b3 = 0.0;
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
  double residual_norm = 0.0;
  int iterations = 0;
  bool b2_fixed = false;
};

double saturation_model(double b1, double b2, double b3, double power_nw);

/// Levenberg-Marquardt least squares over log b1, log b3 with an analytic
/// Jacobian. Without b2_fixed the solution is reported in the b2 = 1 gauge.
/// Points with spin_state other than "up" are ignored.
SaturationFit fit_saturation(const std::vector<SaturationPoint>& data,
                             const SaturationFitOptions& opts = {});

struct PhotonFlux {
  double s_param = 0.0;       // S = b1 b2 P
  double n_crit = 0.0;        // n_c
  double n_flux = 0.0;        // n_F = S n_c
  double n_bar = 0.0;         // n_F T_p Gamma
  double scale_per_nw = 0.0;  // 1e-2 b1 b2 n_c T_p Gamma / 2
  std::vector<std::string> warnings;
};

/// (1 + 2 gd/G)/(4 beta^2), G = gamma_total_rad.
double critical_photon_number(const EmitterParams& params);

PhotonFlux mean_photon_number(double b1, double b2, const EmitterParams& params,
                              const PulseParams& pulse, double power_nw);
PhotonFlux mean_photon_number(const SaturationFit& fit, const EmitterParams& params,
                              const PulseParams& pulse, double power_nw);
/// Same chain starting from a given saturation parameter S.
PhotonFlux photon_flux_from_s(double s_param, const EmitterParams& params,
                              const PulseParams& pulse);

struct VisibilityPoint {
  double n_bar = 0.0;
  double visibility = 0.0;
  std::optional<double> error;
};

struct DephasingExtraction {
  double gamma_d = 0.0;
  double intercept = 0.0;
  double slope = 0.0;
  double intercept_err = 0.0;
  double gamma_d_err = 0.0;
  bool weighted = false;
};

/// gamma_d = G (1 - V0)/2.
double dephasing_from_intercept(double intercept, double gamma_total);

/// Least-squares line through (n_bar, V); weighted by 1/err^2 when every point
/// carries a positive error.
DephasingExtraction extract_dephasing(const std::vector<VisibilityPoint>& points,
                                      double gamma_total);

}  // namespace tbgate

#include "tbgate/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tbgate {

double SpectralProfile::density(double omega) const {
  const double z = (omega - center) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(kTwoPi));
}

ScatterAmplitudes coefficients_at(const EmitterParams& p, double detuning) {
  const double width = p.gamma_total_deph();
  const double g1t = p.gamma1_t();
  const double g1r = p.gamma1_r();
  const double g2r = p.gamma2_r();
  const double g2t = p.gamma2_t();

  auto fill = [&](double d, cplx& r1, cplx& t1, cplx& r2, cplx& t2) {
    const cplx inv = 1.0 / cplx(width, 2.0 * d);
    r1 = -2.0 * std::sqrt(g1t * g1r) * inv;
    t1 = 1.0 - 2.0 * g1t * inv;
    r2 = -2.0 * std::sqrt(g1t * g2r) * inv;
    t2 = -2.0 * std::sqrt(g1t * g2t) * inv;
  };

  ScatterAmplitudes a;
  fill(detuning, a.r1, a.t1, a.r2, a.t2);
  fill(detuning + p.delta_h, a.r1_off, a.t1_off, a.r2_off, a.t2_off);
  return a;
}

Eigen::VectorXd spectral_average(const EmitterParams& params, const PulseParams& pulse,
                                 const std::function<Eigen::VectorXd(double)>& g,
                                 const SpectralOptions& opts, double* error_bound) {
  const double so = pulse.sigma_o;
  const double half_width = opts.window_sigmas * so;
  const SpectralProfile profile{0.0, so};

  std::vector<double> offsets{0.0};
  std::vector<double> weights{1.0};
  if (pulse.sigma_e > 0.0) {
    const HermiteRule rule = gauss_hermite(opts.hermite_nodes);
    offsets.clear();
    for (double x : rule.nodes) offsets.push_back(pulse.sigma_e * x);
    weights = rule.weights;
  }

  Eigen::VectorXd total;
  double total_err = 0.0;
  for (std::size_t k = 0; k < offsets.size(); ++k) {
    const double shift = pulse.detuning + offsets[k];
    std::vector<double> points;
    for (double x = -half_width; x < half_width - 1e-12 * so; x += 2.0 * so) points.push_back(x);
    points.push_back(half_width);
    // Lorentzian centres sit where the total detuning is 0 or -delta_h.
    for (double c : {-shift, -shift - params.delta_h}) {
      if (c > -half_width && c < half_width) points.push_back(c);
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());

    auto integrand = [&](double x) -> Eigen::VectorXd {
      return profile.density(x) * g(shift + x);
    };
    const QuadratureResult q = integrate_gk15(integrand, points, opts.quad);
    if (!q.converged) {
      std::ostringstream os;
      os.precision(6);
      os << "spectral quadrature did not converge: estimate " << q.value.cwiseAbs().maxCoeff()
         << ", error bound " << q.error << " after " << q.intervals << " panels";
      throw NumericalError(os.str());
    }
    if (k == 0) {
      total = weights[k] * q.value;
    } else {
      total += weights[k] * q.value;
    }
    total_err += weights[k] * q.error;
  }
  if (error_bound) *error_bound = total_err;
  return total;
}

OverlapIntegrals overlap_integrals(const EmitterParams& params, const PulseParams& pulse,
                                   OverlapMethod method, const SpectralOptions& opts) {
  OverlapIntegrals out;
  const double width = params.gamma_total_deph();

  if (method == OverlapMethod::perturbative) {
    if (pulse.sigma_o > width / 3.0) {
      out.warnings.push_back("perturbative overlap: sigma_o exceeds a third of the linewidth");
    }
    if (width > params.delta_h / 3.0) {
      out.warnings.push_back("perturbative overlap: linewidth exceeds a third of delta_h");
    }
    const double spread = pulse.sigma_o * pulse.sigma_o + pulse.sigma_e * pulse.sigma_e +
                          pulse.detuning * pulse.detuning;
    const double g1 = 2.0 * std::sqrt(params.gamma1_t() * params.gamma1_r());
    out.i_res = 1.0 - 4.0 * spread / (width * width) - (width * width - g1 * g1) / (width * width);
    out.i_off = g1 * g1 / (width * width + 4.0 * params.delta_h * params.delta_h);
    const ScatterAmplitudes centre = coefficients_at(params, pulse.detuning);
    out.i_trans_res = std::norm(centre.t1);
    out.i_trans_off = std::norm(centre.t1_off);
    return out;
  }

  auto g = [&params](double d) -> Eigen::VectorXd {
    const ScatterAmplitudes a = coefficients_at(params, d);
    Eigen::VectorXd v(4);
    v << std::norm(a.r1), std::norm(a.r1_off), std::norm(a.t1), std::norm(a.t1_off);
    return v;
  };
  const Eigen::VectorXd v = spectral_average(params, pulse, g, opts, &out.error_bound);
  out.i_res = v(0);
  out.i_off = v(1);
  out.i_trans_res = v(2);
  out.i_trans_off = v(3);
  return out;
}

}  // namespace tbgate

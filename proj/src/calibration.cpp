#include "tbgate/calibration.hpp"

#include <unsupported/Eigen/LevenbergMarquardt>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tbgate {

double saturation_model(double b1, double b2, double b3, double power_nw) {
  const double u = b1 * power_nw;
  return b3 * u / (1.0 + b2 * u);
}

namespace {

// Power at which the counts first reach half their maximum, by linear
// interpolation between neighbouring points.
double half_max_power(const std::vector<SaturationPoint>& pts, double peak) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].counts >= 0.5 * peak) {
      if (i == 0) return pts[0].power_nw > 0.0 ? pts[0].power_nw : pts[1].power_nw;
      const double x0 = pts[i - 1].power_nw, x1 = pts[i].power_nw;
      const double y0 = pts[i - 1].counts, y1 = pts[i].counts;
      const double x = y1 > y0 ? x0 + (0.5 * peak - y0) * (x1 - x0) / (y1 - y0) : x1;
      return x > 0.0 ? x : x1;
    }
  }
  return pts.back().power_nw;
}

struct SaturationFunctor : Eigen::DenseFunctor<double> {
  SaturationFunctor(const std::vector<SaturationPoint>& pts, double b2)
      : Eigen::DenseFunctor<double>(2, static_cast<int>(pts.size())), pts(pts), b2(b2) {}

  int operator()(const Eigen::VectorXd& theta, Eigen::VectorXd& r) const {
    const double b1 = std::exp(theta(0)), b3 = std::exp(theta(1));
    for (std::size_t i = 0; i < pts.size(); ++i) {
      r(i) = saturation_model(b1, b2, b3, pts[i].power_nw) - pts[i].counts;
    }
    return 0;
  }

  int df(const Eigen::VectorXd& theta, Eigen::MatrixXd& j) const {
    const double b1 = std::exp(theta(0)), b3 = std::exp(theta(1));
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double u = b1 * pts[i].power_nw;
      const double d = 1.0 + b2 * u;
      j(i, 0) = b3 * u / (d * d);
      j(i, 1) = b3 * u / d;
    }
    return 0;
  }

  const std::vector<SaturationPoint>& pts;
  double b2;
};

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  const double cutoff = 1e-12 * es.eigenvalues().cwiseAbs().maxCoeff();
  Eigen::VectorXd inv(es.eigenvalues().size());
  for (int i = 0; i < inv.size(); ++i) {
    const double ev = es.eigenvalues()(i);
    inv(i) = ev > cutoff ? 1.0 / ev : 0.0;
  }
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

SaturationFit fit_saturation(const std::vector<SaturationPoint>& data,
                             const SaturationFitOptions& opts) {
  std::vector<SaturationPoint> pts;
  for (const auto& p : data) {
    if (p.spin_state != "up") continue;
    if (!(p.power_nw >= 0.0)) throw ValidationError("power_nw", p.power_nw, "must be non-negative");
    if (!(p.counts >= 0.0)) throw ValidationError("counts", p.counts, "must be non-negative");
    pts.push_back(p);
  }
  if (pts.size() < 4) {
    throw ValidationError("data", static_cast<double>(pts.size()), "need at least 4 points");
  }
  std::sort(pts.begin(), pts.end(),
            [](const auto& a, const auto& b) { return a.power_nw < b.power_nw; });
  if (pts.front().power_nw == pts.back().power_nw) {
    throw ValidationError("power_nw", pts.front().power_nw, "degenerate data: all powers equal");
  }
  if (opts.b2_fixed && !(*opts.b2_fixed > 0.0)) {
    throw ValidationError("b2", *opts.b2_fixed, "fixed b2 must be positive");
  }

  double peak = 0.0;
  for (const auto& p : pts) peak = std::max(peak, p.counts);
  if (!(peak > 0.0)) throw ValidationError("counts", peak, "degenerate data: all counts zero");

  // b2 is a gauge choice: rescaling (b1, b2, b3) -> (k b1, b2/k, b3/k) leaves
  // the model unchanged, so the fit runs over log b1, log b3 at fixed b2.
  const bool fixed = opts.b2_fixed.has_value();
  const double b2 = fixed ? *opts.b2_fixed : 1.0;
  SaturationFunctor functor(pts, b2);
  Eigen::VectorXd theta(2);
  theta << std::log(1.0 / (half_max_power(pts, peak) * b2)), std::log(peak);

  Eigen::LevenbergMarquardt<SaturationFunctor> lm(functor);
  lm.setMaxfev(opts.max_iterations);
  lm.setXtol(opts.tolerance);
  lm.setFtol(opts.tolerance);
  const auto status = lm.minimize(theta);
  using Eigen::LevenbergMarquardtSpace::Status;
  if (status == Status::ImproperInputParameters || status == Status::TooManyFunctionEvaluation ||
      !theta.allFinite()) {
    std::ostringstream os;
    os.precision(8);
    os << "saturation fit did not converge (status " << static_cast<int>(status)
       << ", b1=" << std::exp(theta(0)) << ", b2=" << b2 << ", b3=" << std::exp(theta(1)) << ")";
    throw NumericalError(os.str());
  }

  SaturationFit fit;
  fit.b1 = std::exp(theta(0));
  fit.b2 = b2;
  fit.b3 = std::exp(theta(1));
  fit.iterations = static_cast<int>(lm.iterations());
  fit.b2_fixed = fixed;

  Eigen::VectorXd r(functor.values());
  functor(theta, r);
  Eigen::MatrixXd j(functor.values(), 2);
  functor.df(theta, j);
  const double cost = r.squaredNorm();
  fit.residual_norm = std::sqrt(cost);
  const int dof = std::max(1, functor.values() - 2);
  const Eigen::MatrixXd cov_log = (cost / dof) * pseudo_inverse(j.transpose() * j);
  // log-space covariance of (b1, b3) mapped onto (b1, b2, b3); b2 carries none.
  const int idx[3] = {0, -1, 1};
  const double val[3] = {fit.b1, fit.b2, fit.b3};
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      if (idx[a] < 0 || idx[b] < 0) continue;
      fit.covariance(a, b) = val[a] * val[b] * cov_log(idx[a], idx[b]);
    }
  }
  return fit;
}

double critical_photon_number(const EmitterParams& p) {
  return (1.0 + 2.0 * p.gamma_dephase / p.gamma_total_rad()) /
         (4.0 * p.beta_factor * p.beta_factor);
}

PhotonFlux photon_flux_from_s(double s_param, const EmitterParams& params,
                              const PulseParams& pulse) {
  if (!(s_param >= 0.0)) throw ValidationError("s_param", s_param, "must be non-negative");
  PhotonFlux f;
  const double g = params.gamma_total_rad();
  f.s_param = s_param;
  f.n_crit = critical_photon_number(params);
  f.n_flux = s_param * f.n_crit;
  f.n_bar = f.n_flux * pulse.t_pulse * g;
  if (pulse.t_pulse * g < 2.0) {
    f.warnings.push_back("saturation model assumes T_p * Gamma >= 2");
  }
  return f;
}

PhotonFlux mean_photon_number(double b1, double b2, const EmitterParams& params,
                              const PulseParams& pulse, double power_nw) {
  if (!(power_nw >= 0.0)) throw ValidationError("power_nw", power_nw, "must be non-negative");
  PhotonFlux f = photon_flux_from_s(b1 * b2 * power_nw, params, pulse);
  f.scale_per_nw = 1e-2 * b1 * b2 * f.n_crit * pulse.t_pulse * params.gamma_total_rad() / 2.0;
  return f;
}

PhotonFlux mean_photon_number(const SaturationFit& fit, const EmitterParams& params,
                              const PulseParams& pulse, double power_nw) {
  return mean_photon_number(fit.b1, fit.b2, params, pulse, power_nw);
}

double dephasing_from_intercept(double intercept, double gamma_total) {
  return 0.5 * gamma_total * (1.0 - intercept);
}

DephasingExtraction extract_dephasing(const std::vector<VisibilityPoint>& points,
                                      double gamma_total) {
  if (points.size() < 2) {
    throw ValidationError("points", static_cast<double>(points.size()), "need at least 2 points");
  }
  const bool weighted = std::all_of(points.begin(), points.end(),
                                    [](const auto& p) { return p.error && *p.error > 0.0; });
  const int n = static_cast<int>(points.size());
  Eigen::MatrixXd x(n, 2);
  Eigen::VectorXd y(n), w(n);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = points[i].n_bar;
    y(i) = points[i].visibility;
    w(i) = weighted ? 1.0 / (*points[i].error * *points[i].error) : 1.0;
  }
  const Eigen::Matrix2d normal = x.transpose() * w.asDiagonal() * x;
  const double det = normal.determinant();
  if (!(std::abs(det) > 1e-14 * normal.cwiseAbs().maxCoeff() * normal.cwiseAbs().maxCoeff())) {
    throw ValidationError("n_bar", points.front().n_bar, "singular design matrix");
  }
  const Eigen::Matrix2d inv = normal.inverse();
  const Eigen::Vector2d coef = inv * (x.transpose() * w.asDiagonal() * y);

  DephasingExtraction out;
  out.weighted = weighted;
  out.intercept = coef(0);
  out.slope = coef(1);
  double var0 = inv(0, 0);
  if (!weighted) {
    const Eigen::VectorXd res = y - x * coef;
    var0 *= n > 2 ? res.squaredNorm() / (n - 2) : 0.0;
  }
  out.intercept_err = std::sqrt(std::max(0.0, var0));
  out.gamma_d = dephasing_from_intercept(out.intercept, gamma_total);
  out.gamma_d_err = 0.5 * gamma_total * out.intercept_err;
  return out;
}

}  // namespace tbgate

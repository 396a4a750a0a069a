#pragma once

// Adaptive Gauss-Kronrod (G7/K15) integration of vector-valued integrands,
// and Gauss-Hermite nodes for expectations over a standard normal.

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace tbgate {

struct QuadratureResult {
  Eigen::VectorXd value;
  double error = 0.0;  // max-norm estimate of the absolute error
  int evaluations = 0;
  int intervals = 0;
  bool converged = false;
};

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  int max_intervals = 4000;
};

using VectorIntegrand = std::function<Eigen::VectorXd(double)>;

/// Integrates f over [points.front(), points.back()], starting from the
/// panels delimited by `points` (sorted ascending, at least two entries) and
/// bisecting the worst panel until the summed error estimate drops below
/// max(abs_tol, rel_tol * |value|). Does not throw on non-convergence; the
/// caller inspects `converged`.
QuadratureResult integrate_gk15(const VectorIntegrand& f, const std::vector<double>& points,
                                const QuadratureOptions& opts = {});

/// Scalar convenience wrapper.
QuadratureResult integrate_gk15(const std::function<double(double)>& f, double a, double b,
                                const QuadratureOptions& opts = {});

/// Probabilists' Gauss-Hermite rule: sum_i w_i g(x_i) ~ E[g(X)], X ~ N(0, 1).
/// Weights sum to one.
struct HermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

HermiteRule gauss_hermite(int n);

}  // namespace tbgate

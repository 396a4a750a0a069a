#include "tbgate/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace tbgate {

namespace {

// 15-point Kronrod nodes / weights with the embedded 7-point Gauss weights.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  Eigen::VectorXd value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const VectorIntegrand& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const Eigen::VectorXd fc = f(centre);
  Eigen::VectorXd kronrod = kWgk[7] * fc;
  Eigen::VectorXd gauss = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const Eigen::VectorXd sum = f(centre - dx) + f(centre + dx);
    kronrod += kWgk[j] * sum;
    if (j % 2 == 1) gauss += kWg[j / 2] * sum;
  }
  kronrod *= half;
  gauss *= half;
  const double err = (kronrod - gauss).cwiseAbs().maxCoeff();
  return Panel{a, b, std::move(kronrod), err};
}

}  // namespace

QuadratureResult integrate_gk15(const VectorIntegrand& f, const std::vector<double>& points,
                                const QuadratureOptions& opts) {
  if (points.size() < 2) throw std::invalid_argument("integrate_gk15 needs two or more points");
  if (!std::is_sorted(points.begin(), points.end()))
    throw std::invalid_argument("integrate_gk15 breakpoints must be ascending");

  std::priority_queue<Panel> heap;
  QuadratureResult out;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (points[i + 1] <= points[i]) continue;
    heap.push(gk15(f, points[i], points[i + 1]));
    out.evaluations += 15;
  }
  if (heap.empty()) throw std::invalid_argument("integrate_gk15 over an empty range");

  auto totals = [&heap]() {
    std::priority_queue<Panel> copy = heap;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(copy.top().value.size());
    double e = 0.0;
    while (!copy.empty()) {
      v += copy.top().value;
      e += copy.top().error;
      copy.pop();
    }
    return std::pair{v, e};
  };

  Eigen::VectorXd value;
  double error = 0.0;
  std::tie(value, error) = totals();
  while (true) {
    const double target = std::max(opts.abs_tol, opts.rel_tol * value.cwiseAbs().maxCoeff());
    if (error <= target) {
      out.converged = true;
      break;
    }
    if (static_cast<int>(heap.size()) >= opts.max_intervals) break;
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      heap.push(std::move(worst));
      break;  // panel can no longer be split in double precision
    }
    Panel left = gk15(f, worst.a, mid);
    Panel right = gk15(f, mid, worst.b);
    out.evaluations += 30;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(std::move(left));
    heap.push(std::move(right));
  }
  // Recompute from the panels to shed accumulated cancellation.
  std::tie(out.value, out.error) = totals();
  out.intervals = static_cast<int>(heap.size());
  return out;
}

QuadratureResult integrate_gk15(const std::function<double(double)>& f, double a, double b,
                                const QuadratureOptions& opts) {
  VectorIntegrand g = [&f](double x) {
    Eigen::VectorXd v(1);
    v(0) = f(x);
    return v;
  };
  return integrate_gk15(g, std::vector<double>{a, b}, opts);
}

HermiteRule gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite needs n >= 1");
  // Golub-Welsch on the Jacobi matrix of the monic He_k recurrence.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    jacobi(k, k - 1) = std::sqrt(static_cast<double>(k));
    jacobi(k - 1, k) = jacobi(k, k - 1);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  HermiteRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = solver.eigenvalues()(i);
    const double v0 = solver.eigenvectors()(0, i);
    rule.weights[i] = v0 * v0;
  }
  return rule;
}

}  // namespace tbgate

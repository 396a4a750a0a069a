#include "tbgate/core.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace tbgate {

namespace {

std::string describe(const std::string& field, double value, const std::string& what) {
  std::ostringstream os;
  os.precision(12);
  os << what << " (" << field << " = " << value << ")";
  return os.str();
}

void require(bool ok, const char* field, double value, const char* what) {
  if (!ok) throw ValidationError(field, value, what);
}

}  // namespace

ValidationError::ValidationError(std::string field, double value, const std::string& what)
    : std::invalid_argument(describe(field, value, what)), field_(std::move(field)) {}

ValidationError::ValidationError(std::string field, const std::string& what)
    : std::invalid_argument(what + " (" + field + ")"), field_(std::move(field)) {}

// ---------------------------------------------------------------------------

double EmitterParams::cyclicity_transition() const noexcept {
  const double den = gamma2_wg + gamma2_loss;
  if (den <= 0.0) return std::numeric_limits<double>::infinity();
  return (gamma1_wg + gamma1_loss) / den;
}

double EmitterParams::cyclicity_channel() const noexcept {
  const double den = gamma1_loss + gamma2_loss;
  if (den <= 0.0) return std::numeric_limits<double>::infinity();
  return (gamma1_wg + gamma2_wg) / den;
}

double EmitterParams::effective_cyclicity() const noexcept {
  return cyclicity ? *cyclicity : cyclicity_channel();
}

double EmitterParams::inv_cyclicity_plus_one() const noexcept {
  if (cyclicity) return 1.0 / (*cyclicity + 1.0);
  // (gamma_1 + gamma_2) / Gamma, the same quantity without dividing by zero.
  return (gamma1_loss + gamma2_loss) / gamma_total_rad();
}

PulseParams PulseParams::from_duration(double t_pulse, double sigma_e, double detuning,
                                       double n_bar) {
  return PulseParams{1.0 / (2.0 * t_pulse), sigma_e, detuning, t_pulse, n_bar};
}

Matrix2c RotationPulse::unitary() const {
  const double azimuth = (axis == RotationAxis::y ? kPi / 2.0 : 0.0) + phase;
  const double c = std::cos(angle / 2.0);
  const double s = std::sin(angle / 2.0);
  // exp(i a/2 (cos f X + sin f Y)) = c I + i s (cos f X + sin f Y)
  const cplx off_upper = cplx(0.0, 1.0) * s * std::exp(cplx(0.0, -azimuth));
  const cplx off_lower = cplx(0.0, 1.0) * s * std::exp(cplx(0.0, azimuth));
  Matrix2c u;
  u << c, off_upper, off_lower, c;
  return u;
}

void validate(const EmitterParams& p) {
  require(p.gamma1_wg >= 0.0, "gamma1_wg", p.gamma1_wg, "rate must be non-negative");
  require(p.gamma2_wg >= 0.0, "gamma2_wg", p.gamma2_wg, "rate must be non-negative");
  require(p.gamma1_loss >= 0.0, "gamma1_loss", p.gamma1_loss, "rate must be non-negative");
  require(p.gamma2_loss >= 0.0, "gamma2_loss", p.gamma2_loss, "rate must be non-negative");
  require(p.gamma_dephase >= 0.0, "gamma_dephase", p.gamma_dephase,
          "rate must be non-negative");
  require(p.kappa_flip >= 0.0, "kappa_flip", p.kappa_flip, "rate must be non-negative");
  require(p.gamma_total_rad() > 0.0, "gamma_total_rad", p.gamma_total_rad(),
          "gamma_total_rad must be positive");
  require(p.delta_h > 0.0, "delta_h", p.delta_h, "ground-state splitting must be positive");
  require(p.t2_star > 0.0, "t2_star", p.t2_star, "T2* must be positive");
  require(p.beta_factor > 0.0 && p.beta_factor <= 1.0, "beta_factor", p.beta_factor,
          "beta factor must lie in (0, 1]");
  require(p.split1_r >= 0.0 && p.split1_r <= 1.0, "split1_r", p.split1_r,
          "coupling split must lie in [0, 1]");
  require(p.split2_r >= 0.0 && p.split2_r <= 1.0, "split2_r", p.split2_r,
          "coupling split must lie in [0, 1]");
  if (p.cyclicity) {
    require(*p.cyclicity > 0.0, "cyclicity", *p.cyclicity, "cyclicity must be positive");
  }
  if (p.kappa_g) {
    require(*p.kappa_g >= 0.0, "kappa_g", *p.kappa_g, "rate must be non-negative");
  }
  for (double v : {p.gamma1_wg, p.gamma2_wg, p.gamma1_loss, p.gamma2_loss, p.gamma_dephase,
                   p.delta_h, p.kappa_flip, p.t2_star}) {
    if (!std::isfinite(v)) throw ValidationError("emitter", v, "parameter must be finite");
  }
}

void validate(const PulseParams& p) {
  require(p.sigma_o > 0.0 && std::isfinite(p.sigma_o), "sigma_o", p.sigma_o,
          "pulse bandwidth must be positive");
  require(p.sigma_e >= 0.0 && std::isfinite(p.sigma_e), "sigma_e", p.sigma_e,
          "spectral diffusion width must be non-negative");
  require(std::isfinite(p.detuning), "detuning", p.detuning, "detuning must be finite");
  require(p.t_pulse > 0.0, "t_pulse", p.t_pulse, "pulse duration must be positive");
  require(p.n_bar >= 0.0, "n_bar", p.n_bar, "mean photon number must be non-negative");
  const double product = 2.0 * p.sigma_o * p.t_pulse;
  require(std::abs(product - 1.0) <= 1e-9, "t_pulse", p.t_pulse,
          "t_pulse must equal 1/(2 sigma_o)");
}

void validate(const RotationPulse& p) {
  require(p.duration > 0.0, "duration", p.duration, "rotation duration must be positive");
  require(std::isfinite(p.angle), "angle", p.angle, "rotation angle must be finite");
  require(std::isfinite(p.phase), "phase", p.phase, "rotation phase must be finite");
}

// ---------------------------------------------------------------------------

Eigen::Vector4cd bell_vector(BellTarget target, double theta_p) {
  const double amp = 1.0 / std::sqrt(2.0);
  const cplx late = amp * std::exp(cplx(0.0, theta_p));
  Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
  switch (target) {
    case BellTarget::phi_minus: v(kEarlyDown) = amp; v(kLateUp) = -late; break;
    case BellTarget::phi_plus:  v(kEarlyDown) = amp; v(kLateUp) = late; break;
    case BellTarget::psi_minus: v(kEarlyUp) = amp; v(kLateDown) = -late; break;
    case BellTarget::psi_plus:  v(kEarlyUp) = amp; v(kLateDown) = late; break;
  }
  return v;
}

double hermiticity_defect(const Eigen::MatrixXcd& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const Eigen::MatrixXcd& m) {
  const Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

SpinDensity::SpinDensity(const Matrix2c& m) : m_(m) {}

SpinDensity SpinDensity::up() { return pure(1.0, 0.0); }
SpinDensity SpinDensity::down() { return pure(0.0, 1.0); }

SpinDensity SpinDensity::pure(cplx c_up, cplx c_down) {
  Eigen::Vector2cd v(c_up, c_down);
  return SpinDensity(v * v.adjoint());
}

void SpinDensity::check(double tol) const {
  if (hermiticity_defect(m_) > tol) throw ValidationError("spin", "density matrix not Hermitian");
  const double ev = min_eigenvalue(m_);
  if (ev < -tol) throw ValidationError("spin", ev, "density matrix not positive semidefinite");
  const double tr = trace();
  if (tr < -tol || tr > 1.0 + tol) throw ValidationError("spin", tr, "trace outside [0, 1]");
}

JointDensity::JointDensity(const Matrix4c& m, bool normalized) : m_(m), normalized_(normalized) {}

JointDensity JointDensity::product(cplx alpha, cplx beta, const SpinDensity& spin) {
  Eigen::Vector2cd photon(alpha, beta);
  const Matrix2c rho_p = photon * photon.adjoint();
  Matrix4c m;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) m.block<2, 2>(2 * a, 2 * b) = rho_p(a, b) * spin.matrix();
  const bool unit = std::abs(m.trace().real() - 1.0) < 1e-12;
  return JointDensity(m, unit);
}

JointDensity JointDensity::equal_superposition(double theta_p, const SpinDensity& spin) {
  const double amp = 1.0 / std::sqrt(2.0);
  return product(amp, amp * std::exp(cplx(0.0, theta_p)), spin);
}

JointDensity JointDensity::from_pure(const Eigen::Vector4cd& psi) {
  const Eigen::Vector4cd v = psi / psi.norm();
  return JointDensity(v * v.adjoint(), true);
}

JointDensity JointDensity::normalized_copy() const {
  const double tr = trace();
  if (!(tr > 0.0)) throw ValidationError("joint", tr, "no heralded weight");
  JointDensity out = *this;
  out.m_ = m_ / tr;
  out.normalized_ = true;
  return out;
}

double JointDensity::expectation(const Eigen::Vector4cd& psi) const {
  return (psi.adjoint() * m_ * psi)(0, 0).real();
}

JointDensity JointDensity::with_matrix(const Matrix4c& m) const {
  JointDensity out = *this;
  out.m_ = m;
  return out;
}

JointDensity JointDensity::with_scattered(TimeBin bin) const {
  JointDensity out = *this;
  (bin == TimeBin::early ? out.scattered_early_ : out.scattered_late_) = true;
  out.normalized_ = false;
  return out;
}

void JointDensity::check(double tol) const {
  if (hermiticity_defect(m_) > tol) throw ValidationError("joint", "density matrix not Hermitian");
  const double ev = min_eigenvalue(m_);
  if (ev < -tol) throw ValidationError("joint", ev, "density matrix not positive semidefinite");
  const double tr = trace();
  if (normalized_) {
    if (std::abs(tr - 1.0) > 1e-10) throw ValidationError("joint", tr, "normalized trace != 1");
  } else if (tr < -tol || tr > 1.0 + tol) {
    throw ValidationError("joint", tr, "trace outside [0, 1]");
  }
}

bool JointDensity::is_physical(double tol) const noexcept {
  try {
    check(tol);
    return true;
  } catch (const ValidationError&) {
    return false;
  }
}

}  // namespace tbgate

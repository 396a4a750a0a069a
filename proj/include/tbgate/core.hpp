#pragma once

// Domain types shared by every tbgate module: emitter and pulse parameters,
// spin rotations, and the spin / spin-photon density matrices.
//
// Units: rates in ns^-1, splittings and detunings in rad/ns, times in ns.

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>

namespace tbgate {

using cplx = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// ---------------------------------------------------------------------------
// Errors

/// A parameter failed one of its invariants. Carries the offending field.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, double value, const std::string& what);
  ValidationError(std::string field, const std::string& what);

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Quadrature or fit failed to converge.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Parameters

/// Rates and splittings of the four-level (two Lambda-system) emitter.
///
/// The vertical transition couples |up> to the excited state with waveguide
/// rate gamma1_wg; the diagonal one couples |down> with gamma2_wg. The
/// split fractions give the share of each waveguide rate emitted into the
/// reflected port (the remainder goes to the transmitted port).
struct EmitterParams {
  double gamma1_wg = 0.0;
  double gamma2_wg = 0.0;
  double gamma1_loss = 0.0;
  double gamma2_loss = 0.0;
  double gamma_dephase = 0.0;
  double delta_h = 0.0;  // rad/ns
  double kappa_flip = 0.0;
  double t2_star = 1.0;
  double beta_factor = 1.0;
  double split1_r = 0.5;
  double split2_r = 0.5;
  /// Measured optical cyclicity fed to the closed-form error expressions.
  /// When unset the channel cyclicity derived from the rates is used.
  std::optional<double> cyclicity;
  /// Ground-state recycle rate. Stored for reference only.
  std::optional<double> kappa_g;

  /// Gamma_1 + Gamma_2 + gamma_1 + gamma_2.
  double gamma_total_rad() const noexcept {
    return gamma1_wg + gamma2_wg + gamma1_loss + gamma2_loss;
  }
  /// gamma_total_rad + 2 gamma_d. Linewidth of the coherent optical response
  /// and the total rate used by the pure-dephasing jump probability.
  double gamma_total_deph() const noexcept { return gamma_total_rad() + 2.0 * gamma_dephase; }
  /// (Gamma_1 + gamma_1) / (Gamma_2 + gamma_2); +inf when the denominator vanishes.
  double cyclicity_transition() const noexcept;
  /// (Gamma_1 + Gamma_2) / (gamma_1 + gamma_2); +inf for a lossless emitter.
  double cyclicity_channel() const noexcept;
  /// The cyclicity consumed by closed-form expressions.
  double effective_cyclicity() const noexcept;
  /// 1/(C+1) for the effective cyclicity, finite for C = inf.
  double inv_cyclicity_plus_one() const noexcept;

  double gamma1_r() const noexcept { return split1_r * gamma1_wg; }
  double gamma1_t() const noexcept { return (1.0 - split1_r) * gamma1_wg; }
  double gamma2_r() const noexcept { return split2_r * gamma2_wg; }
  double gamma2_t() const noexcept { return (1.0 - split2_r) * gamma2_wg; }

  bool operator==(const EmitterParams&) const = default;
};

/// Gaussian input pulse and spectral diffusion of the emitter.
struct PulseParams {
  double sigma_o = 0.25;  // spectral std of |Phi|^2, rad/ns
  double sigma_e = 0.0;   // spectral-diffusion std, rad/ns
  double detuning = 0.0;  // carrier offset delta_1 from omega_1, rad/ns
  double t_pulse = 2.0;   // ns, equals 1/(2 sigma_o)
  double n_bar = 0.0;

  /// Pulse whose spectral width follows from its duration.
  static PulseParams from_duration(double t_pulse, double sigma_e = 0.0, double detuning = 0.0,
                                   double n_bar = 0.0);

  bool operator==(const PulseParams&) const = default;
};

enum class RotationAxis { x, y };

/// Equatorial spin rotation of a given angle, realised in `duration` ns.
struct RotationPulse {
  RotationAxis axis = RotationAxis::y;
  double angle = kPi;
  double phase = 0.0;  // phi_r, added to the axis azimuth
  double duration = 7.0;

  static RotationPulse y(double angle, double duration) {
    return RotationPulse{RotationAxis::y, angle, 0.0, duration};
  }
  double rabi() const noexcept { return angle / duration; }
  /// 2x2 unitary exp(+i angle n.sigma / 2) over {up, down}.
  Matrix2c unitary() const;

  bool operator==(const RotationPulse&) const = default;
};

void validate(const EmitterParams& p);
void validate(const PulseParams& p);
void validate(const RotationPulse& p);

// ---------------------------------------------------------------------------
// States

/// 2x2 spin density matrix over {up, down}.
class SpinDensity {
 public:
  SpinDensity() : m_(Matrix2c::Zero()) {}
  explicit SpinDensity(const Matrix2c& m);

  static SpinDensity up();
  static SpinDensity down();
  /// |psi><psi| for psi = (c_up, c_down).
  static SpinDensity pure(cplx c_up, cplx c_down);

  const Matrix2c& matrix() const noexcept { return m_; }
  cplx operator()(int i, int j) const { return m_(i, j); }
  double trace() const { return m_.trace().real(); }

  /// Throws ValidationError unless Hermitian, PSD and 0 <= trace <= 1.
  void check(double tol = 1e-12) const;

 private:
  Matrix2c m_;
};

enum class TimeBin { early, late };

/// Basis indices of the joint state, photon (e/l) x spin (up/down).
enum JointIndex : int { kEarlyUp = 0, kEarlyDown = 1, kLateUp = 2, kLateDown = 3 };

/// 4x4 spin-photon density matrix over {e-up, e-down, l-up, l-down}.
///
/// Unnormalized states carry the heralding probability in their trace. The
/// scatter flags record which time bins have interacted with the emitter.
class JointDensity {
 public:
  JointDensity() : m_(Matrix4c::Zero()) {}
  explicit JointDensity(const Matrix4c& m, bool normalized = false);

  /// rho_p (x) rho_s for the time-bin qubit alpha|e> + beta|l>.
  static JointDensity product(cplx alpha, cplx beta, const SpinDensity& spin);
  /// Time-bin qubit with |alpha| = |beta| = 1/sqrt(2) and beta/alpha = e^{i theta_p}.
  static JointDensity equal_superposition(double theta_p, const SpinDensity& spin);
  static JointDensity from_pure(const Eigen::Vector4cd& psi);

  const Matrix4c& matrix() const noexcept { return m_; }
  cplx operator()(int i, int j) const { return m_(i, j); }
  double trace() const { return m_.trace().real(); }
  bool normalized() const noexcept { return normalized_; }

  JointDensity normalized_copy() const;
  /// <psi|rho|psi>, without normalization.
  double expectation(const Eigen::Vector4cd& psi) const;

  bool scattered(TimeBin bin) const noexcept {
    return bin == TimeBin::early ? scattered_early_ : scattered_late_;
  }
  JointDensity with_matrix(const Matrix4c& m) const;
  JointDensity with_scattered(TimeBin bin) const;

  /// Throws ValidationError unless Hermitian, PSD and the trace fits the flag.
  void check(double tol = 1e-12) const;
  bool is_physical(double tol = 1e-12) const noexcept;

 private:
  Matrix4c m_;
  bool normalized_ = false;
  bool scattered_early_ = false;
  bool scattered_late_ = false;
};

/// Scattering coefficients at one input frequency. The `_off` variants are
/// for the emitter in |down>, shifted by the ground-state splitting.
struct ScatterAmplitudes {
  cplx r1, t1, r2, t2;
  cplx r1_off, t1_off, r2_off, t2_off;

  double resonant_norm() const {
    return std::norm(r1) + std::norm(t1) + std::norm(r2) + std::norm(t2);
  }
  double off_resonant_norm() const {
    return std::norm(r1_off) + std::norm(t1_off) + std::norm(r2_off) + std::norm(t2_off);
  }
};

enum class BellTarget { phi_minus, phi_plus, psi_minus, psi_plus };

/// Ideal spin-photon state for a time-bin input with beta/alpha = e^{i theta_p}:
/// phi+- = (|e down> +- e^{i theta_p}|l up>)/sqrt2, psi+- = (|e up> +- e^{i theta_p}|l down>)/sqrt2.
Eigen::Vector4cd bell_vector(BellTarget target, double theta_p = 0.0);

/// Largest deviation from Hermiticity, elementwise.
double hermiticity_defect(const Eigen::MatrixXcd& m);
/// Smallest eigenvalue of the Hermitian part of m.
double min_eigenvalue(const Eigen::MatrixXcd& m);

}  // namespace tbgate

#include "tbgate/protocol.hpp"

#include <cmath>

namespace tbgate {

namespace {

Matrix4c spin_operator(const Matrix2c& u) {
  Matrix4c out = Matrix4c::Zero();
  out.block<2, 2>(0, 0) = u;
  out.block<2, 2>(2, 2) = u;
  return out;
}

Matrix2c pauli_x() {
  Matrix2c x;
  x << 0.0, 1.0, 1.0, 0.0;
  return x;
}

bool is_pi_pulse(const RotationPulse& pulse) {
  return std::abs(std::remainder(pulse.angle - kPi, kTwoPi)) < 1e-9;
}

Matrix2c minus_projector() {
  Matrix2c m;
  m << 0.5, -0.5, -0.5, 0.5;
  return m;
}

int bin_offset(TimeBin bin) { return bin == TimeBin::early ? 0 : 2; }

JointDensity apply_bin_amplitudes(const JointDensity& joint, TimeBin bin, cplx up, cplx down) {
  if (joint.scattered(bin)) {
    throw ValidationError(bin == TimeBin::early ? "early" : "late", "time bin already scattered");
  }
  Eigen::Vector4cd diag = Eigen::Vector4cd::Ones();
  diag(bin_offset(bin)) = up;
  diag(bin_offset(bin) + 1) = down;
  const Matrix4c a = diag.asDiagonal();
  return joint.with_scattered(bin).with_matrix(a * joint.matrix() * a.adjoint());
}

Eigen::VectorXd flatten(const Matrix4c& m) {
  Eigen::VectorXd v(32);
  for (int i = 0; i < 16; ++i) {
    v(2 * i) = m(i % 4, i / 4).real();
    v(2 * i + 1) = m(i % 4, i / 4).imag();
  }
  return v;
}

Matrix4c unflatten(const Eigen::VectorXd& v, int offset) {
  Matrix4c m;
  for (int i = 0; i < 16; ++i) m(i % 4, i / 4) = cplx(v(offset + 2 * i), v(offset + 2 * i + 1));
  return 0.5 * (m + m.adjoint());
}

}  // namespace

ChannelConfig ChannelConfig::all_off() {
  ChannelConfig c;
  c.enable_pure_dephasing = false;
  c.enable_spin_flip = false;
  c.enable_driving_dephasing = false;
  c.enable_readout_error = false;
  return c;
}

void validate(const ChannelConfig& c) {
  if (!(c.readout_fidelity >= 0.5 && c.readout_fidelity <= 1.0)) {
    throw ValidationError("readout_fidelity", c.readout_fidelity,
                          "readout fidelity must lie in [0.5, 1]");
  }
  validate(c.half_pi);
  validate(c.pi);
  if (!std::isfinite(c.late_bin_mismatch)) {
    throw ValidationError("late_bin_mismatch", c.late_bin_mismatch, "must be finite");
  }
}

ScatterAmplitudes ideal_amplitudes() {
  ScatterAmplitudes a{};
  a.r1 = -1.0;
  return a;
}

// ---------------------------------------------------------------------------

SpinDensity ideal_rotation(const SpinDensity& spin, const RotationPulse& pulse) {
  const Matrix2c u = pulse.unitary();
  return SpinDensity(u * spin.matrix() * u.adjoint());
}

JointDensity ideal_rotation(const JointDensity& joint, const RotationPulse& pulse) {
  const Matrix4c u = spin_operator(pulse.unitary());
  return joint.with_matrix(u * joint.matrix() * u.adjoint());
}

RotationFidelity rotation_fidelity(const RotationPulse& pulse, const EmitterParams& params) {
  const double ratio = pulse.duration / params.t2_star;
  if (ratio > kPi / std::sqrt(2.0)) {
    throw ValidationError("t2_star", params.t2_star,
                          "rotation outside validity of coherent-fidelity model");
  }
  RotationFidelity f;
  f.flip_prob = 1.0 - std::exp(-params.kappa_flip * pulse.duration);
  f.coherent_fidelity = 1.0 - (2.0 / (kPi * kPi)) * ratio * ratio;
  f.total = (1.0 - f.flip_prob) * f.coherent_fidelity + 0.5 * f.flip_prob;
  return f;
}

SpinDensity depolarizing_rotation(const SpinDensity& spin, const RotationPulse& pulse,
                                  const EmitterParams& params) {
  const RotationFidelity rf = rotation_fidelity(pulse, params);
  const Matrix2c rotated = ideal_rotation(spin, pulse).matrix();
  const Matrix2c err = is_pi_pulse(pulse) ? spin.matrix() : spin.trace() * minus_projector();
  const Matrix2c out = (1.0 - rf.flip_prob) *
                           (rf.coherent_fidelity * rotated + (1.0 - rf.coherent_fidelity) * err) +
                       0.5 * rf.flip_prob * spin.trace() * Matrix2c::Identity();
  return SpinDensity(out);
}

JointDensity depolarizing_rotation(const JointDensity& joint, const RotationPulse& pulse,
                                   const EmitterParams& params, FlipNoiseWeighting weighting,
                                   const Matrix2c& photonic_input) {
  const RotationFidelity rf = rotation_fidelity(pulse, params);
  const Matrix4c& rho = joint.matrix();
  const Matrix4c rotated = ideal_rotation(joint, pulse).matrix();
  Matrix4c err = rho;
  if (!is_pi_pulse(pulse)) {
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        err.block<2, 2>(2 * a, 2 * b) = rho.block<2, 2>(2 * a, 2 * b).trace() * minus_projector();
  }
  Matrix4c out = (1.0 - rf.flip_prob) *
                 (rf.coherent_fidelity * rotated + (1.0 - rf.coherent_fidelity) * err);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const cplx weight = weighting == FlipNoiseWeighting::photonic_input
                              ? photonic_input(a, b)
                              : rho.block<2, 2>(2 * a, 2 * b).trace();
      out.block<2, 2>(2 * a, 2 * b) += 0.5 * rf.flip_prob * weight * Matrix2c::Identity();
    }
  }
  return joint.with_matrix(out);
}

// ---------------------------------------------------------------------------

JointDensity scatter_timebin(const JointDensity& joint, TimeBin bin, const ScatterAmplitudes& amps) {
  return apply_bin_amplitudes(joint, bin, amps.r1, amps.r1_off);
}

JointDensity transmit_timebin(const JointDensity& joint, TimeBin bin,
                              const ScatterAmplitudes& amps) {
  return apply_bin_amplitudes(joint, bin, amps.t1, amps.t1_off);
}

JointDensity phase_damping(const JointDensity& joint, double p_d) {
  if (!(p_d >= 0.0 && p_d <= 1.0)) throw ValidationError("p_d", p_d, "must lie in [0, 1]");
  Matrix4c m = joint.matrix();
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      m(2 * a, 2 * b + 1) *= 1.0 - p_d;
      m(2 * a + 1, 2 * b) *= 1.0 - p_d;
    }
  }
  return joint.with_matrix(m);
}

SpinDensity phase_damping(const SpinDensity& spin, double p_d) {
  if (!(p_d >= 0.0 && p_d <= 1.0)) throw ValidationError("p_d", p_d, "must lie in [0, 1]");
  Matrix2c m = spin.matrix();
  m(0, 1) *= 1.0 - p_d;
  m(1, 0) *= 1.0 - p_d;
  return SpinDensity(m);
}

double driving_scatter_sum(const EmitterParams& params) {
  const double g = params.gamma_total_rad();
  const double loss = params.gamma1_loss + params.gamma2_loss;
  return 1.0 - 2.0 * (loss / g) *
                   (1.0 - params.inv_cyclicity_plus_one() - params.gamma1_loss / g);
}

double driving_dephasing_prob(const PulseParams& pulse, const EmitterParams& params) {
  if (pulse.n_bar < 0.0) throw ValidationError("n_bar", pulse.n_bar, "must be non-negative");
  return 1.0 - std::exp(-pulse.n_bar * driving_scatter_sum(params));
}

double pure_dephasing_probability(const EmitterParams& params) {
  const double g = params.gamma_total_deph();
  const double jump = 2.0 * params.gamma_dephase / g;
  const double keep = 1.0 - params.inv_cyclicity_plus_one();
  const double loss = params.gamma1_loss / g;
  return jump * (keep - loss) * (keep * (1.0 - jump) - loss);
}

double pure_dephasing_probability(const EmitterParams& params, const PulseParams& pulse,
                                  const SpectralOptions& opts) {
  const double p = pure_dephasing_probability(params);
  if (pulse.detuning == 0.0 || p == 0.0) return p;
  PulseParams centred = pulse;
  centred.detuning = 0.0;
  const double on = overlap_integrals(params, centred, OverlapMethod::quadrature, opts).i_res;
  const double off = overlap_integrals(params, pulse, OverlapMethod::quadrature, opts).i_res;
  return p * off / on;
}

Matrix4c pure_dephasing_injection(const EmitterParams& params, cplx alpha, cplx beta) {
  const double p = pure_dephasing_probability(params);
  Matrix4c m = Matrix4c::Zero();
  m(kEarlyDown, kEarlyDown) = 0.5 * std::norm(alpha) * p;
  m(kLateUp, kLateUp) = 0.5 * std::norm(beta) * p;
  return m;
}

JointDensity readout_error(const JointDensity& joint, double f_r) {
  if (!(f_r >= 0.5 && f_r <= 1.0)) throw ValidationError("f_r", f_r, "must lie in [0.5, 1]");
  const Matrix4c x = spin_operator(pauli_x());
  return joint.with_matrix(f_r * joint.matrix() + (1.0 - f_r) * x * joint.matrix() * x);
}

SpinDensity readout_error(const SpinDensity& spin, double f_r) {
  if (!(f_r >= 0.5 && f_r <= 1.0)) throw ValidationError("f_r", f_r, "must lie in [0.5, 1]");
  const Matrix2c x = pauli_x();
  return SpinDensity(f_r * spin.matrix() + (1.0 - f_r) * x * spin.matrix() * x);
}

EchoFactors spin_echo_factor(double delta_g, double t0, double t_pi, double t_r) {
  if (!(t0 <= t_pi && t_pi <= t_r)) {
    throw ValidationError("t_pi", t_pi, "echo timing requires t0 <= t_pi <= t_r");
  }
  const double x = 2.0 * t_pi - t_r - t0;
  return EchoFactors{std::exp(cplx(0.0, 0.5 * delta_g * x)),
                     -std::exp(cplx(0.0, -0.5 * delta_g * x))};
}

double echo_contrast(double sigma_g, double dt) {
  return std::exp(-0.5 * sigma_g * sigma_g * dt * dt);
}

// ---------------------------------------------------------------------------

namespace {

struct PipelineContext {
  const EmitterParams& emitter;
  const ChannelConfig& channels;
  JointDensity input;
  Matrix2c photonic;
  double jump_prob = 0.0;
  double p_d = 0.0;
};

JointDensity rotate(const JointDensity& j, const RotationPulse& pulse, const PipelineContext& ctx) {
  if (!ctx.channels.enable_spin_flip) return ideal_rotation(j, pulse);
  return depolarizing_rotation(j, pulse, ctx.emitter, ctx.channels.flip_noise, ctx.photonic);
}

JointDensity scatter_step(const JointDensity& j, TimeBin bin, const ScatterAmplitudes& amps,
                          bool reflected, const PipelineContext& ctx) {
  const int up = bin_offset(bin);
  const double pre = j(up, up).real();
  JointDensity out = reflected ? scatter_timebin(j, bin, amps) : transmit_timebin(j, bin, amps);
  if (reflected && ctx.jump_prob > 0.0) {
    Matrix4c m = out.matrix();
    m(up, up) += ctx.jump_prob * pre;
    out = out.with_matrix(m);
  }
  if (ctx.p_d > 0.0) out = phase_damping(out, ctx.p_d);
  return out;
}

Matrix4c evolve(const ScatterAmplitudes& early, const ScatterAmplitudes& late, bool reflected,
                const PipelineContext& ctx) {
  JointDensity j = rotate(ctx.input, ctx.channels.half_pi, ctx);
  j = scatter_step(j, TimeBin::early, early, reflected, ctx);
  j = rotate(j, ctx.channels.pi, ctx);
  j = scatter_step(j, TimeBin::late, late, reflected, ctx);
  if (ctx.channels.enable_readout_error) j = readout_error(j, ctx.channels.readout_fidelity);
  return j.matrix();
}

double phi_minus_fidelity(const Matrix4c& rho, double theta_p) {
  const double tr = rho.trace().real();
  if (!(tr > 0.0)) return 0.0;
  const Eigen::Vector4cd psi = bell_vector(BellTarget::phi_minus, theta_p);
  return (psi.adjoint() * rho * psi)(0, 0).real() / tr;
}

}  // namespace

GateOutcome run_gate(const EmitterParams& emitter, const PulseParams& pulse,
                     const ChannelConfig& channels, double theta_p) {
  validate(emitter);
  validate(pulse);
  validate(channels);

  const double amp = 1.0 / std::sqrt(2.0);
  const cplx alpha = amp;
  const cplx beta = amp * std::exp(cplx(0.0, theta_p));
  PipelineContext ctx{emitter, channels, JointDensity::product(alpha, beta, SpinDensity::down()),
                      Matrix2c::Zero()};
  Eigen::Vector2cd photon(alpha, beta);
  ctx.photonic = photon * photon.adjoint();
  if (channels.enable_pure_dephasing) {
    ctx.jump_prob = channels.fixed_amplitudes
                        ? pure_dephasing_probability(emitter)
                        : pure_dephasing_probability(emitter, pulse, channels.spectral);
  }
  if (channels.enable_driving_dephasing) ctx.p_d = driving_dephasing_prob(pulse, emitter);

  GateOutcome out;
  Matrix4c reflected;
  std::optional<Matrix4c> transmitted;
  if (channels.fixed_amplitudes) {
    const ScatterAmplitudes& a = *channels.fixed_amplitudes;
    reflected = evolve(a, a, true, ctx);
    if (channels.keep_transmitted) transmitted = evolve(a, a, false, ctx);
  } else {
    const bool keep = channels.keep_transmitted;
    auto g = [&](double d) -> Eigen::VectorXd {
      const ScatterAmplitudes early = coefficients_at(emitter, d);
      const ScatterAmplitudes late = channels.late_bin_mismatch == 0.0
                                         ? early
                                         : coefficients_at(emitter, d + channels.late_bin_mismatch);
      Eigen::VectorXd v(keep ? 64 : 32);
      v.head(32) = flatten(evolve(early, late, true, ctx));
      if (keep) v.tail(32) = flatten(evolve(early, late, false, ctx));
      return v;
    };
    const Eigen::VectorXd v = spectral_average(emitter, pulse, g, channels.spectral,
                                               &out.error_bound);
    reflected = unflatten(v, 0);
    if (keep) transmitted = unflatten(v, 32);
  }

  out.rho_heralded = JointDensity(reflected)
                         .with_scattered(TimeBin::early)
                         .with_scattered(TimeBin::late);
  out.success_prob = out.rho_heralded.trace();
  out.fidelity = phi_minus_fidelity(reflected, theta_p);
  if (transmitted) {
    out.rho_transmitted =
        JointDensity(*transmitted).with_scattered(TimeBin::early).with_scattered(TimeBin::late);
  }
  if (out.success_prob < 1e-6) out.warnings.push_back("success probability below 1e-6");
  if (out.success_prob > 0.5 + 1e-10) {
    out.warnings.push_back("heralded trace above 1/2 from photonic-input flip weighting");
  }

  if (channels.compute_budget) {
    ChannelConfig spectral = ChannelConfig::all_off();
    spectral.enable_pure_dephasing = channels.enable_pure_dephasing;
    spectral.fixed_amplitudes = channels.fixed_amplitudes;
    spectral.late_bin_mismatch = channels.late_bin_mismatch;
    spectral.spectral = channels.spectral;

    ChannelConfig flip = ChannelConfig::all_off();
    flip.enable_spin_flip = channels.enable_spin_flip;
    flip.enable_readout_error = channels.enable_readout_error;
    flip.readout_fidelity = channels.readout_fidelity;
    flip.half_pi = channels.half_pi;
    flip.pi = channels.pi;
    flip.flip_noise = channels.flip_noise;
    flip.fixed_amplitudes = ideal_amplitudes();

    ChannelConfig driving = ChannelConfig::all_off();
    driving.enable_driving_dephasing = channels.enable_driving_dephasing;
    driving.fixed_amplitudes = ideal_amplitudes();

    out.budget.push_back({"spectral_pure_dephasing", run_gate(emitter, pulse, spectral, theta_p).fidelity});
    out.budget.push_back({"spin_flip_readout", run_gate(emitter, pulse, flip, theta_p).fidelity});
    out.budget.push_back({"driving_dephasing", run_gate(emitter, pulse, driving, theta_p).fidelity});
  }
  return out;
}

}  // namespace tbgate

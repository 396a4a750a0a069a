#include "tbgate/metrics.hpp"
#include "tbgate/presets.hpp"
#include "tbgate/protocol.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace tbgate;

namespace {

JointDensity random_state(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Matrix4cd a;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = cplx(n(rng), n(rng));
  Matrix4c m = a * a.adjoint();
  m /= m.trace().real();
  return JointDensity(m, true);
}

ChannelConfig flip_only(double f_r = 1.0) {
  ChannelConfig c = ChannelConfig::all_off();
  c.enable_spin_flip = true;
  c.fixed_amplitudes = ideal_amplitudes();
  if (f_r < 1.0) {
    c.enable_readout_error = true;
    c.readout_fidelity = f_r;
  }
  return c;
}

Matrix2c projector(cplx a, cplx b) {
  Eigen::Vector2cd v(a, b);
  return v * v.adjoint();
}

}  // namespace

TEST_SUITE("protocol") {

TEST_CASE("ideal rotations") {
  const double c = std::sqrt(0.5);
  const RotationPulse half = RotationPulse::y(kPi / 2.0, 3.5);
  const RotationPulse pi = RotationPulse::y(kPi, 7.0);
  // (up, down) ordering: |+> = (up + down)/sqrt2.
  const SpinDensity plus = ideal_rotation(SpinDensity::down(), half);
  CHECK((plus.matrix() - projector(c, c)).norm() < 1e-14);
  const SpinDensity minus = ideal_rotation(plus, pi);
  CHECK((minus.matrix() - projector(c, -c)).norm() < 1e-14);
  CHECK(std::abs((plus.matrix() * minus.matrix()).trace()) < 1e-14);
  const SpinDensity back = ideal_rotation(ideal_rotation(plus, pi), pi);
  CHECK((back.matrix() - plus.matrix()).norm() < 1e-14);
  const SpinDensity up = ideal_rotation(SpinDensity::down(), pi);
  CHECK(up(0, 0).real() == doctest::Approx(1.0));
}

TEST_CASE("rotation fidelity of the measured pulses") {
  EmitterParams e = presets::measured_emitter();
  const RotationPulse pi = RotationPulse::y(kPi, 7.0);
  const double p = 1.0 - std::exp(-0.021 * 7.0);
  const double f = 1.0 - 2.0 / (kPi * kPi) * std::pow(7.0 / 23.2, 2);
  CHECK(rotation_fidelity(pi, e).total == doctest::Approx((1.0 - p) * f + 0.5 * p).epsilon(1e-14));
  CHECK(rotation_fidelity(pi, e).total == doctest::Approx(0.916).epsilon(0.0005 / 0.916));
  e.t2_star = 21.4;
  CHECK(rotation_fidelity(pi, e).total == doctest::Approx(0.912).epsilon(0.0005 / 0.912));
  e.t2_star = 7.0 / (kPi / std::sqrt(2.0)) * 1.01;
  CHECK_NOTHROW(rotation_fidelity(pi, e));
  e.t2_star = 7.0 / (kPi / std::sqrt(2.0)) * 0.99;
  try {
    rotation_fidelity(pi, e);
    FAIL("expected ValidationError");
  } catch (const ValidationError& ex) {
    CHECK(ex.field() == "t2_star");
    CHECK(std::string(ex.what()).find("rotation outside validity of coherent-fidelity model") !=
          std::string::npos);
  }
}

TEST_CASE("depolarizing rotation without errors is the ideal rotation") {
  EmitterParams e = presets::measured_emitter();
  e.kappa_flip = 0.0;
  e.t2_star = 1e12;
  const RotationPulse half = RotationPulse::y(kPi / 2.0, 3.5);
  const SpinDensity s = SpinDensity::pure(0.6, cplx(0.0, 0.8));
  CHECK((depolarizing_rotation(s, half, e).matrix() - ideal_rotation(s, half).matrix()).norm() <
        1e-12);
  std::mt19937_64 rng(5);
  const JointDensity j = random_state(rng);
  const JointDensity a = depolarizing_rotation(j, half, e, FlipNoiseWeighting::heralded_trace,
                                               Matrix2c::Identity() / 2.0);
  CHECK((a.matrix() - ideal_rotation(j, half).matrix()).norm() < 1e-12);
}

TEST_CASE("pi-pulse flip noise against its closed form") {
  EmitterParams e = presets::measured_emitter();
  const RotationPulse pi = RotationPulse::y(kPi, 7.0);
  const SpinDensity out = depolarizing_rotation(SpinDensity::down(), pi, e);
  // Population left in |up| equals the rotation fidelity for a pi pulse.
  CHECK(out(0, 0).real() == doctest::Approx(rotation_fidelity(pi, e).total).epsilon(1e-13));
  CHECK(out.trace() == doctest::Approx(1.0));
}

TEST_CASE("scattering with ideal amplitudes removes early spin-down") {
  JointDensity j = JointDensity::equal_superposition(0.0, SpinDensity::down());
  j = ideal_rotation(j, RotationPulse::y(kPi / 2.0, 3.5));
  const JointDensity s = scatter_timebin(j, TimeBin::early, ideal_amplitudes());
  CHECK(std::abs(s(kEarlyDown, kEarlyDown)) < 1e-15);
  CHECK(s(kEarlyUp, kEarlyUp).real() == doctest::Approx(0.25));
  CHECK(s(kLateDown, kLateDown).real() == doctest::Approx(0.25));
  CHECK(s.scattered(TimeBin::early));
  CHECK_THROWS_AS(scatter_timebin(s, TimeBin::early, ideal_amplitudes()), ValidationError);
  CHECK_NOTHROW(scatter_timebin(s, TimeBin::late, ideal_amplitudes()));
}

TEST_CASE("scattered trace follows the bin populations") {
  std::mt19937_64 rng(9);
  ScatterAmplitudes a{};
  a.r1 = std::sqrt(0.9);
  a.r1_off = cplx(0.0, 0.1);
  for (int i = 0; i < 20; ++i) {
    const JointDensity j = random_state(rng);
    const JointDensity s = scatter_timebin(j, TimeBin::late, a);
    const double expect = j(0, 0).real() + j(1, 1).real() + 0.9 * j(2, 2).real() +
                          0.01 * j(3, 3).real();
    CHECK(s.trace() == doctest::Approx(expect).epsilon(1e-13));
    CHECK(s.is_physical());
  }
}

TEST_CASE("phase damping composes multiplicatively") {
  const JointDensity j = JointDensity::from_pure(bell_vector(BellTarget::psi_plus));
  const JointDensity d = phase_damping(phase_damping(j, 0.1), 0.1);
  CHECK(std::abs(d(kEarlyUp, kLateDown) - 0.81 * j(kEarlyUp, kLateDown)) < 1e-15);
  CHECK((phase_damping(j, 0.0).matrix() - j.matrix()).norm() < 1e-15);
  const JointDensity full = phase_damping(j, 1.0);
  CHECK(std::abs(full(kEarlyUp, kLateDown)) < 1e-15);
  CHECK(full(kEarlyUp, kEarlyUp).real() == doctest::Approx(0.5));
  // Photonic coherence between equal spin states survives.
  const JointDensity f = JointDensity::from_pure(bell_vector(BellTarget::phi_minus));
  const Matrix4c m = phase_damping(JointDensity::product(std::sqrt(0.5), std::sqrt(0.5),
                                                         SpinDensity::up()),
                                   1.0)
                         .matrix();
  CHECK(std::abs(m(kEarlyUp, kLateUp) - 0.5) < 1e-15);
  CHECK(std::abs(phase_damping(f, 1.0)(kEarlyDown, kLateUp)) < 1e-15);
  CHECK_THROWS_AS(phase_damping(j, 1.5), ValidationError);
}

TEST_CASE("driving dephasing limits") {
  EmitterParams e = presets::measured_emitter();
  PulseParams p = presets::measured_pulse();
  p.n_bar = 0.0;
  CHECK(driving_dephasing_prob(p, e) == 0.0);
  EmitterParams lossless = e;
  lossless.gamma1_loss = lossless.gamma2_loss = 0.0;
  lossless.cyclicity.reset();
  CHECK(driving_scatter_sum(lossless) == doctest::Approx(1.0));
  p.n_bar = 0.3;
  CHECK(driving_dephasing_prob(p, lossless) == doctest::Approx(1.0 - std::exp(-0.3)));
  const double g = e.gamma_total_rad();
  const double sum = 1.0 - 2.0 * (0.1 / g) * (1.0 - 1.0 / 15.7 - 0.05 / g);
  CHECK(driving_scatter_sum(e) == doctest::Approx(sum).epsilon(1e-14));
}

TEST_CASE("pure dephasing probability and injection") {
  EmitterParams e = presets::measured_emitter();
  const double g = e.gamma_total_deph();
  const double j = 2.0 * 0.092 / g;
  const double k = 1.0 - 1.0 / 15.7;
  const double l = 0.05 / g;
  CHECK(pure_dephasing_probability(e) ==
        doctest::Approx(j * (k - l) * (k * (1.0 - j) - l)).epsilon(1e-14));
  const Matrix4c m = pure_dephasing_injection(e, 1.0, 0.0);
  CHECK(m(kEarlyDown, kEarlyDown).real() == doctest::Approx(0.5 * pure_dephasing_probability(e)));
  CHECK(std::abs(m(kLateUp, kLateUp)) == 0.0);
  e.gamma_dephase = 0.0;
  CHECK(pure_dephasing_probability(e) == 0.0);
}

TEST_CASE("detuned jump probability follows the coherent overlap") {
  const EmitterParams e = presets::measured_emitter();
  PulseParams p = presets::measured_pulse();
  CHECK(pure_dephasing_probability(e, p) == pure_dephasing_probability(e));
  const double on = overlap_integrals(e, p).i_res;
  p.detuning = 0.4;
  const double off = overlap_integrals(e, p).i_res;
  CHECK(pure_dephasing_probability(e, p) ==
        doctest::Approx(pure_dephasing_probability(e) * off / on).epsilon(1e-12));
  CHECK(pure_dephasing_probability(e, p) < pure_dephasing_probability(e));
}

TEST_CASE("pure dephasing alone matches the conditional-fidelity formula") {
  const EmitterParams e = presets::measured_emitter();
  ChannelConfig c = ChannelConfig::all_off();
  c.enable_pure_dephasing = true;
  c.fixed_amplitudes = ideal_amplitudes();
  const GateOutcome g = run_gate(e, presets::measured_pulse(), c);
  OverlapIntegrals o;
  o.i_res = 1.0;
  const double p = pure_dephasing_probability(e);
  CHECK(g.fidelity == doctest::Approx(conditional_fidelity_formula(o, p)).epsilon(1e-13));
  CHECK(g.success_prob == doctest::Approx(0.5 * (1.0 + p)).epsilon(1e-13));
}

TEST_CASE("readout error") {
  const JointDensity bell = JointDensity::from_pure(bell_vector(BellTarget::phi_minus));
  CHECK((readout_error(bell, 1.0).matrix() - bell.matrix()).norm() < 1e-15);
  CHECK(bell_fidelity(readout_error(bell, 0.5)) == doctest::Approx(0.5));
  CHECK(bell_fidelity(readout_error(bell, 0.966)) == doctest::Approx(0.966));
  CHECK_THROWS_AS(readout_error(bell, 0.4), ValidationError);
  const SpinDensity s = readout_error(SpinDensity::up(), 0.9);
  CHECK(s(1, 1).real() == doctest::Approx(0.1));
}

TEST_CASE("spin echo factors") {
  const EchoFactors f = spin_echo_factor(0.37, 0.0, 5.0, 10.0);
  CHECK(std::abs(f.up - cplx(1.0, 0.0)) < 1e-15);
  CHECK(std::abs(f.down - cplx(-1.0, 0.0)) < 1e-15);
  const EchoFactors z = spin_echo_factor(0.0, 0.0, 4.0, 10.0);
  CHECK(std::abs(z.up / z.down + 1.0) < 1e-15);
  CHECK_THROWS_AS(spin_echo_factor(0.1, 0.0, 11.0, 10.0), ValidationError);

  // Sampled contrast against the Gaussian decay.
  const double sigma = 1.0 / 23.2, dt = 6.0;
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n(0.0, sigma);
  cplx sum = 0.0;
  const int samples = 100000;
  for (int i = 0; i < samples; ++i) {
    const EchoFactors e = spin_echo_factor(n(rng), 0.0, 8.0, 10.0);
    sum += e.up / e.down;
  }
  const double sampled = std::abs(sum) / samples;
  CHECK(std::abs(sampled - echo_contrast(sigma, dt)) < 5.0 / std::sqrt(double(samples)));
  CHECK(echo_contrast(sigma, 0.0) == 1.0);
}

TEST_CASE("ideal gate") {
  ChannelConfig c = ChannelConfig::all_off();
  c.fixed_amplitudes = ideal_amplitudes();
  const GateOutcome g = run_gate(presets::measured_emitter(), presets::measured_pulse(), c);
  CHECK(g.fidelity == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(g.success_prob == doctest::Approx(0.5).epsilon(1e-14));
  const GateOutcome t = run_gate(presets::measured_emitter(), presets::measured_pulse(), c, 0.7);
  CHECK(t.fidelity == doctest::Approx(1.0).epsilon(1e-14));

  const Config ideal = presets::ideal();
  const GateOutcome q = run_gate(ideal.emitter, ideal.pulse, ideal.channels);
  CHECK(q.fidelity > 0.9999);
  CHECK(q.success_prob <= 0.5);
}

TEST_CASE("channels preserve positivity and trace on random draws") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const JointDensity j = random_state(rng);
    EmitterParams e = presets::measured_emitter();
    e.kappa_flip = 0.1 * u(rng);
    e.t2_star = 8.0 + 40.0 * u(rng);
    const RotationPulse r = u(rng) < 0.5 ? RotationPulse::y(kPi, 7.0)
                                         : RotationPulse::y(kPi / 2.0, 3.5);
    const JointDensity outs[] = {
        depolarizing_rotation(j, r, e, FlipNoiseWeighting::heralded_trace, Matrix2c::Zero()),
        phase_damping(j, u(rng)),
        readout_error(j, 0.5 + 0.5 * u(rng)),
        ideal_rotation(j, r),
    };
    for (const auto& o : outs) {
      if (!o.is_physical(1e-12) || std::abs(o.trace() - 1.0) > 1e-12) ++violations;
    }
    ScatterAmplitudes a = coefficients_at(e, 4.0 * (u(rng) - 0.5));
    const JointDensity s = scatter_timebin(j, u(rng) < 0.5 ? TimeBin::early : TimeBin::late, a);
    if (!s.is_physical(1e-12) || s.trace() > 1.0 + 1e-12) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("heralded trace stays below one half in trace-weighted mode") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    EmitterParams e = presets::measured_emitter();
    e.kappa_flip = 0.05 * u(rng);
    ChannelConfig c = flip_only();
    c.flip_noise = FlipNoiseWeighting::heralded_trace;
    const GateOutcome g = run_gate(e, presets::measured_pulse(), c);
    CHECK(g.success_prob <= 0.5 + 1e-12);
    CHECK(g.rho_heralded.is_physical(1e-12));
  }
}

TEST_CASE("photonic-input flip weighting exceeds one half") {
  const GateOutcome g =
      run_gate(presets::measured_emitter(), presets::measured_pulse(), flip_only());
  CHECK(g.success_prob > 0.5);
  CHECK(g.success_prob == doctest::Approx(0.534).epsilon(0.001 / 0.534));
  CHECK_FALSE(g.warnings.empty());
  CHECK(g.fidelity == doctest::Approx(0.8294).epsilon(0.0005 / 0.8294));
}

TEST_CASE("order of the echo pulse matters") {
  const EmitterParams e = presets::measured_emitter();
  const ScatterAmplitudes a = coefficients_at(e, 0.0);
  const RotationPulse half = RotationPulse::y(kPi / 2.0, 3.5), pi = RotationPulse::y(kPi, 7.0);
  const JointDensity in = JointDensity::equal_superposition(0.0, SpinDensity::down());
  JointDensity forward = ideal_rotation(in, half);
  forward = scatter_timebin(forward, TimeBin::early, a);
  forward = ideal_rotation(forward, pi);
  forward = scatter_timebin(forward, TimeBin::late, a);
  JointDensity swapped = ideal_rotation(in, half);
  swapped = ideal_rotation(swapped, pi);
  swapped = scatter_timebin(swapped, TimeBin::early, a);
  swapped = scatter_timebin(swapped, TimeBin::late, a);
  CHECK(bell_fidelity(forward) > 0.99);
  CHECK(bell_fidelity(swapped) < 0.6);
}

TEST_CASE("flip infidelity is linear in the flip rate") {
  EmitterParams e = presets::measured_emitter();
  e.t2_star = 1e9;
  const PulseParams p = presets::measured_pulse();
  auto fidelity = [&](double kappa) {
    e.kappa_flip = kappa;
    return run_gate(e, p, flip_only()).fidelity;
  };
  const double f0 = fidelity(0.0);
  CHECK(f0 == doctest::Approx(1.0));
  for (double kappa : {0.021, 0.005}) {
    const double ratio = (f0 - fidelity(kappa / 2.0)) / (f0 - fidelity(kappa));
    CHECK(ratio == doctest::Approx(0.5).epsilon(0.05));
  }
}

TEST_CASE("detuning changes efficiency but not fidelity") {
  Config cfg = presets::measured();
  // Photonic-input flip weighting does not scale with the heralded trace.
  cfg.channels.flip_noise = FlipNoiseWeighting::heralded_trace;
  const PulseParams base = cfg.pulse;
  const GateOutcome g0 = run_gate(cfg.emitter, base, cfg.channels);
  for (double d : {-base.sigma_e, base.sigma_e}) {
    PulseParams p = base;
    p.detuning = d;
    const GateOutcome g = run_gate(cfg.emitter, p, cfg.channels);
    CHECK(std::abs(g.fidelity - g0.fidelity) < 1e-3);
    CHECK(g.success_prob < g0.success_prob);
  }
}

TEST_CASE("unequal bin amplitudes lower the fidelity") {
  ChannelConfig c = ChannelConfig::all_off();
  const EmitterParams e = presets::measured_emitter();
  const PulseParams p = presets::measured_pulse();
  const double f0 = run_gate(e, p, c).fidelity;
  c.late_bin_mismatch = 1.0;
  CHECK(run_gate(e, p, c).fidelity < f0 - 1e-3);
}

TEST_CASE("transmitted branch") {
  ChannelConfig c = ChannelConfig::all_off();
  c.keep_transmitted = true;
  const GateOutcome g = run_gate(presets::measured_emitter(), presets::measured_pulse(), c);
  REQUIRE(g.rho_transmitted.has_value());
  CHECK(g.rho_transmitted->is_physical(1e-10));
  CHECK(g.rho_transmitted->trace() > 0.0);
  CHECK(g.success_prob + g.rho_transmitted->trace() <= 1.0 + 1e-10);
}

TEST_CASE("budget rows") {
  ChannelConfig c = presets::measured_channels();
  c.compute_budget = true;
  const GateOutcome g = run_gate(presets::measured_emitter(), presets::measured_pulse(), c);
  REQUIRE(g.budget.size() == 3);
  CHECK(g.budget[1].multiplier == doctest::Approx(0.8024).epsilon(0.0005 / 0.8024));
  CHECK(g.budget[2].multiplier ==
        doctest::Approx(driving_dephasing_fidelity(presets::measured_pulse(),
                                                   presets::measured_emitter()))
            .epsilon(1e-13));
}

}  // TEST_SUITE

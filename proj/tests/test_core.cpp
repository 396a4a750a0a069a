#include "tbgate/core.hpp"
#include "tbgate/presets.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace tbgate;

TEST_SUITE("core") {

TEST_CASE("cyclicity of the transition pair") {
  EmitterParams p;
  p.gamma1_wg = 2.32;
  p.gamma2_wg = 0.158;
  p.delta_h = 1.0;
  CHECK(p.cyclicity_transition() == doctest::Approx(14.683544).epsilon(1e-6));
  CHECK(p.cyclicity_transition() == doctest::Approx(14.7).epsilon(2e-3));
  CHECK(std::isinf(p.cyclicity_channel()));
  CHECK(p.inv_cyclicity_plus_one() == 0.0);
}

TEST_CASE("zero rates are rejected") {
  EmitterParams p;
  p.delta_h = 1.0;
  try {
    validate(p);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("gamma_total_rad must be positive") != std::string::npos);
  }
}

TEST_CASE("measured parameters validate") {
  const EmitterParams e = presets::measured_emitter();
  CHECK_NOTHROW(validate(e));
  CHECK_NOTHROW(validate(presets::measured_pulse()));
  CHECK(e.gamma_total_rad() == doctest::Approx(2.48).epsilon(1e-12));
  CHECK(e.gamma1_wg / e.gamma2_wg == doctest::Approx(14.7).epsilon(1e-12));
  CHECK(e.delta_h == doctest::Approx(2.0 * kPi * 7.3).epsilon(1e-12));
  CHECK(e.effective_cyclicity() == 14.7);
  CHECK(e.inv_cyclicity_plus_one() == doctest::Approx(1.0 / 15.7));
}

TEST_CASE("invalid fields name themselves") {
  EmitterParams e = presets::measured_emitter();
  e.beta_factor = 1.2;
  CHECK_THROWS_AS(validate(e), ValidationError);
  e = presets::measured_emitter();
  e.split1_r = -0.1;
  try {
    validate(e);
    FAIL("expected ValidationError");
  } catch (const ValidationError& ex) {
    CHECK(ex.field() == "split1_r");
  }
  e = presets::measured_emitter();
  e.gamma_dephase = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(validate(e), ValidationError);

  PulseParams p = presets::measured_pulse();
  p.t_pulse = 3.0;
  CHECK_THROWS_AS(validate(p), ValidationError);
}

TEST_CASE("derived rates against hand formulas on random draws") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 3.0), s(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    EmitterParams p;
    p.gamma1_wg = u(rng) + 0.01;
    p.gamma2_wg = u(rng);
    p.gamma1_loss = 0.1 * u(rng);
    p.gamma2_loss = 0.1 * u(rng);
    p.gamma_dephase = 0.1 * u(rng);
    p.delta_h = 10.0 * u(rng) + 0.1;
    p.split1_r = s(rng);
    p.split2_r = s(rng);
    REQUIRE_NOTHROW(validate(p));
    const double g = p.gamma1_wg + p.gamma2_wg + p.gamma1_loss + p.gamma2_loss;
    CHECK(p.gamma_total_rad() == doctest::Approx(g).epsilon(1e-14));
    CHECK(p.gamma_total_deph() == doctest::Approx(g + 2.0 * p.gamma_dephase).epsilon(1e-14));
    CHECK(p.cyclicity_transition() ==
          doctest::Approx((p.gamma1_wg + p.gamma1_loss) / (p.gamma2_wg + p.gamma2_loss)));
    CHECK(p.cyclicity_channel() ==
          doctest::Approx((p.gamma1_wg + p.gamma2_wg) / (p.gamma1_loss + p.gamma2_loss)));
    CHECK(p.inv_cyclicity_plus_one() == doctest::Approx(1.0 / (p.cyclicity_channel() + 1.0)));
    CHECK(p.gamma1_r() + p.gamma1_t() == doctest::Approx(p.gamma1_wg));
    CHECK(p.gamma2_r() + p.gamma2_t() == doctest::Approx(p.gamma2_wg));
  }
}

TEST_CASE("pulse from duration") {
  const PulseParams p = PulseParams::from_duration(2.0, 0.3, 0.1, 0.05);
  CHECK(p.sigma_o == doctest::Approx(0.25));
  CHECK(p.sigma_e == 0.3);
  CHECK(p.detuning == 0.1);
  CHECK(p.n_bar == 0.05);
  CHECK_NOTHROW(validate(p));
}

TEST_CASE("rotation unitaries") {
  const RotationPulse half = RotationPulse::y(kPi / 2.0, 3.5);
  const Matrix2c u = half.unitary();
  CHECK((u * u.adjoint() - Matrix2c::Identity()).norm() < 1e-14);
  const double c = std::sqrt(0.5);
  CHECK(std::abs(u(0, 0) - c) < 1e-14);
  CHECK(std::abs(u(0, 1) - c) < 1e-14);
  CHECK(std::abs(u(1, 0) + c) < 1e-14);
  CHECK(std::abs(u(1, 1) - c) < 1e-14);
  CHECK(half.rabi() == doctest::Approx(kPi / 7.0));

  RotationPulse x = half;
  x.axis = RotationAxis::x;
  const Matrix2c ux = x.unitary();
  CHECK(std::abs(ux(0, 1) - cplx(0.0, c)) < 1e-14);
  CHECK((ux * ux.adjoint() - Matrix2c::Identity()).norm() < 1e-14);

  RotationPulse bad = half;
  bad.duration = 0.0;
  CHECK_THROWS_AS(validate(bad), ValidationError);
}

TEST_CASE("spin density invariants") {
  CHECK_NOTHROW(SpinDensity::up().check());
  CHECK_NOTHROW(SpinDensity::pure(cplx(0.6, 0.0), cplx(0.0, 0.8)).check());
  Matrix2c m;
  m << 0.5, 0.6, 0.6, 0.5;
  CHECK_THROWS_AS(SpinDensity(m).check(), ValidationError);
  m << 0.5, cplx(0.1, 0.1), cplx(0.1, 0.1), 0.5;
  CHECK_THROWS_AS(SpinDensity(m).check(), ValidationError);
}

TEST_CASE("joint states from random parameters are physical") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const cplx a(n(rng), n(rng)), b(n(rng), n(rng));
    const double na = std::sqrt(std::norm(a) + std::norm(b));
    const cplx su(n(rng), n(rng)), sd(n(rng), n(rng));
    const double ns = std::sqrt(std::norm(su) + std::norm(sd));
    const JointDensity j = JointDensity::product(a / na, b / na, SpinDensity::pure(su / ns, sd / ns));
    CHECK(j.is_physical());
    CHECK(j.trace() == doctest::Approx(1.0));
    CHECK_FALSE(j.scattered(TimeBin::early));
  }
  const JointDensity s = JointDensity::equal_superposition(0.4, SpinDensity::down());
  CHECK(std::abs(s(kLateDown, kEarlyDown) - 0.5 * std::polar(1.0, 0.4)) < 1e-14);
  CHECK(s.with_scattered(TimeBin::late).scattered(TimeBin::late));

  Matrix4c bad = Matrix4c::Zero();
  bad(0, 0) = 1.0;
  bad(1, 1) = -0.1;
  CHECK_FALSE(JointDensity(bad).is_physical());
  CHECK(min_eigenvalue(bad) == doctest::Approx(-0.1));
}

TEST_CASE("bell vectors") {
  for (BellTarget t : {BellTarget::phi_minus, BellTarget::phi_plus, BellTarget::psi_minus,
                       BellTarget::psi_plus}) {
    CHECK(bell_vector(t, 0.3).norm() == doctest::Approx(1.0));
  }
  const Eigen::Vector4cd phi = bell_vector(BellTarget::phi_minus);
  CHECK(std::abs(phi(kEarlyDown) - std::sqrt(0.5)) < 1e-15);
  CHECK(std::abs(phi(kLateUp) + std::sqrt(0.5)) < 1e-15);
  CHECK(std::abs(bell_vector(BellTarget::phi_minus).dot(bell_vector(BellTarget::phi_plus))) < 1e-15);
  const JointDensity rho = JointDensity::from_pure(phi);
  CHECK(rho.expectation(phi) == doctest::Approx(1.0));
  CHECK(hermiticity_defect(rho.matrix()) < 1e-15);
}

}  // TEST_SUITE

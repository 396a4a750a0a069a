#include "tbgate/presets.hpp"
#include "tbgate/quadrature.hpp"
#include "tbgate/scattering.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace tbgate;

namespace {

// Lossless two-level mirror: Gamma_2 = gamma = gamma_d = 0.
EmitterParams mirror(double gamma = 2.48, double delta_h = kTwoPi * 7.3) {
  EmitterParams p;
  p.gamma1_wg = gamma;
  p.delta_h = delta_h;
  p.t2_star = 1e9;
  return p;
}

PulseParams narrow(double sigma_o) {
  PulseParams p;
  p.sigma_o = sigma_o;
  p.t_pulse = 1.0 / (2.0 * sigma_o);
  return p;
}

SpectralOptions tight() {
  SpectralOptions o;
  o.quad.abs_tol = 1e-14;
  return o;
}

}  // namespace

TEST_SUITE("scattering") {

TEST_CASE("ideal mirror on resonance") {
  const ScatterAmplitudes a = coefficients_at(mirror(), 0.0);
  CHECK(std::abs(a.r1 - cplx(-1.0, 0.0)) < 1e-15);
  CHECK(std::abs(a.t1) < 1e-15);
  CHECK(std::abs(a.r2) < 1e-15);
  CHECK(std::abs(a.t2) < 1e-15);
}

TEST_CASE("half-power point at half the linewidth") {
  const EmitterParams p = mirror();
  const ScatterAmplitudes a = coefficients_at(p, p.gamma_total_rad() / 2.0);
  CHECK(std::norm(a.r1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::norm(a.t1) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("off-resonant reflection is suppressed by the splitting") {
  const EmitterParams p = presets::measured_emitter();
  const ScatterAmplitudes a = coefficients_at(p, 0.0);
  const double g = p.gamma_total_deph();
  const double ratio = std::norm(a.r1_off) / std::norm(a.r1);
  CHECK(ratio == doctest::Approx(g * g / (g * g + 4.0 * p.delta_h * p.delta_h)).epsilon(1e-12));
  CHECK(ratio > 5e-4);
  CHECK(ratio < 1.5e-3);
}

TEST_CASE("lossless emitter conserves probability") {
  EmitterParams p;
  p.gamma1_wg = 2.2;
  p.gamma2_wg = 0.4;
  p.split1_r = 0.5;
  p.split2_r = 0.3;
  p.delta_h = 20.0;
  for (int i = 0; i < 1000; ++i) {
    const double d = -60.0 + 120.0 * i / 999.0;
    const ScatterAmplitudes a = coefficients_at(p, d);
    // Diagonal-transition photons leave in the other frequency mode, so the
    // resonant channel keeps r1, t1 and loses weight into r2, t2.
    CHECK(a.resonant_norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a.off_resonant_norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("detuning symmetry") {
  const EmitterParams p = presets::measured_emitter();
  for (double d : {0.1, 0.7, 2.5, 11.0}) {
    const ScatterAmplitudes a = coefficients_at(p, d), b = coefficients_at(p, -d);
    CHECK(std::norm(a.r1) == doctest::Approx(std::norm(b.r1)).epsilon(1e-14));
    CHECK(std::abs(a.r1 - std::conj(b.r1)) < 1e-14);
  }
}

TEST_CASE("gauss-kronrod on known integrals") {
  const QuadratureResult s = integrate_gk15([](double x) { return std::sin(x); }, 0.0, kPi);
  CHECK(s.converged);
  CHECK(s.value(0) == doctest::Approx(2.0).epsilon(1e-13));
  const QuadratureResult l =
      integrate_gk15([](double x) { return 1.0 / (1.0 + x * x); }, -50.0, 50.0);
  CHECK(l.converged);
  CHECK(l.value(0) == doctest::Approx(2.0 * std::atan(50.0)).epsilon(1e-11));

  QuadratureOptions starved;
  starved.abs_tol = 1e-16;
  starved.max_intervals = 2;
  const QuadratureResult bad = integrate_gk15(
      [](double x) { return 1.0 / (1e-6 + x * x); }, -1.0, 1.0, starved);
  CHECK_FALSE(bad.converged);
}

TEST_CASE("gauss-hermite moments") {
  const HermiteRule h = gauss_hermite(41);
  double w = 0.0, m2 = 0.0, m4 = 0.0, m6 = 0.0;
  for (std::size_t i = 0; i < h.nodes.size(); ++i) {
    const double x = h.nodes[i];
    w += h.weights[i];
    m2 += h.weights[i] * x * x;
    m4 += h.weights[i] * x * x * x * x;
    m6 += h.weights[i] * std::pow(x, 6);
  }
  CHECK(w == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(m2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m4 == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(m6 == doctest::Approx(15.0).epsilon(1e-12));
}

TEST_CASE("monochromatic limit") {
  const EmitterParams p = mirror();
  const OverlapIntegrals o = overlap_integrals(p, narrow(1e-6 * p.gamma_total_rad()));
  CHECK(o.i_res == doctest::Approx(1.0).epsilon(1e-10));
  const double g = p.gamma_total_rad();
  CHECK(o.i_off == doctest::Approx(g * g / (g * g + 4.0 * p.delta_h * p.delta_h)).epsilon(1e-8));
}

TEST_CASE("quadrature minus perturbative follows the fourth-order series") {
  const EmitterParams p = mirror();
  const double g = p.gamma_total_rad();
  const PulseParams pulse = narrow(g / 10.0);
  const double qi = overlap_integrals(p, pulse, OverlapMethod::quadrature, tight()).i_res;
  const double pi = overlap_integrals(p, pulse, OverlapMethod::perturbative).i_res;
  // E[1/(1+y)], y = s^2 z^2: 1 - s^2 + 3 s^4 - 15 s^6 + 105 s^8 - ...
  const double s = 2.0 * pulse.sigma_o / g;
  const double series = 3.0 * std::pow(s, 4) - 15.0 * std::pow(s, 6);
  CHECK(std::abs((qi - pi) - series) < 105.0 * std::pow(s, 8));
}

TEST_CASE("convergence order on a halving ladder") {
  const EmitterParams p = mirror();
  const double g = p.gamma_total_rad();
  std::vector<double> residual;
  for (double f : {0.05, 0.025, 0.0125, 0.00625}) {
    const PulseParams pulse = narrow(f * g);
    const double qi = overlap_integrals(p, pulse, OverlapMethod::quadrature, tight()).i_res;
    const double pi = overlap_integrals(p, pulse, OverlapMethod::perturbative).i_res;
    residual.push_back(std::abs(qi - pi));
  }
  for (std::size_t i = 1; i < residual.size(); ++i) {
    const double order = std::log2(residual[i - 1] / residual[i]);
    CHECK(order >= 3.8);
  }
}

TEST_CASE("spectral diffusion composes with the pulse width") {
  const EmitterParams p = presets::measured_emitter();
  PulseParams both = narrow(0.25);
  both.sigma_e = 0.3;
  const PulseParams merged = narrow(std::hypot(0.25, 0.3));
  const OverlapIntegrals a = overlap_integrals(p, both, OverlapMethod::quadrature, tight());
  const OverlapIntegrals b = overlap_integrals(p, merged, OverlapMethod::quadrature, tight());
  CHECK(a.i_res == doctest::Approx(b.i_res).epsilon(1e-9));
  CHECK(a.i_off == doctest::Approx(b.i_off).epsilon(1e-9));
}

TEST_CASE("off-resonant overlap stays near its monochromatic value") {
  const EmitterParams p = presets::measured_emitter();
  const double g = p.gamma_total_deph();
  const double g1 = 2.0 * std::sqrt(p.gamma1_t() * p.gamma1_r());
  const double bound = g1 * g1 / (g * g + 4.0 * p.delta_h * p.delta_h);
  for (double f : {0.01, 0.05, 0.1, 0.2}) {
    const OverlapIntegrals o = overlap_integrals(p, narrow(f * g));
    CHECK(o.i_off <= bound * (1.0 + 1e-3));
    CHECK(o.i_off >= bound * (1.0 - 1e-3));
  }
}

TEST_CASE("perturbative validity warnings") {
  const EmitterParams p = presets::measured_emitter();
  CHECK(overlap_integrals(p, narrow(0.25), OverlapMethod::perturbative).warnings.empty());
  CHECK_FALSE(overlap_integrals(p, narrow(1.5), OverlapMethod::perturbative).warnings.empty());
}

TEST_CASE("spectral average reports non-convergence") {
  SpectralOptions starved;
  starved.quad.abs_tol = 1e-18;
  starved.quad.max_intervals = 3;
  CHECK_THROWS_AS(overlap_integrals(presets::measured_emitter(), narrow(0.25),
                                    OverlapMethod::quadrature, starved),
                  NumericalError);
}

TEST_CASE("overlap integrals are probabilities") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    EmitterParams p = presets::measured_emitter();
    p.gamma_dephase = 0.3 * u(rng);
    p.gamma1_loss = 0.2 * u(rng);
    PulseParams pulse = narrow(0.05 + 0.5 * u(rng));
    pulse.sigma_e = 0.5 * u(rng);
    pulse.detuning = u(rng) - 0.5;
    const OverlapIntegrals o = overlap_integrals(p, pulse);
    CHECK(o.i_res > 0.0);
    CHECK(o.i_res + o.i_trans_res <= 1.0 + 1e-12);
    CHECK(o.i_off + o.i_trans_off <= 1.0 + 1e-12);
  }
}

}  // TEST_SUITE

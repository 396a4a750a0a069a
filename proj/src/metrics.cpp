#include "tbgate/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>
#include <vector>

namespace tbgate {

namespace {

constexpr int kBootstrapShards = 16;

Matrix4c remove_photon_phase(const Matrix4c& rho, double theta_p) {
  if (theta_p == 0.0) return rho;
  Eigen::Vector4cd d = Eigen::Vector4cd::Ones();
  d(kLateUp) = d(kLateDown) = std::exp(cplx(0.0, -theta_p));
  const Matrix4c u = d.asDiagonal();
  return u * rho * u.adjoint();
}

Matrix4c correlator(const Matrix2c& photon, const Matrix2c& spin) {
  Matrix4c m;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) m.block<2, 2>(2 * a, 2 * b) = photon(a, b) * spin;
  return m;
}

}  // namespace

double bell_fidelity(const JointDensity& rho, BellTarget target, double theta_p) {
  const double tr = rho.trace();
  if (!(tr > 0.0)) throw ValidationError("rho", tr, "no heralded weight");
  return rho.expectation(bell_vector(target, theta_p)) / tr;
}

double conditional_fidelity_formula(const OverlapIntegrals& o, double pure_dephasing_prob,
                                    double alpha_sq) {
  const double den = o.i_res + o.i_off + pure_dephasing_prob;
  if (!(den > 0.0)) throw ValidationError("overlaps", den, "conditional fidelity denominator is zero");
  const double beta_sq = 1.0 - alpha_sq;
  const double weight = alpha_sq * alpha_sq + beta_sq * beta_sq;
  return (o.i_res + weight * pure_dephasing_prob) / den;
}

double conditional_fidelity_perturbative(const EmitterParams& p) {
  const double g = p.gamma_total_rad();
  return 1.0 - p.gamma_dephase / g - g * g / (4.0 * p.delta_h * p.delta_h);
}

double spin_flip_fidelity_perturbative(const EmitterParams& p, const RotationPulse& pi_pulse) {
  const double omega = kPi / pi_pulse.duration;
  return 1.0 - (5.0 * kPi / 4.0) * (p.kappa_flip / omega) -
         1.5 / (omega * omega * p.t2_star * p.t2_star);
}

double driving_dephasing_fidelity(const PulseParams& pulse, const EmitterParams& params) {
  const double keep = 1.0 - driving_dephasing_prob(pulse, params);
  return 0.5 * (1.0 + keep * keep);
}

Contrasts contrasts_from_state(const JointDensity& rho, double theta_p) {
  const double tr = rho.trace();
  if (!(tr > 0.0)) throw ValidationError("rho", tr, "no heralded weight");
  const Matrix4c m = remove_photon_phase(rho.matrix(), theta_p) / tr;

  const cplx i(0.0, 1.0);
  Matrix2c sx, sy, sz;
  sx << 0.0, 1.0, 1.0, 0.0;
  sy << 0.0, -i, i, 0.0;
  sz << 1.0, 0.0, 0.0, -1.0;
  // Spin operators with down as the +1 eigenstate of sigma_z: in (up, down)
  // ordering sigma_y and sigma_z change sign.
  const Matrix4c ox = correlator(sx, sx);
  const Matrix4c oy = correlator(sy, -sy);
  const Matrix4c oz = correlator(sz, -sz);
  return Contrasts{(m * ox).trace().real(), (m * oy).trace().real(), (m * oz).trace().real()};
}

double fidelity_from_contrasts(const Contrasts& c) {
  return 0.5 * c.p_z() + 0.25 * (c.m_y - c.m_x);
}

double success_probability_closed_form(const EmitterParams& p, const PulseParams& pulse) {
  const double g = p.gamma_total_rad();
  const double inv_c = p.inv_cyclicity_plus_one();
  const double keep = 1.0 - inv_c - p.gamma1_loss / g;
  const double bracket = 1.0 - 4.0 * pulse.sigma_o * pulse.sigma_o / (g * g) -
                         4.0 * pulse.sigma_e * pulse.sigma_e / (g * g) - 2.0 * inv_c -
                         (2.0 * p.gamma_dephase / g) * (1.0 - inv_c) - 2.0 * p.gamma1_loss / g +
                         (g * g / (4.0 * p.delta_h * p.delta_h)) * keep * keep;
  return 0.5 * bracket;
}

double success_probability_exact(const EmitterParams& params, const PulseParams& pulse,
                                 const ChannelConfig& channels) {
  return run_gate(params, pulse, channels).success_prob;
}

Visibility photon_visibility(const EmitterParams& params, const PulseParams& pulse,
                             const SpectralOptions& opts) {
  const OverlapIntegrals o = overlap_integrals(params, pulse, OverlapMethod::quadrature, opts);
  const double jump = pure_dephasing_probability(params, pulse, opts);
  Visibility v;
  v.exact = o.i_res / (o.i_res + jump);
  v.linear = 1.0 - 2.0 * params.gamma_dephase / params.gamma_total_rad();
  return v;
}

double concurrence(const JointDensity& rho) {
  const double tr = rho.trace();
  if (!(tr > 0.0)) throw ValidationError("rho", tr, "zero trace");
  const Matrix4c m = 0.5 * (rho.matrix() + rho.matrix().adjoint()) / tr;

  Eigen::SelfAdjointEigenSolver<Matrix4c> es(m);
  if (es.eigenvalues().minCoeff() < -1e-10) {
    throw ValidationError("rho", es.eigenvalues().minCoeff(), "density matrix not PSD");
  }
  const Eigen::Vector4d sqrt_ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Matrix4c sqrt_rho = es.eigenvectors() * sqrt_ev.asDiagonal() * es.eigenvectors().adjoint();

  Matrix4c yy = Matrix4c::Zero();
  yy(0, 3) = yy(3, 0) = -1.0;
  yy(1, 2) = yy(2, 1) = 1.0;
  const Matrix4c flipped = yy * m.conjugate() * yy;
  const Matrix4c r = sqrt_rho * flipped * sqrt_rho;

  Eigen::SelfAdjointEigenSolver<Matrix4c> rs(0.5 * (r + r.adjoint()), Eigen::EigenvaluesOnly);
  std::vector<double> lam(4);
  for (int i = 0; i < 4; ++i) lam[i] = std::sqrt(std::max(0.0, rs.eigenvalues()(i)));
  std::sort(lam.begin(), lam.end(), std::greater<>());
  return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

double CoincidenceCounts::contrast_x(double fallback) const {
  if (!has_mid_x()) return fallback;
  const double n = *mid_x_plus + *mid_x_minus;
  return n > 0.0 ? (*mid_x_plus - *mid_x_minus) / n : 0.0;
}

double CoincidenceCounts::contrast_y(double fallback) const {
  if (!has_mid_y()) return fallback;
  const double n = *mid_y_plus + *mid_y_minus;
  return n > 0.0 ? (*mid_y_plus - *mid_y_minus) / n : 0.0;
}

JointDensity density_from_counts(const CoincidenceCounts& c, double m_x, double m_y) {
  for (double v : {c.e_up, c.e_down, c.l_up, c.l_down}) {
    if (v < 0.0) throw ValidationError("counts", v, "counts must be non-negative");
  }
  const double n = c.e_up + c.e_down + c.l_up + c.l_down;
  if (!(n > 0.0)) throw ValidationError("counts", n, "all Z-basis counts are zero");
  Matrix4c m = Matrix4c::Zero();
  m(kEarlyUp, kEarlyUp) = c.e_up / n;
  m(kEarlyDown, kEarlyDown) = c.e_down / n;
  m(kLateUp, kLateUp) = c.l_up / n;
  m(kLateDown, kLateDown) = c.l_down / n;
  const double bound = std::sqrt(m(kEarlyDown, kEarlyDown).real() * m(kLateUp, kLateUp).real());
  const double coh = std::clamp(0.25 * (m_x - m_y), -bound, bound);
  m(kEarlyDown, kLateUp) = coh;
  m(kLateUp, kEarlyDown) = coh;
  return JointDensity(m, true);
}

std::uint64_t shard_seed(std::uint64_t seed, std::uint64_t shard) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (shard + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

BootstrapResult bootstrap_concurrence(const CoincidenceCounts& counts, double m_x, double m_y,
                                      int n_resamples, std::uint64_t seed, int jobs) {
  if (n_resamples < 100) throw ValidationError("resamples", n_resamples, "need at least 100");
  BootstrapResult out;
  out.resamples = n_resamples;
  out.seed = seed;
  out.point = concurrence(density_from_counts(counts, counts.contrast_x(m_x), counts.contrast_y(m_y)));

  std::vector<double> samples(n_resamples);
  auto run_shard = [&](int shard) {
    std::mt19937_64 rng(shard_seed(seed, static_cast<std::uint64_t>(shard)));
    auto draw = [&rng](double mean) {
      if (mean <= 0.0) return 0.0;
      std::poisson_distribution<long long> dist(mean);
      return static_cast<double>(dist(rng));
    };
    for (int k = shard; k < n_resamples; k += kBootstrapShards) {
      CoincidenceCounts c;
      c.e_up = draw(counts.e_up);
      c.e_down = draw(counts.e_down);
      c.l_up = draw(counts.l_up);
      c.l_down = draw(counts.l_down);
      if (counts.has_mid_x()) {
        c.mid_x_plus = draw(*counts.mid_x_plus);
        c.mid_x_minus = draw(*counts.mid_x_minus);
      }
      if (counts.has_mid_y()) {
        c.mid_y_plus = draw(*counts.mid_y_plus);
        c.mid_y_minus = draw(*counts.mid_y_minus);
      }
      const double n = c.e_up + c.e_down + c.l_up + c.l_down;
      samples[k] = n > 0.0 ? concurrence(density_from_counts(c, c.contrast_x(m_x), c.contrast_y(m_y)))
                           : 0.0;
    }
  };

  const int workers = std::clamp(jobs, 1, kBootstrapShards);
  if (workers == 1) {
    for (int s = 0; s < kBootstrapShards; ++s) run_shard(s);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int s = w; s < kBootstrapShards; s += workers) run_shard(s);
      });
    }
    for (auto& t : pool) t.join();
  }

  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= n_resamples;
  double var = 0.0;
  for (double s : samples) var += (s - mean) * (s - mean);
  out.estimate = mean;
  out.std = std::sqrt(var / (n_resamples - 1));
  return out;
}

}  // namespace tbgate

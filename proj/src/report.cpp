#include "tbgate/report.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

namespace tbgate {

double round12(double v) {
  if (!std::isfinite(v) || v == 0.0) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

std::string format12(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

ChannelConfig mirror_flip_channels(const ChannelConfig& base, bool readout) {
  ChannelConfig c = ChannelConfig::all_off();
  c.enable_spin_flip = base.enable_spin_flip;
  c.enable_readout_error = readout && base.enable_readout_error;
  c.readout_fidelity = base.readout_fidelity;
  c.half_pi = base.half_pi;
  c.pi = base.pi;
  c.flip_noise = base.flip_noise;
  c.fixed_amplitudes = ideal_amplitudes();
  return c;
}

}  // namespace

RunReport make_budget_report(const Config& cfg) {
  RunReport r;
  r.inputs = serialize_config(cfg);
  r.provenance.config_hash = fnv1a_hex(r.inputs);

  const EmitterParams& e = cfg.emitter;
  const PulseParams& p = cfg.pulse;
  const ChannelConfig& ch = cfg.channels;

  const OverlapIntegrals o = overlap_integrals(e, p, OverlapMethod::quadrature, ch.spectral);
  const double jump_prob = pure_dephasing_probability(e, p, ch.spectral);
  const double jump = ch.enable_pure_dephasing ? jump_prob : 0.0;
  r.conditional_fidelity = conditional_fidelity_formula(o, jump);
  const double flip = run_gate(e, p, mirror_flip_channels(ch, true), cfg.theta_p).fidelity;
  const double driving = ch.enable_driving_dephasing ? driving_dephasing_fidelity(p, e) : 1.0;
  r.budget = {{"conditional", r.conditional_fidelity},
              {"spin_flip_readout", flip},
              {"driving_dephasing", driving}};
  r.product_fidelity = r.conditional_fidelity * flip * driving;

  const GateOutcome g = run_gate(e, p, ch, cfg.theta_p);
  r.overall_fidelity = g.fidelity;
  r.discrepancy = r.overall_fidelity - r.product_fidelity;
  r.success_prob = g.success_prob;
  r.success_prob_closed_form = success_probability_closed_form(e, p);
  r.contrasts = contrasts_from_state(g.rho_heralded, cfg.theta_p);
  r.contrast_fidelity = fidelity_from_contrasts(r.contrasts);
  r.visibility = o.i_res / (o.i_res + jump_prob);
  r.visibility_linear = 1.0 - 2.0 * e.gamma_dephase / e.gamma_total_rad();
  r.concurrence = concurrence(g.rho_heralded);
  r.warnings = g.warnings;
  for (const auto& w : o.warnings) r.warnings.push_back(w);

  for (auto& b : r.budget) b.multiplier = round12(b.multiplier);
  for (double* v : {&r.conditional_fidelity, &r.product_fidelity, &r.overall_fidelity,
                    &r.discrepancy, &r.success_prob, &r.success_prob_closed_form, &r.contrasts.m_x,
                    &r.contrasts.m_y, &r.contrasts.m_z, &r.contrast_fidelity, &r.visibility,
                    &r.visibility_linear}) {
    *v = round12(*v);
  }
  r.concurrence = round12(*r.concurrence);
  return r;
}

bool operator==(const RunReport& a, const RunReport& b) {
  if (a.budget.size() != b.budget.size()) return false;
  for (std::size_t i = 0; i < a.budget.size(); ++i) {
    if (a.budget[i].channel != b.budget[i].channel ||
        a.budget[i].multiplier != b.budget[i].multiplier) {
      return false;
    }
  }
  return a.inputs == b.inputs && a.conditional_fidelity == b.conditional_fidelity &&
         a.product_fidelity == b.product_fidelity && a.overall_fidelity == b.overall_fidelity &&
         a.discrepancy == b.discrepancy && a.success_prob == b.success_prob &&
         a.success_prob_closed_form == b.success_prob_closed_form &&
         a.contrasts.m_x == b.contrasts.m_x && a.contrasts.m_y == b.contrasts.m_y &&
         a.contrasts.m_z == b.contrasts.m_z && a.contrast_fidelity == b.contrast_fidelity &&
         a.visibility == b.visibility && a.visibility_linear == b.visibility_linear &&
         a.concurrence == b.concurrence && a.warnings == b.warnings &&
         a.provenance == b.provenance;
}

nlohmann::json to_json(const RunReport& r) {
  nlohmann::json j;
  j["inputs"] = r.inputs;
  j["budget"] = nlohmann::json::array();
  for (const auto& b : r.budget) j["budget"].push_back({{"channel", b.channel}, {"multiplier", b.multiplier}});
  j["conditional_fidelity"] = r.conditional_fidelity;
  j["product_fidelity"] = r.product_fidelity;
  j["overall_fidelity"] = r.overall_fidelity;
  j["discrepancy"] = r.discrepancy;
  j["success_prob"] = r.success_prob;
  j["success_prob_closed_form"] = r.success_prob_closed_form;
  j["contrasts"] = {{"m_x", r.contrasts.m_x}, {"m_y", r.contrasts.m_y}, {"m_z", r.contrasts.m_z}};
  j["contrast_fidelity"] = r.contrast_fidelity;
  j["visibility"] = r.visibility;
  j["visibility_linear"] = r.visibility_linear;
  if (r.concurrence) j["concurrence"] = *r.concurrence;
  j["warnings"] = r.warnings;
  nlohmann::json prov = {{"config_hash", r.provenance.config_hash},
                         {"tool_version", r.provenance.tool_version}};
  if (r.provenance.seed) prov["seed"] = *r.provenance.seed;
  if (r.provenance.timestamp) prov["timestamp"] = *r.provenance.timestamp;
  j["provenance"] = prov;
  return j;
}

RunReport report_from_json(const nlohmann::json& j) {
  RunReport r;
  r.inputs = j.at("inputs").get<std::string>();
  for (const auto& b : j.at("budget")) {
    r.budget.push_back({b.at("channel").get<std::string>(), b.at("multiplier").get<double>()});
  }
  r.conditional_fidelity = j.at("conditional_fidelity").get<double>();
  r.product_fidelity = j.at("product_fidelity").get<double>();
  r.overall_fidelity = j.at("overall_fidelity").get<double>();
  r.discrepancy = j.at("discrepancy").get<double>();
  r.success_prob = j.at("success_prob").get<double>();
  r.success_prob_closed_form = j.at("success_prob_closed_form").get<double>();
  const auto& c = j.at("contrasts");
  r.contrasts = Contrasts{c.at("m_x").get<double>(), c.at("m_y").get<double>(),
                          c.at("m_z").get<double>()};
  r.contrast_fidelity = j.at("contrast_fidelity").get<double>();
  r.visibility = j.at("visibility").get<double>();
  r.visibility_linear = j.at("visibility_linear").get<double>();
  if (j.contains("concurrence")) r.concurrence = j.at("concurrence").get<double>();
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  const auto& p = j.at("provenance");
  r.provenance.config_hash = p.at("config_hash").get<std::string>();
  r.provenance.tool_version = p.at("tool_version").get<std::string>();
  if (p.contains("seed")) r.provenance.seed = p.at("seed").get<std::uint64_t>();
  if (p.contains("timestamp")) r.provenance.timestamp = p.at("timestamp").get<std::string>();
  return r;
}

std::vector<SweepRow> run_sweep(const Config& base, const std::string& param, double from,
                                double to, int steps, int jobs) {
  {
    Config probe = base;
    if (!set_config_field(probe, param, from)) {
      throw ConfigError(0, param, "unknown sweep parameter");
    }
  }
  if (steps < 1) throw ConfigError(0, "steps", "steps must be at least 1");
  const int n = from == to ? 1 : steps;
  std::vector<SweepRow> rows(n);
  std::vector<std::string> errors(n);

  auto evaluate = [&](int i) {
    const double value = n == 1 ? from : from + (to - from) * i / (n - 1);
    Config cfg = base;
    set_config_field(cfg, param, value);
    SweepRow& row = rows[i];
    row.index = i;
    row.value = value;
    try {
      validate(cfg.emitter);
      validate(cfg.pulse);
      validate(cfg.channels);
      const GateOutcome g = run_gate(cfg.emitter, cfg.pulse, cfg.channels, cfg.theta_p);
      row.fidelity = g.fidelity;
      row.success_prob = g.success_prob;
      row.visibility =
          photon_visibility(cfg.emitter, cfg.pulse, cfg.channels.spectral).exact;
      row.f_kappa = run_gate(cfg.emitter, cfg.pulse, mirror_flip_channels(cfg.channels, false),
                             cfg.theta_p)
                        .fidelity;
      row.f_kappa_r = run_gate(cfg.emitter, cfg.pulse, mirror_flip_channels(cfg.channels, true),
                               cfg.theta_p)
                          .fidelity;
    } catch (const std::exception& ex) {
      errors[i] = ex.what();
    }
  };

  const int workers = std::clamp(jobs, 1, n);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) evaluate(i);
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (int i = 0; i < n; ++i) {
    if (!errors[i].empty()) {
      std::ostringstream os;
      os << param << " = " << format12(rows[i].value) << ": " << errors[i];
      throw ValidationError(param, os.str());
    }
  }
  return rows;
}

std::string sweep_csv(const std::string& param, const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "index," << param << ",fidelity,success_prob,visibility,f_kappa,f_kappa_r\n";
  for (const auto& r : rows) {
    os << r.index << ',' << format12(r.value) << ',' << format12(r.fidelity) << ','
       << format12(r.success_prob) << ',' << format12(r.visibility) << ',' << format12(r.f_kappa)
       << ',' << format12(r.f_kappa_r) << '\n';
  }
  return os.str();
}

}  // namespace tbgate

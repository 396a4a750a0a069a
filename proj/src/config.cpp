#include "tbgate/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace tbgate {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Shortest of %.15g / %.17g that reads back to the same double.
std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  if (std::strtod(buf, nullptr) != v) std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_number(const std::string& text, int line, const std::string& field) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ConfigError(line, field, "expected a finite number, got '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& text, int line, const std::string& field) {
  if (text == "true" || text == "on" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "off" || text == "0" || text == "no") return false;
  throw ConfigError(line, field, "expected a boolean, got '" + text + "'");
}

struct Entry {
  std::string value;
  int line;
};

using Table = std::map<std::string, Entry>;  // "section.key" -> entry

Table tokenize(const std::string& text) {
  Table table;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find_first_of("#;");
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(line, s, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) throw ConfigError(line, s, "empty section name");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(line, s, "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError(line, s, "missing key");
    if (section.empty()) throw ConfigError(line, key, "key outside of any section");
    const std::string path = section + "." + key;
    if (table.count(path)) {
      throw ConfigError(line, path, "duplicate key (first set on line " +
                                        std::to_string(table[path].line) + ")");
    }
    table[path] = Entry{value, line};
  }
  return table;
}

}  // namespace

ConfigError::ConfigError(int line, std::string field, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + field + ": " + message),
      line_(line),
      field_(std::move(field)) {}

Config parse_config(const std::string& text, const std::string& source) {
  const Table table = tokenize(text);
  Config cfg;
  cfg.emitter = EmitterParams{};
  cfg.emitter.t2_star = 1e9;
  cfg.emitter.delta_h = 0.0;
  cfg.pulse = PulseParams{};
  cfg.channels = ChannelConfig{};

  std::set<std::string> used;
  auto line_of = [&](const std::string& path) {
    auto it = table.find(path);
    return it == table.end() ? 0 : it->second.line;
  };
  auto num = [&](const std::string& path, auto setter) {
    auto it = table.find(path);
    if (it == table.end()) return false;
    used.insert(path);
    setter(parse_number(it->second.value, it->second.line, path));
    return true;
  };
  auto flag = [&](const std::string& path, bool& target) {
    auto it = table.find(path);
    if (it == table.end()) return;
    used.insert(path);
    target = parse_bool(it->second.value, it->second.line, path);
  };

  EmitterParams& e = cfg.emitter;
  num("emitter.gamma1_wg", [&](double v) { e.gamma1_wg = v; });
  num("emitter.gamma2_wg", [&](double v) { e.gamma2_wg = v; });
  num("emitter.gamma1_loss", [&](double v) { e.gamma1_loss = v; });
  num("emitter.gamma2_loss", [&](double v) { e.gamma2_loss = v; });
  num("emitter.gamma_dephase", [&](double v) { e.gamma_dephase = v; });
  const bool has_ghz = num("emitter.delta_h_ghz", [&](double v) { e.delta_h = kTwoPi * v; });
  const bool has_rad = num("emitter.delta_h", [&](double v) { e.delta_h = v; });
  if (has_ghz && has_rad) {
    throw ConfigError(line_of("emitter.delta_h"), "emitter.delta_h",
                      "give either delta_h_ghz or delta_h, not both");
  }
  num("emitter.kappa_flip", [&](double v) { e.kappa_flip = v; });
  num("emitter.t2_star_ns", [&](double v) { e.t2_star = v; });
  num("emitter.beta_factor", [&](double v) { e.beta_factor = v; });
  num("emitter.split1_r", [&](double v) { e.split1_r = v; });
  num("emitter.split2_r", [&](double v) { e.split2_r = v; });
  num("emitter.cyclicity", [&](double v) { e.cyclicity = v; });
  num("emitter.kappa_g", [&](double v) { e.kappa_g = v; });

  PulseParams& p = cfg.pulse;
  const bool has_sigma = num("pulse.sigma_o", [&](double v) { p.sigma_o = v; });
  const bool has_tp = num("pulse.t_pulse_ns", [&](double v) { p.t_pulse = v; });
  if (has_sigma && !has_tp && p.sigma_o > 0.0) p.t_pulse = 1.0 / (2.0 * p.sigma_o);
  if (has_tp && !has_sigma && p.t_pulse > 0.0) p.sigma_o = 1.0 / (2.0 * p.t_pulse);
  num("pulse.sigma_e", [&](double v) { p.sigma_e = v; });
  num("pulse.detuning", [&](double v) { p.detuning = v; });
  num("pulse.n_bar", [&](double v) { p.n_bar = v; });

  ChannelConfig& c = cfg.channels;
  num("rotations.t_pi_ns", [&](double v) { c.pi.duration = v; });
  num("rotations.t_pi2_ns", [&](double v) { c.half_pi.duration = v; });
  num("rotations.phase", [&](double v) { c.pi.phase = c.half_pi.phase = v; });
  num("readout.fidelity_r", [&](double v) { c.readout_fidelity = v; });
  flag("channels.pure_dephasing", c.enable_pure_dephasing);
  flag("channels.spin_flip", c.enable_spin_flip);
  flag("channels.driving_dephasing", c.enable_driving_dephasing);
  flag("channels.readout_error", c.enable_readout_error);
  if (auto it = table.find("channels.flip_noise"); it != table.end()) {
    used.insert(it->first);
    if (it->second.value == "photonic_input") {
      c.flip_noise = FlipNoiseWeighting::photonic_input;
    } else if (it->second.value == "heralded_trace") {
      c.flip_noise = FlipNoiseWeighting::heralded_trace;
    } else {
      throw ConfigError(it->second.line, it->first,
                        "expected photonic_input or heralded_trace, got '" + it->second.value + "'");
    }
  }
  num("gate.theta_p", [&](double v) { cfg.theta_p = v; });

  for (const auto& [path, entry] : table) {
    if (!used.count(path)) throw ConfigError(entry.line, path, "unknown key");
  }

  // Map validation failures back to the offending key.
  const std::map<std::string, std::string> key_of = {
      {"gamma1_wg", "emitter.gamma1_wg"},     {"gamma2_wg", "emitter.gamma2_wg"},
      {"gamma1_loss", "emitter.gamma1_loss"}, {"gamma2_loss", "emitter.gamma2_loss"},
      {"gamma_dephase", "emitter.gamma_dephase"},
      {"delta_h", has_ghz ? "emitter.delta_h_ghz" : "emitter.delta_h"},
      {"kappa_flip", "emitter.kappa_flip"},   {"t2_star", "emitter.t2_star_ns"},
      {"beta_factor", "emitter.beta_factor"}, {"split1_r", "emitter.split1_r"},
      {"split2_r", "emitter.split2_r"},       {"cyclicity", "emitter.cyclicity"},
      {"kappa_g", "emitter.kappa_g"},         {"sigma_o", "pulse.sigma_o"},
      {"sigma_e", "pulse.sigma_e"},           {"detuning", "pulse.detuning"},
      {"t_pulse", "pulse.t_pulse_ns"},        {"n_bar", "pulse.n_bar"},
      {"readout_fidelity", "readout.fidelity_r"}, {"duration", "rotations.t_pi_ns"}};
  auto rethrow = [&](const ValidationError& err) {
    auto it = key_of.find(err.field());
    const std::string path = it == key_of.end() ? err.field() : it->second;
    throw ConfigError(line_of(path), path, std::string(err.what()) + " in " + source);
  };
  try {
    validate(cfg.emitter);
    validate(cfg.pulse);
    validate(cfg.channels);
  } catch (const ValidationError& err) {
    rethrow(err);
  }
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, path, "cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

std::string serialize_config(const Config& cfg) {
  std::ostringstream os;
  const EmitterParams& e = cfg.emitter;
  os << "[emitter]\n"
     << "gamma1_wg = " << format_double(e.gamma1_wg) << "\n"
     << "gamma2_wg = " << format_double(e.gamma2_wg) << "\n"
     << "gamma1_loss = " << format_double(e.gamma1_loss) << "\n"
     << "gamma2_loss = " << format_double(e.gamma2_loss) << "\n"
     << "gamma_dephase = " << format_double(e.gamma_dephase) << "\n"
     << "delta_h = " << format_double(e.delta_h) << "\n"
     << "kappa_flip = " << format_double(e.kappa_flip) << "\n"
     << "t2_star_ns = " << format_double(e.t2_star) << "\n"
     << "beta_factor = " << format_double(e.beta_factor) << "\n"
     << "split1_r = " << format_double(e.split1_r) << "\n"
     << "split2_r = " << format_double(e.split2_r) << "\n";
  if (e.cyclicity) os << "cyclicity = " << format_double(*e.cyclicity) << "\n";
  if (e.kappa_g) os << "kappa_g = " << format_double(*e.kappa_g) << "\n";
  const PulseParams& p = cfg.pulse;
  os << "\n[pulse]\n"
     << "sigma_o = " << format_double(p.sigma_o) << "\n"
     << "sigma_e = " << format_double(p.sigma_e) << "\n"
     << "detuning = " << format_double(p.detuning) << "\n"
     << "t_pulse_ns = " << format_double(p.t_pulse) << "\n"
     << "n_bar = " << format_double(p.n_bar) << "\n";
  const ChannelConfig& c = cfg.channels;
  os << "\n[rotations]\n"
     << "t_pi_ns = " << format_double(c.pi.duration) << "\n"
     << "t_pi2_ns = " << format_double(c.half_pi.duration) << "\n"
     << "phase = " << format_double(c.pi.phase) << "\n"
     << "\n[readout]\n"
     << "fidelity_r = " << format_double(c.readout_fidelity) << "\n"
     << "\n[channels]\n"
     << "pure_dephasing = " << (c.enable_pure_dephasing ? "true" : "false") << "\n"
     << "spin_flip = " << (c.enable_spin_flip ? "true" : "false") << "\n"
     << "driving_dephasing = " << (c.enable_driving_dephasing ? "true" : "false") << "\n"
     << "readout_error = " << (c.enable_readout_error ? "true" : "false") << "\n"
     << "flip_noise = "
     << (c.flip_noise == FlipNoiseWeighting::photonic_input ? "photonic_input" : "heralded_trace")
     << "\n"
     << "\n[gate]\n"
     << "theta_p = " << format_double(cfg.theta_p) << "\n";
  return os.str();
}

const std::map<std::string, std::string>& sweepable_fields() {
  static const std::map<std::string, std::string> fields = {
      {"emitter.gamma1_wg", "waveguide rate of the vertical transition, 1/ns"},
      {"emitter.gamma2_wg", "waveguide rate of the diagonal transition, 1/ns"},
      {"emitter.gamma1_loss", "loss rate of the vertical transition, 1/ns"},
      {"emitter.gamma2_loss", "loss rate of the diagonal transition, 1/ns"},
      {"emitter.gamma_dephase", "pure dephasing rate, 1/ns"},
      {"emitter.delta_h_ghz", "ground-state splitting, GHz"},
      {"emitter.kappa_flip", "incoherent spin-flip rate, 1/ns"},
      {"emitter.t2_star_ns", "spin T2*, ns"},
      {"emitter.cyclicity", "measured optical cyclicity"},
      {"emitter.beta_factor", "beta factor"},
      {"emitter.split1_r", "reflected share of the vertical waveguide rate"},
      {"emitter.split2_r", "reflected share of the diagonal waveguide rate"},
      {"pulse.sigma_o", "pulse bandwidth, rad/ns (sets t_pulse)"},
      {"pulse.sigma_e", "spectral diffusion width, rad/ns"},
      {"pulse.detuning", "carrier detuning, rad/ns"},
      {"pulse.n_bar", "mean photon number"},
      {"rotations.t_pi_ns", "pi pulse duration, ns"},
      {"rotations.t_pi2_ns", "pi/2 pulse duration, ns"},
      {"readout.fidelity_r", "spin readout fidelity"},
      {"gate.theta_p", "photonic phase, rad"},
  };
  return fields;
}

bool set_config_field(Config& cfg, const std::string& path, double v) {
  static const std::map<std::string, std::function<void(Config&, double)>> setters = {
      {"emitter.gamma1_wg", [](Config& c, double x) { c.emitter.gamma1_wg = x; }},
      {"emitter.gamma2_wg", [](Config& c, double x) { c.emitter.gamma2_wg = x; }},
      {"emitter.gamma1_loss", [](Config& c, double x) { c.emitter.gamma1_loss = x; }},
      {"emitter.gamma2_loss", [](Config& c, double x) { c.emitter.gamma2_loss = x; }},
      {"emitter.gamma_dephase", [](Config& c, double x) { c.emitter.gamma_dephase = x; }},
      {"emitter.delta_h_ghz", [](Config& c, double x) { c.emitter.delta_h = kTwoPi * x; }},
      {"emitter.kappa_flip", [](Config& c, double x) { c.emitter.kappa_flip = x; }},
      {"emitter.t2_star_ns", [](Config& c, double x) { c.emitter.t2_star = x; }},
      {"emitter.cyclicity", [](Config& c, double x) { c.emitter.cyclicity = x; }},
      {"emitter.beta_factor", [](Config& c, double x) { c.emitter.beta_factor = x; }},
      {"emitter.split1_r", [](Config& c, double x) { c.emitter.split1_r = x; }},
      {"emitter.split2_r", [](Config& c, double x) { c.emitter.split2_r = x; }},
      {"pulse.sigma_o",
       [](Config& c, double x) {
         c.pulse.sigma_o = x;
         c.pulse.t_pulse = 1.0 / (2.0 * x);
       }},
      {"pulse.sigma_e", [](Config& c, double x) { c.pulse.sigma_e = x; }},
      {"pulse.detuning", [](Config& c, double x) { c.pulse.detuning = x; }},
      {"pulse.n_bar", [](Config& c, double x) { c.pulse.n_bar = x; }},
      {"rotations.t_pi_ns", [](Config& c, double x) { c.channels.pi.duration = x; }},
      {"rotations.t_pi2_ns", [](Config& c, double x) { c.channels.half_pi.duration = x; }},
      {"readout.fidelity_r", [](Config& c, double x) { c.channels.readout_fidelity = x; }},
      {"gate.theta_p", [](Config& c, double x) { c.theta_p = x; }},
  };
  auto it = setters.find(path);
  if (it == setters.end()) return false;
  it->second(cfg, v);
  return true;
}

}  // namespace tbgate

// tbgate: fidelity budget, sweeps, visibility, saturation fit and concurrence.
//
// Exit codes: 0 success, 2 config or usage error, 3 numerical failure,
// 4 data-format error.

#include "tbgate/calibration.hpp"
#include "tbgate/config.hpp"
#include "tbgate/csv.hpp"
#include "tbgate/report.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>

using namespace tbgate;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kConfig = 2, kNumerical = 3, kData = 4 };

struct Options {
  std::string config;
  bool json_out = false;
  std::string csv_path;
  std::uint64_t seed = 1;
  int jobs = 1;
  bool timestamp = false;
  std::string param;
  double from = 0.0, to = 0.0;
  int steps = 11;
  std::string data;
  std::string counts;
  int resamples = 1000;
  double m_x = 0.0, m_y = 0.0;
  std::optional<double> b2;
  std::optional<double> power;
  int max_evals = 2000;
};

std::string utc_now() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DataFormatError(path, 0, "cannot write file");
  out << text;
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%8.4f %%", 100.0 * v);
  return buf;
}

void print_row(const std::string& name, const std::string& value) {
  std::printf("  %-28s %s\n", name.c_str(), value.c_str());
}

int cmd_budget(const Options& o) {
  const Config cfg = load_config(o.config);
  RunReport r = make_budget_report(cfg);
  if (o.timestamp) r.provenance.timestamp = utc_now();
  if (!o.csv_path.empty()) {
    std::string text = "channel,multiplier\n";
    for (const auto& b : r.budget) text += b.channel + "," + format12(b.multiplier) + "\n";
    text += "product," + format12(r.product_fidelity) + "\n";
    text += "exact," + format12(r.overall_fidelity) + "\n";
    write_file(o.csv_path, text);
  }
  if (o.json_out) {
    std::cout << to_json(r).dump(2) << "\n";
    return kOk;
  }
  std::printf("fidelity budget (%s)\n", o.config.c_str());
  for (const auto& b : r.budget) print_row(b.channel, pct(b.multiplier));
  print_row("product", pct(r.product_fidelity));
  print_row("exact pipeline", pct(r.overall_fidelity));
  print_row("discrepancy", pct(r.discrepancy));
  print_row("success probability", pct(r.success_prob));
  print_row("success prob. closed form", pct(r.success_prob_closed_form));
  print_row("contrasts (Mx, My, Mz)", format12(r.contrasts.m_x) + ", " + format12(r.contrasts.m_y) +
                                          ", " + format12(r.contrasts.m_z));
  print_row("visibility", format12(r.visibility));
  if (r.concurrence) print_row("concurrence", format12(*r.concurrence));
  for (const auto& w : r.warnings) std::printf("  warning: %s\n", w.c_str());
  std::printf("  config hash %s, version %s\n", r.provenance.config_hash.c_str(),
              r.provenance.tool_version.c_str());
  return kOk;
}

int cmd_sweep(const Options& o) {
  const Config cfg = load_config(o.config);
  const auto rows = run_sweep(cfg, o.param, o.from, o.to, o.steps, o.jobs);
  const std::string csv = sweep_csv(o.param, rows);
  if (!o.csv_path.empty()) write_file(o.csv_path, csv);
  if (o.json_out) {
    json j;
    j["param"] = o.param;
    j["rows"] = json::array();
    for (const auto& r : rows) {
      j["rows"].push_back({{"index", r.index},
                           {"value", round12(r.value)},
                           {"fidelity", round12(r.fidelity)},
                           {"success_prob", round12(r.success_prob)},
                           {"visibility", round12(r.visibility)},
                           {"f_kappa", round12(r.f_kappa)},
                           {"f_kappa_r", round12(r.f_kappa_r)}});
    }
    j["provenance"] = {{"config_hash", fnv1a_hex(serialize_config(cfg))},
                       {"tool_version", kToolVersion}};
    std::cout << j.dump(2) << "\n";
  } else if (o.csv_path.empty()) {
    std::cout << csv;
  } else {
    std::printf("%zu rows written to %s\n", rows.size(), o.csv_path.c_str());
  }
  return kOk;
}

int cmd_visibility(const Options& o) {
  json j;
  if (!o.config.empty()) {
    const Config cfg = load_config(o.config);
    const Visibility v = photon_visibility(cfg.emitter, cfg.pulse, cfg.channels.spectral);
    j["visibility"] = round12(v.exact);
    j["visibility_linear"] = round12(v.linear);
    j["gamma_d_from_linear"] = round12(dephasing_from_intercept(v.linear, cfg.emitter.gamma_total_rad()));
    j["provenance"] = {{"config_hash", fnv1a_hex(serialize_config(cfg))},
                       {"tool_version", kToolVersion}};
  }
  if (!o.data.empty()) {
    double gamma = 0.0;
    if (!o.config.empty()) gamma = load_config(o.config).emitter.gamma_total_rad();
    if (!(gamma > 0.0)) throw ConfigError(0, "--config", "a config is needed for the linewidth");
    const auto pts = parse_visibility_csv(read_text_file(o.data), o.data);
    const DephasingExtraction d = extract_dephasing(pts, gamma);
    j["fit"] = {{"intercept", round12(d.intercept)},
                {"intercept_err", round12(d.intercept_err)},
                {"slope", round12(d.slope)},
                {"gamma_d", round12(d.gamma_d)},
                {"gamma_d_err", round12(d.gamma_d_err)},
                {"weighted", d.weighted}};
  }
  if (o.config.empty() && o.data.empty()) {
    throw ConfigError(0, "--config", "give --config and/or --data");
  }
  if (o.json_out) {
    std::cout << j.dump(2) << "\n";
    return kOk;
  }
  std::printf("visibility\n");
  if (j.contains("visibility")) {
    print_row("exact", format12(j["visibility"].get<double>()));
    print_row("1 - 2 gamma_d / Gamma", format12(j["visibility_linear"].get<double>()));
  }
  if (j.contains("fit")) {
    const auto& f = j["fit"];
    print_row("intercept", format12(f["intercept"].get<double>()) + " +- " +
                               format12(f["intercept_err"].get<double>()));
    print_row("gamma_d (1/ns)", format12(f["gamma_d"].get<double>()) + " +- " +
                                    format12(f["gamma_d_err"].get<double>()));
  }
  return kOk;
}

int cmd_saturation(const Options& o) {
  if (o.data.empty()) throw ConfigError(0, "--data", "saturation table required");
  const auto pts = parse_saturation_csv(read_text_file(o.data), o.data);
  SaturationFitOptions opts;
  opts.b2_fixed = o.b2;
  opts.max_iterations = o.max_evals;
  const SaturationFit f = fit_saturation(pts, opts);
  json j = {{"b1", round12(f.b1)},
            {"b2", round12(f.b2)},
            {"b3", round12(f.b3)},
            {"b1_err", round12(std::sqrt(f.covariance(0, 0)))},
            {"b3_err", round12(std::sqrt(f.covariance(2, 2)))},
            {"b2_fixed", f.b2_fixed},
            {"residual_norm", round12(f.residual_norm)},
            {"iterations", f.iterations}};
  if (!o.config.empty()) {
    const Config cfg = load_config(o.config);
    const PhotonFlux p = mean_photon_number(f, cfg.emitter, cfg.pulse, o.power.value_or(1.0));
    j["n_crit"] = round12(p.n_crit);
    j["n_bar_per_nw"] = round12(p.scale_per_nw);
    if (o.power) j["n_bar"] = round12(p.n_bar);
    if (!p.warnings.empty()) j["warnings"] = p.warnings;
  }
  j["provenance"] = {{"config_hash", fnv1a_hex(read_text_file(o.data))},
                     {"tool_version", kToolVersion}};
  if (o.json_out) {
    std::cout << j.dump(2) << "\n";
    return kOk;
  }
  std::printf("saturation fit (%s)\n", o.data.c_str());
  print_row("b1 (1/nW)", format12(f.b1) + " +- " + format12(std::sqrt(f.covariance(0, 0))));
  print_row(f.b2_fixed ? "b2 (fixed)" : "b2 (gauge)", format12(f.b2));
  print_row("b3 (counts)", format12(f.b3) + " +- " + format12(std::sqrt(f.covariance(2, 2))));
  if (j.contains("n_crit")) {
    print_row("n_c", format12(j["n_crit"].get<double>()));
    print_row("n_bar per nW", format12(j["n_bar_per_nw"].get<double>()));
  }
  if (j.contains("n_bar")) print_row("n_bar", format12(j["n_bar"].get<double>()));
  return kOk;
}

int cmd_concurrence(const Options& o) {
  if (o.counts.empty()) throw ConfigError(0, "--counts", "counts table required");
  const std::string text = read_text_file(o.counts);
  const CoincidenceCounts c = parse_counts_csv(text, o.counts);
  const BootstrapResult b = bootstrap_concurrence(c, o.m_x, o.m_y, o.resamples, o.seed, o.jobs);
  json j = {{"concurrence", round12(b.point)},
            {"bootstrap_mean", round12(b.estimate)},
            {"bootstrap_std", round12(b.std)},
            {"resamples", b.resamples},
            {"m_x", round12(c.contrast_x(o.m_x))},
            {"m_y", round12(c.contrast_y(o.m_y))}};
  json prov = {{"config_hash", fnv1a_hex(text)}, {"tool_version", kToolVersion}, {"seed", b.seed}};
  if (o.timestamp) prov["timestamp"] = utc_now();
  j["provenance"] = prov;
  if (o.json_out) {
    std::cout << j.dump(2) << "\n";
    return kOk;
  }
  std::printf("concurrence (%s)\n", o.counts.c_str());
  print_row("point estimate", format12(b.point));
  print_row("bootstrap", format12(b.estimate) + " +- " + format12(b.std));
  print_row("resamples / seed", std::to_string(b.resamples) + " / " + std::to_string(b.seed));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heralded spin-photon time-bin gate simulator"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub, bool need_config) {
    auto* c = sub->add_option("--config", o.config, "INI configuration file");
    if (need_config) c->required();
    c->check(CLI::ExistingFile);
    sub->add_flag("--json", o.json_out, "Print a JSON report");
    sub->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
  };

  auto* budget = app.add_subcommand("budget", "Exact pipeline and multiplicative fidelity budget");
  common(budget, true);
  budget->add_option("--csv", o.csv_path, "Write the budget rows as CSV");
  budget->add_flag("--timestamp", o.timestamp, "Add a UTC timestamp to the provenance block");

  auto* sweep = app.add_subcommand("sweep", "Sweep one configuration field");
  common(sweep, true);
  sweep->add_option("--param", o.param, "Field path, e.g. emitter.kappa_flip")->required();
  sweep->add_option("--from", o.from, "First grid value")->required();
  sweep->add_option("--to", o.to, "Last grid value")->required();
  sweep->add_option("--steps", o.steps, "Grid points")->check(CLI::PositiveNumber);
  sweep->add_option("--csv", o.csv_path, "Write rows to this CSV file");

  auto* vis = app.add_subcommand("visibility", "Photon visibility and dephasing extraction");
  common(vis, false);
  vis->add_option("--data", o.data, "Visibility table n_bar,visibility[,visibility_err]")
      ->check(CLI::ExistingFile);

  auto* sat = app.add_subcommand("saturation", "Saturation-curve fit");
  common(sat, false);
  sat->add_option("--data", o.data, "Saturation table power_nw,counts[,spin_state]")
      ->required()
      ->check(CLI::ExistingFile);
  sat->add_option("--b2", o.b2, "Hold b2 at this value")->check(CLI::PositiveNumber);
  sat->add_option("--power", o.power, "Laser power in nW for the photon number");
  sat->add_option("--max-evals", o.max_evals, "Function-evaluation budget of the fit")
      ->check(CLI::PositiveNumber);

  auto* conc = app.add_subcommand("concurrence", "Concurrence with Poisson bootstrap");
  common(conc, false);
  conc->add_option("--counts", o.counts, "Counts table outcome,counts")
      ->required()
      ->check(CLI::ExistingFile);
  conc->add_option("--seed", o.seed, "Bootstrap seed");
  conc->add_option("--resamples", o.resamples, "Bootstrap resamples (>= 100)");
  conc->add_option("--mx", o.m_x, "M_x when the table has no mid-window X counts");
  conc->add_option("--my", o.m_y, "M_y when the table has no mid-window Y counts");
  conc->add_flag("--timestamp", o.timestamp, "Add a UTC timestamp to the provenance block");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*budget) return cmd_budget(o);
    if (*sweep) return cmd_sweep(o);
    if (*vis) return cmd_visibility(o);
    if (*sat) return cmd_saturation(o);
    if (*conc) return cmd_concurrence(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const DataFormatError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return o.counts.empty() && o.data.empty() ? kConfig : kData;
  }
  return kOk;
}

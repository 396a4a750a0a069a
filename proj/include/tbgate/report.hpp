#pragma once

// Reports produced by the command-line tool: the fidelity budget, parameter
// sweeps, and their JSON / CSV forms.

#include "tbgate/config.hpp"
#include "tbgate/metrics.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tbgate {

inline constexpr const char* kToolVersion = "0.1.0";

/// Rounds to 12 significant digits. Idempotent.
double round12(double v);
/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(const std::string& text);

struct Provenance {
  std::string config_hash;
  std::string tool_version = kToolVersion;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> timestamp;

  bool operator==(const Provenance&) const = default;
};

struct RunReport {
  std::string inputs;  // serialized config
  std::vector<BudgetEntry> budget;  // multiplicative rows
  double conditional_fidelity = 0.0;
  double product_fidelity = 0.0;
  double overall_fidelity = 0.0;  // exact pipeline
  double discrepancy = 0.0;       // overall - product
  double success_prob = 0.0;      // exact heralded trace
  double success_prob_closed_form = 0.0;
  Contrasts contrasts;
  double contrast_fidelity = 0.0;
  double visibility = 0.0;
  double visibility_linear = 0.0;
  std::optional<double> concurrence;
  std::vector<std::string> warnings;
  Provenance provenance;
};

bool operator==(const RunReport& a, const RunReport& b);

/// Exact pipeline plus the multiplicative budget (conditional fidelity,
/// spin flip with readout, driving dephasing). Values are rounded with round12.
RunReport make_budget_report(const Config& config);

nlohmann::json to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::json& j);

struct SweepRow {
  int index = 0;
  double value = 0.0;
  double fidelity = 0.0;
  double success_prob = 0.0;
  double visibility = 0.0;
  double f_kappa = 0.0;    // spin flip only, mirror amplitudes
  double f_kappa_r = 0.0;  // spin flip and readout, mirror amplitudes
};

/// One row per grid point from `from` to `to` inclusive. A zero-length range
/// gives a single row. Rows are computed on up to `jobs` threads and returned
/// in grid order. Throws ConfigError for an unknown parameter.
std::vector<SweepRow> run_sweep(const Config& base, const std::string& param, double from,
                                double to, int steps, int jobs = 1);

std::string sweep_csv(const std::string& param, const std::vector<SweepRow>& rows);
std::string format12(double v);

}  // namespace tbgate

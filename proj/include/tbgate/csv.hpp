#pragma once

// Readers for the coincidence-count, saturation and visibility tables.
// Columns are matched by header name; extra columns are ignored.

#include "tbgate/calibration.hpp"
#include "tbgate/metrics.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace tbgate {

class DataFormatError : public std::runtime_error {
 public:
  DataFormatError(std::string source, int row, const std::string& message);

  int row() const noexcept { return row_; }

 private:
  int row_;
};

/// outcome,counts with outcome in e_up, e_down, l_up, l_down, mid_x_plus,
/// mid_x_minus, mid_y_plus, mid_y_minus. Z-basis outcomes are required.
CoincidenceCounts parse_counts_csv(const std::string& text, const std::string& source = "<counts>");
/// power_nw,counts[,spin_state]
std::vector<SaturationPoint> parse_saturation_csv(const std::string& text,
                                                  const std::string& source = "<saturation>");
/// n_bar,visibility[,visibility_err]
std::vector<VisibilityPoint> parse_visibility_csv(const std::string& text,
                                                  const std::string& source = "<visibility>");

std::string read_text_file(const std::string& path);

}  // namespace tbgate

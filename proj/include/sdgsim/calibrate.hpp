#pragma once

#include <string>
#include <vector>

#include "sdgsim/config.hpp"

namespace sdg {

// One calibration target: a measured quantity and the band it must land
// in. Boolean checks encode as measured 1 or 0 against the band [1, 1].
struct CalibrationRow {
  std::string check;
  double measured = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool pass = false;
};

// Runs the full target table against the given configuration. Covers
// leakage levels and ratios, trip and read-disturb ordering, noise-margin
// bands, write margins, delays, standby self-bias, the power-report
// orderings and the half-select disturb bands. Deterministic.
std::vector<CalibrationRow> run_calibration(const Config& cfg);

bool all_pass(const std::vector<CalibrationRow>& rows);

}  // namespace sdg

#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sdgsim/array.hpp"
#include "sdgsim/cell.hpp"
#include "sdgsim/device.hpp"
#include "sdgsim/power.hpp"
#include "sdgsim/sequencer.hpp"

namespace sdg {

// Bad key, bad value, or inconsistent combination. Carries the source line
// (0 for --set overrides) and the offending "section.key" so the CLI can
// point at it.
class config_error : public std::runtime_error {
 public:
  config_error(const std::string& msg, int line, std::string key)
      : std::runtime_error(msg), line_(line), key_(std::move(key)) {}
  int line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  int line_;
  std::string key_;
};

// Every tunable in one flat struct. Section.key names used by the INI
// parser and --set live in the registry in config.cpp; the builders below
// turn the raw numbers into model objects.
struct Config {
  // [devices]
  double nmos_k_a_per_v2 = 3.0e-4;
  double pmos_k_a_per_v2 = 1.5e-4;
  double swing_mv = 95.0;
  double dibl_v_per_v = 0.06;
  double lambda_per_v = 0.05;
  double vt_tempco_v_per_k = 0.85e-3;
  double gate_leak_frac = 0.01;
  double lvt_v = 0.230;
  double svt_v = 0.440;
  double hvt_v = 0.600;

  // [corners]
  double sigma_vth_v = 0.040;
  double sigma_k_frac = 0.10;

  // [cell]
  double vddm_v = 1.3;
  double vmin_v = 0.7;  // vddm - vssm, the retention headroom
  double beta_6t = 1.4;
  std::string inverter_flavor = "hvt";
  std::string access_flavor = "svt";
  double w1_vg1_v = 0.1;  // vg1 the selected row sees while writing a 1
  double w0_vg1_v = 0.0;  // and while writing a 0
  double g_equalizer_s = 3.0e-3;
  double g_w1_pulldown_s = 1.0e-3;

  // [array]
  int total_cells = 65536;
  int cells_per_subcolumn = 64;
  int bits_per_word = 16;
  double c_bl_f = 50e-15;
  double c_vg1_f = 25e-15;
  double c_vg2_f = 25e-15;
  double c_vssm_read_64kb_f = 9e-12;  // scaled by total_cells / 65536
  double dt_s = 1.4e-9;
  double v_bl0_frac = 0.45;
  double v_bl1_frac = 1.0;
  int pattern_zeros = 8;  // zeros per word in the default read workload
  std::string i_avg_mode = "end";
  double rd_stby_overlap_c = 0.0;
  double m1_w_um = 24.0;
  double m2_w_um = 26.0;

  // [timing]
  double wl_slew_v_per_s = 5e9;
  double c_node_f = 0.4e-15;
  double sense_frac = 0.5;
  double write_pulse_s = 1.4e-9;
  double t_max_s = 5e-8;

  // [power]
  double c_gbit_f = 50e-15;
  double c_gwr_f = 3e-12;
  double duty_hz = 2.0e7;
  bool ground_hold = false;

  double vssm_v() const { return vddm_v - vmin_v; }

  DeviceParams device(Polarity p, VtFlavor f) const;
  CellTopology cell_5t() const;
  CellTopology cell_6t() const;
  ArrayConfig array_config() const;
  TimingModel timing_model() const;
  WriteDrive write_drive() const;
  PowerParams power_params() const;
  PowerContext power_context() const;
  Corner corner(const std::string& name, double temperature_c) const;
  IAvgMode i_avg() const;

  // Throws config_error when the numbers cannot work together.
  void validate() const;
};

// Parses INI text (sections, key=value, # or ; comments). Unknown sections
// or keys throw config_error with the line number. Empty input leaves the
// defaults alone.
void parse_ini(Config& cfg, const std::string& text);

// Applies one "section.key=value" override, as given on the command line.
void apply_set(Config& cfg, const std::string& assignment);

// Every key with its current value, in registry order, for echoing the
// effective configuration into run summaries.
std::vector<std::pair<std::string, std::string>> echo_config(
    const Config& cfg);

VtFlavor flavor_from_string(const std::string& s);  // "lvt" / "svt" / "hvt"

}  // namespace sdg

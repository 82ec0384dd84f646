#pragma once

#include <string>

// Compact MOSFET model for bistable-cell DC and leakage analysis.
// A single smooth charge-interpolation expression covers subthreshold
// through strong inversion, so Newton iterations never straddle a
// piecewise boundary. Currents are in amps, voltages in volts.

namespace sdg {

enum class Polarity { NMOS, PMOS };
enum class VtFlavor { LVT, SVT, HVT };

double nominal_vth(VtFlavor f);

// Process corner plus operating temperature. Scales fold into the
// effective device; they are not applied anywhere else.
struct Corner {
  std::string name = "TT";
  double nmos_scale = 1.0;
  double pmos_scale = 1.0;
  double nmos_vth_shift_v = 0.0;
  double pmos_vth_shift_v = 0.0;
  double temperature_c = 27.0;

  // Builds one of TT/FF/SS/FS/SF from the usual one-sigma process
  // spreads. Throws std::invalid_argument for anything else.
  static Corner make(const std::string& name, double temperature_c,
                     double sigma_vth_v = 0.040, double sigma_k_frac = 0.10);

  Corner at(double new_temperature_c) const;
};

struct DeviceParams {
  Polarity polarity = Polarity::NMOS;
  double width_um = 0.15;
  double length_um = 0.06;
  double vth_nominal_v = 0.600;
  // Current scale per square; absolute level is usually recalibrated
  // through off_current_scale_a, ratios are what the margins feel.
  double transconductance_a_per_v2 = 3.0e-4;
  double subthreshold_swing_mv = 100.0;   // mV/decade at 27 C
  double dibl_v_per_v = 0.07;
  double lambda_per_v = 0.05;
  double vt_tempco_v_per_k = 0.85e-3;     // Vt drops this much per kelvin
  double thermal_voltage_ref_v = 0.025852;  // kT/q at 27 C
  double gate_leak_frac = 0.01;           // gate leak as fraction of Ioff
  double off_current_scale_a = 0.0;       // >0 pins Ioff(TT,27C,1.3V) to this
  double vth_offset_v = 0.0;              // local mismatch knob, default none

  static DeviceParams nmos(VtFlavor f);
  static DeviceParams pmos(VtFlavor f);
};

// DeviceParams folded with a corner and temperature: everything the
// current evaluation needs, precomputed once per sweep point.
struct EffDevice {
  bool is_nmos = true;
  double vt0 = 0.6;        // effective threshold before DIBL
  double n = 1.737;        // subthreshold slope factor
  double phit = 0.025852;  // thermal voltage at T
  double inv_2nphit = 0.0;
  double inv_2phit = 0.0;
  double dibl = 0.07;
  double lambda = 0.05;
  double i_spec = 0.0;     // 2 n K (W/L) phit^2, corner-scaled
  double g_gate = 0.0;     // gate leakage as a linear conductance
};

EffDevice fold(const DeviceParams& p, const Corner& c);
EffDevice fold(const DeviceParams& p, const Corner& c, double temperature_c);

struct IdsResult {
  double i = 0.0;
  double di_dvgs = 0.0;
  double di_dvds = 0.0;
};

// Terminal convention: vgs and vds are the device's own gate-source and
// drain-source drops, both referred to the source, vds >= 0. PMOS callers
// pass vsg/vsd. Negative vgs is fine (deep cutoff); negative vds is not,
// swap terminals instead.
IdsResult drain_current_d(const EffDevice& d, double vgs, double vds);
double drain_current(const EffDevice& d, double vgs, double vds);

// Channel leakage at vgs = 0 plus the gate-leak conductance term.
double off_leakage(const DeviceParams& p, const Corner& c, double vds);
double off_leakage(const DeviceParams& p, const Corner& c, double vds,
                   double temperature_c);

}  // namespace sdg

#pragma once

#include <string>
#include <vector>

#include "sdgsim/array.hpp"
#include "sdgsim/cell.hpp"

namespace sdg {

// Plain switched-capacitance power. Exact by construction: no rounding
// model, no fitted fudge, so scaling any input scales the result the
// obvious way.
double dynamic_power(double c_load_f, double delta_v, double freq_hz);

// Word-level operations the report decomposes. ReadZeros/WriteZeros act on
// an all-'0' word (the expensive direction), ReadOnes/WriteOnes on all-'1'.
enum class OpKind { Standby, ReadZeros, ReadOnes, WriteZeros, WriteOnes };
const char* op_kind_name(OpKind k);  // STBY / R0 / R1 / W0 / W1

// The three array styles the comparison covers: the dual-ground five-T
// cell, a six-T array with the same raised ground, and a six-T array with
// its sources on the hard rail.
enum class Scheme { FiveTSDG, LP6T, Conv6T };
const char* scheme_name(Scheme s);

struct PowerParams {
  double c_gbit_f = 50e-15;       // global read line, per bit column
  double c_gwr_f = 3e-12;         // write-path control load, per word op
  double duty_hz = 2.0e7;         // accesses per second in the report
  bool ground_hold = false;       // burst mode: grounds stay low between reads
  double g_equalizer_s = 3.0e-3;  // couples the two ground lines during W1
  double g_w1_pulldown_s = 1.0e-3;
  double write_pulse_s = 1.4e-9;
  double w0_vg1_v = 0.0;          // level the inverter-1 ground dips to in W0
};

struct PowerContext {
  CellTopology cell_5t = CellTopology::five_t_sdg();
  CellTopology cell_6t = CellTopology::six_t();
  ArrayConfig array = ArrayConfig::defaults();
  PowerParams params;
  double vddm = 1.3;
  double vmin = 0.7;  // vddm - vssm for the raised-ground schemes
};

// Raised-ground schemes keep vmin across the cell; the conventional array
// grounds at zero.
double scheme_vssm(const PowerContext& ctx, Scheme s);

// Per-cell standby currents, split by where they are drawn from.
struct LeakSplit {
  double supply_a = 0.0;   // vddm rail through the inverters
  double bitline_a = 0.0;  // precharged bitlines through the access devices
  double total_a() const { return supply_a + bitline_a; }
};

// State-weighted 50/50 over both stored polarities. The corner carries its
// own temperature.
LeakSplit standby_cell_leak(const PowerContext& ctx, Scheme s,
                            const Corner& corner);

// total_cells * per-cell leakage * voltage across the cell. The ground-bias
// generator's own standing current and sense-amplifier static current are
// excluded; the report notes both exclusions.
double standby_power_w(const PowerContext& ctx, Scheme s, const Corner& corner);

struct PowerBreakdown {
  Scheme scheme = Scheme::FiveTSDG;
  std::string corner_name;
  double temp_c = 27.0;
  OpKind op = OpKind::Standby;
  double standby_w = 0.0;
  double ground_swing_w = 0.0;  // ground-line swings plus W1 crowbar
  double bitline_w = 0.0;       // local bitline charge/discharge
  double globalbit_w = 0.0;     // global read and write lines
  double total_w = 0.0;         // always the sum of the four parts
  double normalized = 1.0;
};

// Energy one access costs, by bucket, before duty scaling. Bucket recipes:
//  - reads swing the ground lines (5T only), the '0' bitlines by the sense
//    swing, and the global read line: per-'0' at vssm for 5T, per-bit at
//    vddm for the differential 6T path;
//  - W0 cycles the bitlines through vssm and dips the inverter-1 ground;
//  - W1 lifts the bitlines to vddm, fires the write-control load, and burns
//    the equalizer crowbar for one pulse.
struct OpEnergy {
  double ground_swing_j = 0.0;
  double bitline_j = 0.0;
  double globalbit_j = 0.0;
  double total_j() const { return ground_swing_j + bitline_j + globalbit_j; }
};
OpEnergy op_energy(const PowerContext& ctx, Scheme s, OpKind op);

PowerBreakdown op_power(const PowerContext& ctx, Scheme s, const Corner& corner,
                        OpKind op);

// 5 operation rows for each scheme, normalized to the first row's total.
std::vector<PowerBreakdown> compare_report(const PowerContext& ctx,
                                           const Corner& corner);

// ReadZeros power across supply points with vssm tracking vddm - vmin.
// normalized is relative to the first point.
std::vector<PowerBreakdown> read_power_vs_vddm(const PowerContext& ctx,
                                               const Corner& corner,
                                               const std::vector<double>& vddm);

}  // namespace sdg

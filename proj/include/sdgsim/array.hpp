#pragma once

#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

#include "sdgsim/cell.hpp"

namespace sdg {

// Capacitance budget and cycle timing of one memory macro. c_vssm_read_f is
// the raised-ground tank alone; the standby tank adds every bitline and
// ground-line segment that re-merges with the rail between accesses.
struct ArrayConfig {
  int cells_per_subcolumn = 64;
  int bits_per_word = 16;
  int total_cells = 65536;
  double c_bl_f = 50e-15;
  double c_vg1_f = 25e-15;
  double c_vg2_f = 25e-15;
  double c_vssm_read_f = 9e-12;
  double dt_s = 1.4e-9;
  double v_bl0_frac = 0.45;  // level a read leaves a '0' bitline at, vs vssm
  double v_bl1_frac = 1.0;   // same for a '1' bitline
  double rd_stby_overlap_c = 0.0;  // extra charge bled per cycle, coulombs
  DeviceParams clamp_m1;  // diode-tied PMOS sourcing from vddm
  DeviceParams clamp_m2;  // diode-tied NMOS sinking to the hard rail

  static ArrayConfig defaults();
};

// c_vssm_read_f plus one word's worth of bitline and ground-line segments.
double standby_tank_cap_f(const ArrayConfig& cfg);

struct VssmState {
  double vssm = 0.6;
  int cycle_index = 0;
  int n_b0 = 8;        // bits read as '0' this cycle
  int n_b1 = 8;        // bits read as '1'
  double v_bl0 = 0.0;  // absolute bitline levels being re-merged
  double v_bl1 = 0.0;
  double i_avg = 0.0;  // leak-model current applied over the cycle
};

// Charge-sharing survival fraction for one precharge-equalize event.
// Throws std::domain_error when vssm is too small to divide by.
double phi(const VssmState& s, const ArrayConfig& cfg);

// Same charge balance written as (sum of charges)/(total capacitance);
// algebraically equal to phi*vssm, evaluated independently.
double oracle_charge_sharing(const VssmState& s, const ArrayConfig& cfg);

// Where inside the cycle the leak current is sampled. EndOfCycle solves the
// implicit balance and is unconditionally stable; StartOfCycle samples right
// after the charge share; Trapezoid averages the two.
enum class IAvgMode { EndOfCycle, StartOfCycle, Trapezoid };

// Net current into the raised-ground tank as a function of its voltage.
using LeakFn = std::function<double(double)>;

// Aggregate of every cell's ground-node leakage plus the global clamp pair.
// Cell solves are memoized on a 1 mV grid because traces revisit nearby
// voltages constantly. Not thread-safe: share one instance per trace.
class VssmLeakModel {
 public:
  VssmLeakModel(const CellTopology& cell, const Corner& corner,
                const ArrayConfig& cfg, double vddm);

  // total_cells * per-cell inflow + clamp source - clamp sink, amperes.
  double net_current_a(double vssm) const;
  // Per-cell inflow averaged over both stored polarities.
  double cell_current_a(double vssm) const;
  double clamp_source_a(double vssm) const;
  double clamp_sink_a(double vssm) const;
  double vddm_v() const { return vddm_; }

  LeakFn as_fn() const;

 private:
  double cell_at_node(int idx) const;

  CellTopology cell_;
  Corner corner_;
  int total_cells_;
  double vddm_;
  EffDevice m1_, m2_;
  mutable std::unordered_map<int, double> grid_;
};

struct VssmTracePoint {
  int cycle = 0;
  double vssm = 0.0;
  double delta_v = 0.0;  // drop to the next cycle
};

struct VssmTrace {
  std::vector<VssmTracePoint> samples;
  std::optional<double> steady_state;
  double delta_v_tot = 0.0;  // first sample minus settled value
};

// One read cycle: charge share with the returning bitlines, then the leak
// model acts for dt. Bitline levels are refreshed from the config fractions
// of the entry voltage. The returned state satisfies
//   vssm' == phi*vssm - rd_stby_overlap_c/C + i_avg*dt/C
// exactly as written, so the charge-sharing term can be recovered by
// subtracting the leak term.
VssmState step_read_cycle(const VssmState& s, const ArrayConfig& cfg,
                          const LeakFn& net_leak,
                          IAvgMode mode = IAvgMode::EndOfCycle);

// Same cycle with the returning bitline levels given outright, for write
// cycles that drove them to a rail instead of letting the cells set them.
VssmState step_cycle_with_levels(const VssmState& s, const ArrayConfig& cfg,
                                 const LeakFn& net_leak, double v_bl0,
                                 double v_bl1,
                                 IAvgMode mode = IAvgMode::EndOfCycle);

// A cycle with no access: nothing splits off the rail, so there is no
// charge share, only the leak model acting for dt.
VssmState step_standby_cycle(const VssmState& s, const ArrayConfig& cfg,
                             const LeakFn& net_leak,
                             IAvgMode mode = IAvgMode::EndOfCycle);

// Repeated read cycles from v0 until both the per-cycle drop and the
// projected remaining gap to the limit fall under stop_delta_v (default
// 10 uV), so the reported steady state is itself good to that resolution.
// steady_state stays empty if max_cycles runs out first.
VssmTrace run_to_steady_state(const ArrayConfig& cfg, const LeakFn& net_leak,
                              int n_b0, int n_b1, double v0, int max_cycles,
                              IAvgMode mode = IAvgMode::EndOfCycle,
                              double stop_delta_v = 1e-5);

// Self-consistent cycling voltage: the fixed point of one read cycle,
// found by bisection between near-zero and the standby equilibrium.
// Throws std::runtime_error when no sign change brackets a root.
double steady_state_fixed_point(const ArrayConfig& cfg, const LeakFn& net_leak,
                                int n_b0, int n_b1,
                                IAvgMode mode = IAvgMode::EndOfCycle);

// Voltage where the leak model balances to zero net current.
double standby_equilibrium(const LeakFn& net_leak, double vddm);

struct TimePoint {
  double t_s = 0.0;
  double vssm = 0.0;
};

// Free relaxation of the standby tank from v0: integrates
// dV/dt = net_leak(V)/C with an adaptive midpoint integrator until
// the slew drops into the microvolt-per-cycle range. Throws
// std::runtime_error on step underflow or when the rail refuses to settle.
std::vector<TimePoint> standby_rise(const ArrayConfig& cfg,
                                    const LeakFn& net_leak, double v0);

// Peak |vssm - standby level| over n_reads consecutive read cycles that
// start from the standby equilibrium.
double read_mode_excursion(const ArrayConfig& cfg, const LeakFn& net_leak,
                           int n_b0, int n_b1, int n_reads,
                           IAvgMode mode = IAvgMode::EndOfCycle);

}  // namespace sdg

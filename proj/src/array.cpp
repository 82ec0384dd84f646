#include "sdgsim/array.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace sdg {

namespace {

constexpr double kMinVssmForPhi = 1e-6;
constexpr double kGridStepV = 1e-3;

}  // namespace

ArrayConfig ArrayConfig::defaults() {
  ArrayConfig cfg;
  // The clamp pair is sized so the tank self-biases near 0.6 V and the
  // combined small-signal conductance at that point absorbs a read burst
  // with under 25 mV of droop. They are global devices: scaling the array
  // grows the tank capacitance, not the clamps.
  cfg.clamp_m1 = DeviceParams::pmos(VtFlavor::SVT);
  cfg.clamp_m1.width_um = 24.0;
  cfg.clamp_m2 = DeviceParams::nmos(VtFlavor::SVT);
  cfg.clamp_m2.width_um = 26.0;
  return cfg;
}

double standby_tank_cap_f(const ArrayConfig& cfg) {
  return cfg.c_vssm_read_f +
         cfg.bits_per_word * (cfg.c_bl_f + cfg.c_vg1_f + cfg.c_vg2_f);
}

double phi(const VssmState& s, const ArrayConfig& cfg) {
  if (!(s.vssm > kMinVssmForPhi)) {
    throw std::domain_error("phi: vssm of " + std::to_string(s.vssm) +
                            " V is too small to form bitline ratios");
  }
  double shared = (s.v_bl0 / s.vssm) * s.n_b0 + (s.v_bl1 / s.vssm) * s.n_b1;
  return (cfg.c_vssm_read_f + shared * cfg.c_bl_f) / standby_tank_cap_f(cfg);
}

double oracle_charge_sharing(const VssmState& s, const ArrayConfig& cfg) {
  // Plain conservation: pre-share charges summed, divided by the merged
  // capacitance. The ground-line segments were cycled to the hard rail
  // during the access, so they re-merge carrying no charge; only the read
  // tank and the returning bitlines contribute.
  double q_tank = cfg.c_vssm_read_f * s.vssm;
  double q_bl = (s.n_b0 * s.v_bl0 + s.n_b1 * s.v_bl1) * cfg.c_bl_f;
  return (q_tank + q_bl) / standby_tank_cap_f(cfg);
}

VssmLeakModel::VssmLeakModel(const CellTopology& cell, const Corner& corner,
                             const ArrayConfig& cfg, double vddm)
    : cell_(cell),
      corner_(corner),
      total_cells_(cfg.total_cells),
      vddm_(vddm),
      m1_(fold(cfg.clamp_m1, corner)),
      m2_(fold(cfg.clamp_m2, corner)) {}

double VssmLeakModel::clamp_source_a(double vssm) const {
  double v = std::max(0.0, vddm_ - vssm);
  return drain_current(m1_, v, v) + m1_.g_gate * v;
}

double VssmLeakModel::clamp_sink_a(double vssm) const {
  double v = std::max(0.0, vssm);
  return drain_current(m2_, v, v) + m2_.g_gate * v;
}

double VssmLeakModel::cell_at_node(int idx) const {
  auto hit = grid_.find(idx);
  if (hit != grid_.end()) return hit->second;

  double v = idx * kGridStepV;
  BiasCondition b = standby_bias(cell_.kind, vddm_, v);
  FoldedCell f = fold_cell(cell_, corner_);
  double inflow = 0.0;
  for (bool bit : {false, true}) {
    NodeVoltages nv = stored_state(f, b, bit);
    BranchCurrents bc = branch_currents(f, b, nv);
    double into_grounds = bc.n1_qz_to_vg1 + bc.n2_q_to_vg2;
    if (cell_.kind == CellKind::FiveTSDG) {
      // Idle bitlines hang off the same rail, so the access branch lands
      // in the tank as well.
      into_grounds += bc.n3_q_to_vbl;
    }
    inflow += 0.5 * into_grounds;
  }
  grid_.emplace(idx, inflow);
  return inflow;
}

double VssmLeakModel::cell_current_a(double vssm) const {
  double u = std::max(0.0, vssm) / kGridStepV;
  int lo = static_cast<int>(std::floor(u));
  double frac = u - lo;
  if (frac == 0.0) return cell_at_node(lo);
  return (1.0 - frac) * cell_at_node(lo) + frac * cell_at_node(lo + 1);
}

double VssmLeakModel::net_current_a(double vssm) const {
  return total_cells_ * cell_current_a(vssm) + clamp_source_a(vssm) -
         clamp_sink_a(vssm);
}

LeakFn VssmLeakModel::as_fn() const {
  return [this](double v) { return net_current_a(v); };
}

namespace {

// Solves x = base + k*net(x). The balance is strictly decreasing in x for
// any physical leak model (net falls as the tank rises), so a sign-change
// bisection is enough and never misses.
double solve_end_of_cycle(double base, double k, const LeakFn& net, double hi) {
  double lo = -0.1;
  hi += 0.2;
  auto g = [&](double x) { return x - base - k * net(x); };
  double glo = g(lo);
  double ghi = g(hi);
  if (glo > 0.0 || ghi < 0.0) {
    throw std::runtime_error(
        "step_read_cycle: implicit balance not bracketed; leak model is not "
        "decreasing over the rail span");
  }
  for (int i = 0; i < 80; ++i) {
    double mid = 0.5 * (lo + hi);
    if (g(mid) <= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

VssmState step_cycle_with_levels(const VssmState& s, const ArrayConfig& cfg,
                                 const LeakFn& net_leak, double v_bl0,
                                 double v_bl1, IAvgMode mode) {
  VssmState next = s;
  next.v_bl0 = v_bl0;
  next.v_bl1 = v_bl1;

  VssmState pre = next;  // carries the bitline levels phi consumes
  double c_stby = standby_tank_cap_f(cfg);
  double shared = phi(pre, cfg) * s.vssm - cfg.rd_stby_overlap_c / c_stby;
  double k = cfg.dt_s / c_stby;

  double i_avg = 0.0;
  switch (mode) {
    case IAvgMode::StartOfCycle:
      i_avg = net_leak(shared);
      break;
    case IAvgMode::EndOfCycle: {
      double x = solve_end_of_cycle(shared, k, net_leak, s.vssm + 0.3);
      i_avg = net_leak(x);
      break;
    }
    case IAvgMode::Trapezoid: {
      double i0 = net_leak(shared);
      LeakFn avg = [&](double x) { return 0.5 * (i0 + net_leak(x)); };
      double x = solve_end_of_cycle(shared, k, avg, s.vssm + 0.3);
      i_avg = avg(x);
      break;
    }
  }

  // Assembled exactly in this form so callers can peel the leak term back
  // off and recover the pure charge-sharing voltage.
  next.vssm = shared + i_avg * k;
  next.i_avg = i_avg;
  next.cycle_index = s.cycle_index + 1;
  return next;
}

VssmState step_read_cycle(const VssmState& s, const ArrayConfig& cfg,
                          const LeakFn& net_leak, IAvgMode mode) {
  return step_cycle_with_levels(s, cfg, net_leak, cfg.v_bl0_frac * s.vssm,
                                cfg.v_bl1_frac * s.vssm, mode);
}

VssmState step_standby_cycle(const VssmState& s, const ArrayConfig& cfg,
                             const LeakFn& net_leak, IAvgMode mode) {
  VssmState next = s;
  double c_stby = standby_tank_cap_f(cfg);
  double k = cfg.dt_s / c_stby;
  double base = s.vssm;

  double i_avg = 0.0;
  switch (mode) {
    case IAvgMode::StartOfCycle:
      i_avg = net_leak(base);
      break;
    case IAvgMode::EndOfCycle: {
      double x = solve_end_of_cycle(base, k, net_leak, s.vssm + 0.3);
      i_avg = net_leak(x);
      break;
    }
    case IAvgMode::Trapezoid: {
      double i0 = net_leak(base);
      LeakFn avg = [&](double x) { return 0.5 * (i0 + net_leak(x)); };
      double x = solve_end_of_cycle(base, k, avg, s.vssm + 0.3);
      i_avg = avg(x);
      break;
    }
  }
  next.vssm = base + i_avg * k;
  next.i_avg = i_avg;
  next.cycle_index = s.cycle_index + 1;
  return next;
}

VssmTrace run_to_steady_state(const ArrayConfig& cfg, const LeakFn& net_leak,
                              int n_b0, int n_b1, double v0, int max_cycles,
                              IAvgMode mode, double stop_delta_v) {
  VssmTrace trace;
  VssmState s;
  s.vssm = v0;
  s.n_b0 = n_b0;
  s.n_b1 = n_b1;
  // The per-cycle droop shrinks geometrically with ratio r close to the
  // survival fraction, so when a step of size dv lands the remaining gap to
  // the limit is about dv*r/(1-r), several times dv itself. Estimate r from
  // consecutive droops and keep cycling until the projected gap is inside
  // the requested resolution, not just the last step.
  double prev_dv = 0.0;
  for (int i = 0; i < max_cycles; ++i) {
    VssmState nxt = step_read_cycle(s, cfg, net_leak, mode);
    double dv = s.vssm - nxt.vssm;
    trace.samples.push_back({s.cycle_index, s.vssm, dv});
    s = nxt;
    if (std::fabs(dv) < stop_delta_v) {
      double r = (i > 0 && std::fabs(prev_dv) > 0.0)
                     ? std::fabs(dv) / std::fabs(prev_dv)
                     : 0.0;
      double tail = (r < 1.0) ? std::fabs(dv) * r / (1.0 - r)
                              : std::numeric_limits<double>::infinity();
      if (tail < stop_delta_v) {
        trace.steady_state = s.vssm;
        break;
      }
    }
    prev_dv = dv;
  }
  trace.samples.push_back({s.cycle_index, s.vssm, 0.0});
  if (trace.steady_state) trace.delta_v_tot = v0 - *trace.steady_state;
  return trace;
}

double steady_state_fixed_point(const ArrayConfig& cfg, const LeakFn& net_leak,
                                int n_b0, int n_b1, IAvgMode mode) {
  auto residual = [&](double v) {
    VssmState s;
    s.vssm = v;
    s.n_b0 = n_b0;
    s.n_b1 = n_b1;
    return v - step_read_cycle(s, cfg, net_leak, mode).vssm;
  };
  double lo = 2.0 * kMinVssmForPhi;
  double hi = standby_equilibrium(net_leak, 1.5) + 0.05;
  double rlo = residual(lo);
  double rhi = residual(hi);
  if (rlo * rhi > 0.0) {
    throw std::runtime_error(
        "steady_state_fixed_point: no sign change on [" + std::to_string(lo) +
        ", " + std::to_string(hi) + "]; no cycling steady state exists");
  }
  for (int i = 0; i < 80; ++i) {
    double mid = 0.5 * (lo + hi);
    if (residual(mid) * rlo > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double standby_equilibrium(const LeakFn& net_leak, double vddm) {
  double lo = 0.0;
  double hi = std::max(vddm, 1.5);
  double flo = net_leak(lo);
  double fhi = net_leak(hi);
  if (flo <= 0.0) return lo;
  if (fhi >= 0.0) return hi;
  for (int i = 0; i < 80; ++i) {
    double mid = 0.5 * (lo + hi);
    if (net_leak(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<TimePoint> standby_rise(const ArrayConfig& cfg,
                                    const LeakFn& net_leak, double v0) {
  double c = standby_tank_cap_f(cfg);
  auto f = [&](double v) { return net_leak(v) / c; };

  // The stop rate has to sit above the integrator's own noise floor: each
  // accepted step may be off by kTolV, and the tank pulls back at roughly
  // (clamp conductance / C) ~ 2e9 per second, so rates below ~1e3 V/s are
  // indistinguishable from jitter.  5e3 V/s corresponds to a residual offset
  // of a few microvolts, well past where the curve is flat.
  constexpr double kStopRate = 5e3;    // volts per second
  constexpr double kTolV = 5e-7;       // per-step error budget
  constexpr double kMinStep = 1e-15;
  constexpr int kMaxAccepted = 200000;

  auto midpoint = [&](double v, double h) {
    double k1 = f(v);
    double k2 = f(v + 0.5 * h * k1);
    return v + h * k2;
  };

  std::vector<TimePoint> out;
  double t = 0.0;
  double v = v0;
  out.push_back({t, v});
  if (std::fabs(f(v)) < kStopRate) return out;

  double h = 1e-12;
  for (int accepted = 0; accepted < kMaxAccepted; ++accepted) {
    double big = midpoint(v, h);
    double half = midpoint(midpoint(v, 0.5 * h), 0.5 * h);
    double err = std::fabs(big - half);
    if (err > kTolV) {
      h *= 0.5;
      if (h < kMinStep) {
        throw std::runtime_error(
            "standby_rise: integrator step underflow near t=" +
            std::to_string(t) + " s");
      }
      continue;
    }
    v = half;
    t += h;
    out.push_back({t, v});
    if (std::fabs(f(v)) < kStopRate) return out;
    if (err < 0.25 * kTolV) h *= 1.5;
  }
  throw std::runtime_error(
      "standby_rise: no settle after maximum accepted steps");
}

double read_mode_excursion(const ArrayConfig& cfg, const LeakFn& net_leak,
                           int n_b0, int n_b1, int n_reads, IAvgMode mode) {
  double v0 = standby_equilibrium(net_leak, 1.5);
  VssmState s;
  s.vssm = v0;
  s.n_b0 = n_b0;
  s.n_b1 = n_b1;
  double peak = 0.0;
  for (int i = 0; i < n_reads; ++i) {
    s = step_read_cycle(s, cfg, net_leak, mode);
    peak = std::max(peak, std::fabs(s.vssm - v0));
  }
  return peak;
}

}  // namespace sdg

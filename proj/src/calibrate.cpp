#include "sdgsim/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sdgsim/array.hpp"
#include "sdgsim/cell.hpp"
#include "sdgsim/power.hpp"
#include "sdgsim/sequencer.hpp"

namespace sdg {

namespace {

CalibrationRow band(const std::string& check, double measured, double lo,
                    double hi) {
  return {check, measured, lo, hi, measured >= lo && measured <= hi};
}

CalibrationRow flag(const std::string& check, bool ok) {
  return {check, ok ? 1.0 : 0.0, 1.0, 1.0, ok};
}

const char* kCornerNames[5] = {"TT", "FF", "SS", "FS", "SF"};

}  // namespace

bool all_pass(const std::vector<CalibrationRow>& rows) {
  for (const auto& r : rows)
    if (!r.pass) return false;
  return true;
}

std::vector<CalibrationRow> run_calibration(const Config& cfg) {
  std::vector<CalibrationRow> rows;
  const double vddm = cfg.vddm_v;
  const double vssm = cfg.vssm_v();
  CellTopology c5 = cfg.cell_5t();
  PowerContext ctx = cfg.power_context();

  // Leakage level: one 64-cell sub-column in the worst corner, hot.
  {
    Corner ff = cfg.corner("FF", 120.0);
    LeakSplit per_cell = standby_cell_leak(ctx, Scheme::FiveTSDG, ff);
    double na = 64.0 * per_cell.total_a() * 1e9;
    rows.push_back(band("subcolumn_leak_ff120_na", na, 40.3, 120.9));
  }

  // Leakage ratio: conventional grounded array against the raised-ground
  // 6T at the same corner.
  {
    Corner ff = cfg.corner("FF", 120.0);
    double conv = standby_power_w(ctx, Scheme::Conv6T, ff);
    double lp = standby_power_w(ctx, Scheme::LP6T, ff);
    rows.push_back(band("leak_ratio_conv6t_lp6t_ff120", conv / lp, 11.0, 45.0));
  }

  // Trip level of the feedback inverter at standby bias, hot TT.
  {
    Corner tt = cfg.corner("TT", 120.0);
    double trip =
        trip_voltage(c5, tt, standby_bias(c5.kind, vddm, vssm)) * 1e3;
    rows.push_back(band("trip_tt120_mv", trip, 764.15, 1033.85));
  }

  // Read disturb ordering: disturbed levels stay on the safe side of the
  // trip voltage in every corner, hot. Measured value is the worst margin.
  {
    double worst = std::numeric_limits<double>::infinity();
    for (const char* name : kCornerNames) {
      Corner k = cfg.corner(name, 120.0);
      FoldedCell f = fold_cell(c5, k);
      BiasCondition rb = read_bias(c5.kind, vddm, vssm);
      ReadLevels lv = read_disturb_levels(f, rb);
      double trip = trip_voltage(f, standby_bias(c5.kind, vddm, vssm));
      worst = std::min(worst, trip - lv.q_low_v);
      worst = std::min(worst, lv.q_high_v - trip);
    }
    rows.push_back(band("read_disturb_margin_min_mv", worst * 1e3, 1e-3, 1e9));
  }

  // Access-device threshold flavor against read noise margin, cold corner
  // for NMOS-fast/PMOS-slow skew.
  {
    Corner fs = cfg.corner("FS", 120.0);
    double r[3];
    const char* flavors[3] = {"lvt", "svt", "hvt"};
    for (int i = 0; i < 3; ++i) {
      Config c = cfg;
      c.access_flavor = flavors[i];
      r[i] = rnm(c.cell_5t(), fs, vddm, vssm, vssm).value_mv;
    }
    rows.push_back(flag("rnm_flavor_ordering_fs120", r[0] < r[1] && r[1] < r[2]));
    rows.push_back(band("rnm_svt_fs120_mv", r[1], 120.61, 223.99));
  }

  // Write margins at nominal corner and temperature.
  {
    Corner tt = cfg.corner("TT", 27.0);
    BiasCondition wb = standby_bias(c5.kind, vddm, vssm);
    wb.vwl = vddm;
    wb.vg1 = cfg.w1_vg1_v;
    wb.vg2 = vssm;
    WriteResult w1 = write_margin(c5, tt, wb, WriteKind::WriteOne);
    rows.push_back(band("w1m_tt_v", w1.writable ? w1.margin_v : -1.0, 0.35,
                        0.65));
    wb.vg1 = cfg.w0_vg1_v;
    WriteResult w0 = write_margin(c5, tt, wb, WriteKind::WriteZero);
    rows.push_back(band("w0m_tt_v", w0.writable ? w0.margin_v : -1.0, 0.25,
                        0.55));
  }

  // Write-one delay: faster access flavors must write faster, and the
  // standard flavor lands in its band.
  {
    Corner tt = cfg.corner("TT", 27.0);
    TimingModel tm = cfg.timing_model();
    double vg1 = cfg.w1_vg1_v;
    double d[3];
    const char* flavors[3] = {"lvt", "svt", "hvt"};
    for (int i = 0; i < 3; ++i) {
      Config c = cfg;
      c.access_flavor = flavors[i];
      d[i] = w1_delay(c.cell_5t(), tt, tm, vddm, vssm, vg1, vssm);
    }
    rows.push_back(flag("w1_delay_flavor_ordering_tt",
                        d[0] < d[1] && d[1] < d[2] && std::isfinite(d[2])));
    rows.push_back(band("w1_delay_svt_tt_ps", d[1] * 1e12, 69.84, 162.96));
  }

  // A ratioed cell (wide driver pair, as a differential cell would size
  // it) without the raised rail or the ground dip must fail to write a one
  // through the single access device.
  {
    Corner tt = cfg.corner("TT", 27.0);
    CellTopology ratioed = c5;
    ratioed.n1.width_um *= cfg.beta_6t;
    ratioed.n2.width_um *= cfg.beta_6t;
    ratioed.cell_ratio_beta = cfg.beta_6t;
    BiasCondition wb = standby_bias(ratioed.kind, vddm, 0.0);
    wb.vwl = vddm;
    WriteResult w1 = write_margin(ratioed, tt, wb, WriteKind::WriteOne);
    rows.push_back(flag("ratioed_cell_w1_fails", !w1.writable));
  }

  // Standby self-bias and the net excursion under a read burst.
  {
    Corner ff = cfg.corner("FF", 120.0);
    ArrayConfig ac = cfg.array_config();
    VssmLeakModel leak(c5, ff, ac, vddm);
    double eq = standby_equilibrium(leak.as_fn(), vddm);
    rows.push_back(band("standby_equilibrium_ff120_v", eq, 0.57, 0.63));

    Corner tt = cfg.corner("TT", 27.0);
    VssmLeakModel leak_tt(c5, tt, ac, vddm);
    double exc = read_mode_excursion(ac, leak_tt.as_fn(), cfg.pattern_zeros,
                                     ac.bits_per_word - cfg.pattern_zeros,
                                     100, cfg.i_avg());
    rows.push_back(band("excursion_100reads_mv", exc * 1e3, 0.0, 25.0));
  }

  // Power orderings in the hot fast corner, totals including standby.
  {
    Corner ff = cfg.corner("FF", 120.0);
    auto total = [&](Scheme s, OpKind op) {
      return op_power(ctx, s, ff, op).total_w;
    };
    double r0_5t = total(Scheme::FiveTSDG, OpKind::ReadZeros);
    double r1_5t = total(Scheme::FiveTSDG, OpKind::ReadOnes);
    double r0_lp = total(Scheme::LP6T, OpKind::ReadZeros);
    double w0_5t = total(Scheme::FiveTSDG, OpKind::WriteZeros);
    double w1_5t = total(Scheme::FiveTSDG, OpKind::WriteOnes);
    double w0_lp = total(Scheme::LP6T, OpKind::WriteZeros);
    double w1_lp = total(Scheme::LP6T, OpKind::WriteOnes);
    rows.push_back(band("read_below_lp6t_ff120_pct",
                        100.0 * (r0_lp - r0_5t) / r0_lp, 20.0, 100.0));
    rows.push_back(band("r0_over_r1_gap_pp", 100.0 * (r0_5t - r1_5t) / r0_5t,
                        2.0, 12.0));
    rows.push_back(band("w0_below_lp6t_ff120_pct",
                        100.0 * (w0_lp - w0_5t) / w0_lp, 60.0, 100.0));
    rows.push_back(band("w1_below_lp6t_ff120_pp",
                        100.0 * (w1_lp - w1_5t) / w1_lp, 4.0, 14.0));
  }

  // Read power against supply: strictly increasing and convex with the
  // retention headroom held fixed, and the ground-swing part exactly
  // quadratic in the rail swing.
  {
    Corner tt = cfg.corner("TT", 27.0);
    std::vector<double> sweep;
    for (double v = 1.0; v <= 1.6 + 1e-9; v += 0.05) sweep.push_back(v);
    auto pts = read_power_vs_vddm(ctx, tt, sweep);
    bool increasing = true, convex = true;
    for (size_t i = 1; i < pts.size(); ++i)
      increasing = increasing && pts[i].total_w > pts[i - 1].total_w;
    for (size_t i = 2; i < pts.size(); ++i) {
      double d2 = pts[i].total_w - 2.0 * pts[i - 1].total_w +
                  pts[i - 2].total_w;
      convex = convex && d2 > 0.0;
    }
    rows.push_back(flag("read_power_increasing_in_vddm", increasing));
    rows.push_back(flag("read_power_convex_in_vddm", convex));

    double g1 = pts.front().ground_swing_w;
    double g2 = pts.back().ground_swing_w;
    double s1 = sweep.front() - ctx.vmin;
    double s2 = sweep.back() - ctx.vmin;
    double rel = std::fabs(g1 * s2 * s2 - g2 * s1 * s1) /
                 std::max(std::fabs(g2 * s1 * s1), 1e-300);
    rows.push_back(flag("ground_swing_quadratic", rel < 1e-9));
  }

  // Half-select protection during write-one: margin above 50 mV at every
  // corner, and strictly worse as the equalizer weakens.
  {
    double worst = std::numeric_limits<double>::infinity();
    for (const char* name : kCornerNames) {
      Corner k = cfg.corner(name, 27.0);
      worst = std::min(worst, w1_disturb_scan(c5, k, vddm, vssm,
                                              cfg.g_equalizer_s,
                                              cfg.g_w1_pulldown_s));
    }
    rows.push_back(band("w1_disturb_snm_min_mv", worst, 50.0001, 1e9));

    Corner tt = cfg.corner("TT", 27.0);
    double g[4] = {cfg.g_equalizer_s, cfg.g_equalizer_s / 3.0,
                   cfg.g_equalizer_s / 10.0, cfg.g_equalizer_s / 30.0};
    bool decreasing = true;
    double prev = std::numeric_limits<double>::infinity();
    for (double ge : g) {
      double m = w1_disturb_scan(c5, tt, vddm, vssm, ge,
                                 cfg.g_w1_pulldown_s);
      decreasing = decreasing && m < prev;
      prev = m;
    }
    rows.push_back(flag("disturb_decreasing_with_weaker_equalizer",
                        decreasing));
  }

  return rows;
}

}  // namespace sdg

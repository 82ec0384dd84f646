#include "sdgsim/power.hpp"

#include <algorithm>
#include <cmath>

namespace sdg {

double dynamic_power(double c_load_f, double delta_v, double freq_hz) {
  return c_load_f * delta_v * delta_v * freq_hz;
}

const char* op_kind_name(OpKind k) {
  switch (k) {
    case OpKind::Standby: return "STBY";
    case OpKind::ReadZeros: return "R0";
    case OpKind::ReadOnes: return "R1";
    case OpKind::WriteZeros: return "W0";
    case OpKind::WriteOnes: return "W1";
  }
  return "?";
}

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::FiveTSDG: return "5TSDG";
    case Scheme::LP6T: return "LP6T";
    case Scheme::Conv6T: return "Conv6T";
  }
  return "?";
}

double scheme_vssm(const PowerContext& ctx, Scheme s) {
  return s == Scheme::Conv6T ? 0.0 : ctx.vddm - ctx.vmin;
}

namespace {

const CellTopology& scheme_cell(const PowerContext& ctx, Scheme s) {
  return s == Scheme::FiveTSDG ? ctx.cell_5t : ctx.cell_6t;
}

}  // namespace

LeakSplit standby_cell_leak(const PowerContext& ctx, Scheme s,
                            const Corner& corner) {
  const CellTopology& cell = scheme_cell(ctx, s);
  double vssm = scheme_vssm(ctx, s);
  BiasCondition b = standby_bias(cell.kind, ctx.vddm, vssm);
  FoldedCell f = fold_cell(cell, corner);

  LeakSplit out;
  for (bool bit : {false, true}) {
    NodeVoltages nv = stored_state(f, b, bit);
    BranchCurrents bc = branch_currents(f, b, nv);
    out.supply_a += 0.5 * (bc.p1_vddm_to_qz + bc.p2_vddm_to_q);
    // Branch currents are signed cell-to-bitline; a precharged bitline
    // leaking into the cell shows up negative.
    double from_bl = std::max(0.0, -bc.n3_q_to_vbl);
    if (f.has_a2) from_bl += std::max(0.0, -bc.a2_qz_to_vblz);
    out.bitline_a += 0.5 * from_bl;
  }
  return out;
}

double standby_power_w(const PowerContext& ctx, Scheme s,
                       const Corner& corner) {
  LeakSplit leak = standby_cell_leak(ctx, s, corner);
  double vssm = scheme_vssm(ctx, s);
  return ctx.array.total_cells * leak.total_a() * (ctx.vddm - vssm);
}

OpEnergy op_energy(const PowerContext& ctx, Scheme s, OpKind op) {
  OpEnergy e;
  if (op == OpKind::Standby) return e;

  const ArrayConfig& a = ctx.array;
  const PowerParams& p = ctx.params;
  int bits = a.bits_per_word;
  double vddm = ctx.vddm;
  double vssm = scheme_vssm(ctx, s);
  bool is_read = op == OpKind::ReadZeros || op == OpKind::ReadOnes;
  int zeros = (op == OpKind::ReadZeros || op == OpKind::WriteZeros) ? bits : 0;

  // Local bitline sense swing: the line starts at its precharge rail and
  // the sense path cuts the discharge off after (1 - v_bl0_frac) of the
  // window down to the cell's '0' level. The five-T precharge rail is the
  // raised ground itself and its '0' level is the hard rail.
  double precharge = s == Scheme::FiveTSDG ? vssm : vddm;
  double zero_level = s == Scheme::FiveTSDG ? 0.0 : vssm;
  double read_swing = (1.0 - a.v_bl0_frac) * (precharge - zero_level);

  if (s == Scheme::FiveTSDG) {
    if (is_read) {
      if (!p.ground_hold) {
        e.ground_swing_j = bits * (a.c_vg1_f + a.c_vg2_f) * vssm * vssm;
      }
      e.bitline_j = zeros * a.c_bl_f * read_swing * read_swing;
      e.globalbit_j = zeros * p.c_gbit_f * vssm * vssm;
    } else if (op == OpKind::WriteZeros) {
      e.ground_swing_j =
          bits * a.c_vg1_f * (vssm - p.w0_vg1_v) * (vssm - p.w0_vg1_v);
      e.bitline_j = bits * a.c_bl_f * vssm * vssm;
    } else {  // WriteOnes
      double vg1 =
          equalizer_delivered_v(vssm, p.g_equalizer_s, p.g_w1_pulldown_s);
      double g_series = 0.0;
      if (p.g_equalizer_s + p.g_w1_pulldown_s > 0.0) {
        g_series = p.g_equalizer_s * p.g_w1_pulldown_s /
                   (p.g_equalizer_s + p.g_w1_pulldown_s);
      }
      e.ground_swing_j = bits * a.c_vg1_f * (vssm - vg1) * (vssm - vg1) +
                         vssm * vssm * g_series * p.write_pulse_s;
      e.bitline_j = bits * a.c_bl_f * (vddm - vssm) * (vddm - vssm);
      e.globalbit_j = p.c_gwr_f * vddm * vddm;
    }
    return e;
  }

  // Six-T paths. Reads are differential: one of the pair discharges by the
  // sense swing for every bit, and the global pair slews full rail per bit,
  // whatever the data. Writes drive one side rail-to-rail per bit.
  if (is_read) {
    e.bitline_j = bits * a.c_bl_f * read_swing * read_swing;
    e.globalbit_j = bits * p.c_gbit_f * vddm * vddm;
  } else {
    e.bitline_j = bits * a.c_bl_f * vddm * vddm;
    e.globalbit_j = p.c_gwr_f * vddm * vddm;
  }
  return e;
}

PowerBreakdown op_power(const PowerContext& ctx, Scheme s, const Corner& corner,
                        OpKind op) {
  PowerBreakdown row;
  row.scheme = s;
  row.corner_name = corner.name;
  row.temp_c = corner.temperature_c;
  row.op = op;
  row.standby_w = standby_power_w(ctx, s, corner);
  OpEnergy e = op_energy(ctx, s, op);
  double f = ctx.params.duty_hz;
  row.ground_swing_w = e.ground_swing_j * f;
  row.bitline_w = e.bitline_j * f;
  row.globalbit_w = e.globalbit_j * f;
  row.total_w =
      row.standby_w + row.ground_swing_w + row.bitline_w + row.globalbit_w;
  return row;
}

std::vector<PowerBreakdown> compare_report(const PowerContext& ctx,
                                           const Corner& corner) {
  std::vector<PowerBreakdown> rows;
  const OpKind ops[] = {OpKind::Standby, OpKind::ReadZeros, OpKind::ReadOnes,
                        OpKind::WriteZeros, OpKind::WriteOnes};
  for (Scheme s : {Scheme::FiveTSDG, Scheme::LP6T, Scheme::Conv6T}) {
    for (OpKind op : ops) rows.push_back(op_power(ctx, s, corner, op));
  }
  double base = rows.front().total_w;
  for (auto& r : rows) r.normalized = base > 0.0 ? r.total_w / base : 0.0;
  return rows;
}

std::vector<PowerBreakdown> read_power_vs_vddm(
    const PowerContext& ctx, const Corner& corner,
    const std::vector<double>& vddm) {
  std::vector<PowerBreakdown> rows;
  for (double v : vddm) {
    PowerContext at = ctx;
    at.vddm = v;
    rows.push_back(op_power(at, Scheme::FiveTSDG, corner, OpKind::ReadZeros));
  }
  if (!rows.empty()) {
    double base = rows.front().total_w;
    for (auto& r : rows) r.normalized = base > 0.0 ? r.total_w / base : 0.0;
  }
  return rows;
}

}  // namespace sdg

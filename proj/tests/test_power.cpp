#include <cmath>
#include <vector>

#include "doctest.h"
#include "sdgsim/power.hpp"

using namespace sdg;

namespace {

// 1e-12 relative everywhere: the power model is closed-form algebra, so any
// looser tolerance would only paper over a changed formula.
doctest::Approx tight(double v) { return doctest::Approx(v).epsilon(1e-12); }

}  // namespace

TEST_CASE("switched-capacitance power scales exactly with each factor") {
  double base = dynamic_power(120e-15, 0.6, 2e7);
  CHECK(dynamic_power(2 * 120e-15, 0.6, 2e7) == tight(2.0 * base));
  CHECK(dynamic_power(120e-15, 2 * 0.6, 2e7) == tight(4.0 * base));
  CHECK(dynamic_power(120e-15, 0.6, 3 * 2e7) == tight(3.0 * base));
  CHECK(dynamic_power(7e-15, 1.1, 5e6) == tight(7e-15 * 1.1 * 1.1 * 5e6));
  CHECK(dynamic_power(7e-15, 0.0, 5e6) == 0.0);
}

TEST_CASE("operation and scheme names match the report vocabulary") {
  CHECK(std::string(op_kind_name(OpKind::Standby)) == "STBY");
  CHECK(std::string(op_kind_name(OpKind::ReadZeros)) == "R0");
  CHECK(std::string(op_kind_name(OpKind::ReadOnes)) == "R1");
  CHECK(std::string(op_kind_name(OpKind::WriteZeros)) == "W0");
  CHECK(std::string(op_kind_name(OpKind::WriteOnes)) == "W1");
  CHECK(std::string(scheme_name(Scheme::FiveTSDG)) == "5TSDG");
  CHECK(std::string(scheme_name(Scheme::LP6T)) == "LP6T");
  CHECK(std::string(scheme_name(Scheme::Conv6T)) == "Conv6T");
}

TEST_CASE("standby power is cells times per-cell leak times the cell drop") {
  PowerContext ctx;
  Corner corner = Corner::make("FF", 120.0);
  for (Scheme s : {Scheme::FiveTSDG, Scheme::LP6T, Scheme::Conv6T}) {
    LeakSplit leak = standby_cell_leak(ctx, s, corner);
    CHECK(leak.supply_a > 0.0);
    CHECK(leak.bitline_a >= 0.0);
    double drop = ctx.vddm - scheme_vssm(ctx, s);
    CHECK(standby_power_w(ctx, s, corner) ==
          tight(ctx.array.total_cells * leak.total_a() * drop));
  }
}

TEST_CASE("grounding the sources at the hard rail costs an order of magnitude") {
  PowerContext ctx;
  Corner corner = Corner::make("FF", 120.0);
  double conv = standby_power_w(ctx, Scheme::Conv6T, corner);
  double lp = standby_power_w(ctx, Scheme::LP6T, corner);
  CHECK(conv / lp > 10.0);
  // The five-T column idles its bitline on the raised ground, so a stored
  // '0' sees no bitline drop at all; the six-T pair precharges to vddm and
  // leaks through both access devices.
  LeakSplit l5 = standby_cell_leak(ctx, Scheme::FiveTSDG, corner);
  LeakSplit l6 = standby_cell_leak(ctx, Scheme::LP6T, corner);
  CHECK(l5.bitline_a < l6.bitline_a);
}

TEST_CASE("read energy buckets follow the published recipes") {
  PowerContext ctx;
  const ArrayConfig& a = ctx.array;
  const PowerParams& p = ctx.params;
  double vssm = ctx.vddm - ctx.vmin;
  int bits = a.bits_per_word;

  OpEnergy r0 = op_energy(ctx, Scheme::FiveTSDG, OpKind::ReadZeros);
  double sense = (1.0 - a.v_bl0_frac) * vssm;
  CHECK(r0.ground_swing_j == tight(bits * (a.c_vg1_f + a.c_vg2_f) * vssm * vssm));
  CHECK(r0.bitline_j == tight(bits * a.c_bl_f * sense * sense));
  CHECK(r0.globalbit_j == tight(bits * p.c_gbit_f * vssm * vssm));

  // Reading ones never discharges a five-T bitline, but the word's ground
  // lines cycle regardless of the data.
  OpEnergy r1 = op_energy(ctx, Scheme::FiveTSDG, OpKind::ReadOnes);
  CHECK(r1.ground_swing_j == tight(r0.ground_swing_j));
  CHECK(r1.bitline_j == 0.0);
  CHECK(r1.globalbit_j == 0.0);
}

TEST_CASE("burst mode parks the grounds and drops only the swing bucket") {
  PowerContext held;
  held.params.ground_hold = true;
  PowerContext cycled;
  OpEnergy h = op_energy(held, Scheme::FiveTSDG, OpKind::ReadZeros);
  OpEnergy c = op_energy(cycled, Scheme::FiveTSDG, OpKind::ReadZeros);
  CHECK(h.ground_swing_j == 0.0);
  CHECK(c.ground_swing_j > 0.0);
  CHECK(h.bitline_j == tight(c.bitline_j));
  CHECK(h.globalbit_j == tight(c.globalbit_j));
}

TEST_CASE("six-T reads cost the same whatever the data") {
  PowerContext ctx;
  for (Scheme s : {Scheme::LP6T, Scheme::Conv6T}) {
    OpEnergy r0 = op_energy(ctx, s, OpKind::ReadZeros);
    OpEnergy r1 = op_energy(ctx, s, OpKind::ReadOnes);
    CHECK(r0.ground_swing_j == r1.ground_swing_j);
    CHECK(r0.bitline_j == r1.bitline_j);
    CHECK(r0.globalbit_j == r1.globalbit_j);
    CHECK(r0.ground_swing_j == 0.0);  // no separate ground lines to cycle
  }
  // The differential pair pays the global read line for every bit at full
  // supply, which is what makes the five-T global bucket cheaper.
  OpEnergy lp = op_energy(ctx, Scheme::LP6T, OpKind::ReadZeros);
  const ArrayConfig& a = ctx.array;
  const PowerParams& p = ctx.params;
  double swing = (1.0 - a.v_bl0_frac) * ctx.vmin;
  CHECK(lp.bitline_j == tight(a.bits_per_word * a.c_bl_f * swing * swing));
  CHECK(lp.globalbit_j ==
        tight(a.bits_per_word * p.c_gbit_f * ctx.vddm * ctx.vddm));
}

TEST_CASE("write-one pays the equalizer crowbar for exactly one pulse") {
  PowerContext ctx;
  const ArrayConfig& a = ctx.array;
  const PowerParams& p = ctx.params;
  double vssm = ctx.vddm - ctx.vmin;
  int bits = a.bits_per_word;

  OpEnergy w1 = op_energy(ctx, Scheme::FiveTSDG, OpKind::WriteOnes);
  double vg1 = equalizer_delivered_v(vssm, p.g_equalizer_s, p.g_w1_pulldown_s);
  double g_series = p.g_equalizer_s * p.g_w1_pulldown_s /
                    (p.g_equalizer_s + p.g_w1_pulldown_s);
  CHECK(w1.ground_swing_j ==
        tight(bits * a.c_vg1_f * (vssm - vg1) * (vssm - vg1) +
              vssm * vssm * g_series * p.write_pulse_s));
  CHECK(w1.bitline_j ==
        tight(bits * a.c_bl_f * ctx.vmin * ctx.vmin));
  CHECK(w1.globalbit_j == tight(p.c_gwr_f * ctx.vddm * ctx.vddm));

  // No equalizer and no pulldown: nothing holds VG1 up, no crowbar path.
  PowerContext open = ctx;
  open.params.g_equalizer_s = 0.0;
  open.params.g_w1_pulldown_s = 0.0;
  OpEnergy w1o = op_energy(open, Scheme::FiveTSDG, OpKind::WriteOnes);
  CHECK(w1o.ground_swing_j == tight(bits * a.c_vg1_f * vssm * vssm));
}

TEST_CASE("write-zero dips the first ground and cycles bitlines to the rail") {
  PowerContext ctx;
  ctx.params.w0_vg1_v = 0.15;
  const ArrayConfig& a = ctx.array;
  double vssm = ctx.vddm - ctx.vmin;
  int bits = a.bits_per_word;
  OpEnergy w0 = op_energy(ctx, Scheme::FiveTSDG, OpKind::WriteZeros);
  double dip = vssm - ctx.params.w0_vg1_v;
  CHECK(w0.ground_swing_j == tight(bits * a.c_vg1_f * dip * dip));
  CHECK(w0.bitline_j == tight(bits * a.c_bl_f * vssm * vssm));
  CHECK(w0.globalbit_j == 0.0);
}

TEST_CASE("the ground bucket is exactly quadratic in the raised rail") {
  PowerContext half;
  half.vmin = 0.7;  // vssm 0.6
  PowerContext full;
  full.vmin = 0.1;  // vssm 1.2
  OpEnergy eh = op_energy(half, Scheme::FiveTSDG, OpKind::ReadZeros);
  OpEnergy ef = op_energy(full, Scheme::FiveTSDG, OpKind::ReadZeros);
  CHECK(ef.ground_swing_j == tight(4.0 * eh.ground_swing_j));
}

TEST_CASE("a report row is standby plus duty-scaled access energy") {
  PowerContext ctx;
  Corner corner = Corner::make("SF", 85.0);
  for (OpKind op : {OpKind::ReadZeros, OpKind::WriteOnes}) {
    PowerBreakdown row = op_power(ctx, Scheme::FiveTSDG, corner, op);
    OpEnergy e = op_energy(ctx, Scheme::FiveTSDG, op);
    CHECK(row.total_w ==
          tight(row.standby_w + ctx.params.duty_hz * e.total_j()));
    CHECK(row.total_w == tight(row.standby_w + row.ground_swing_w +
                               row.bitline_w + row.globalbit_w));
  }

  PowerBreakdown idle = op_power(ctx, Scheme::FiveTSDG, corner, OpKind::Standby);
  CHECK(idle.ground_swing_w == 0.0);
  CHECK(idle.bitline_w == 0.0);
  CHECK(idle.globalbit_w == 0.0);
  CHECK(idle.total_w == tight(idle.standby_w));

  PowerContext parked = ctx;
  parked.params.duty_hz = 0.0;
  PowerBreakdown never =
      op_power(parked, Scheme::FiveTSDG, corner, OpKind::ReadZeros);
  CHECK(never.total_w == tight(never.standby_w));
}

TEST_CASE("comparison table has 15 rows in scheme-major order, base-normalized") {
  PowerContext ctx;
  Corner corner = Corner::make("TT", 27.0);
  std::vector<PowerBreakdown> rows = compare_report(ctx, corner);
  REQUIRE(rows.size() == 15);

  const Scheme schemes[] = {Scheme::FiveTSDG, Scheme::LP6T, Scheme::Conv6T};
  const OpKind ops[] = {OpKind::Standby, OpKind::ReadZeros, OpKind::ReadOnes,
                        OpKind::WriteZeros, OpKind::WriteOnes};
  for (int i = 0; i < 15; ++i) {
    CHECK(rows[i].scheme == schemes[i / 5]);
    CHECK(rows[i].op == ops[i % 5]);
    CHECK(rows[i].total_w == tight(rows[i].standby_w + rows[i].ground_swing_w +
                                   rows[i].bitline_w + rows[i].globalbit_w));
    CHECK(rows[i].normalized == tight(rows[i].total_w / rows[0].total_w));
  }
  CHECK(rows[0].normalized == tight(1.0));

  // Data direction only matters where bitlines are single-ended.
  CHECK(rows[2].total_w < rows[1].total_w);               // 5T R1 < 5T R0
  CHECK(rows[6].total_w == tight(rows[7].total_w));       // LP6T R0 == R1
  CHECK(rows[1].total_w < rows[6].total_w);               // 5T read under LP6T
}

TEST_CASE("read power rises and stays convex across the supply sweep") {
  PowerContext ctx;
  Corner corner = Corner::make("TT", 27.0);
  std::vector<double> supplies = {1.0, 1.1, 1.2, 1.3, 1.4};
  std::vector<PowerBreakdown> rows = read_power_vs_vddm(ctx, corner, supplies);
  REQUIRE(rows.size() == supplies.size());
  CHECK(rows[0].normalized == tight(1.0));
  for (size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].total_w > rows[i - 1].total_w);
  }
  for (size_t i = 2; i < rows.size(); ++i) {
    double dd = rows[i].total_w - 2.0 * rows[i - 1].total_w + rows[i - 2].total_w;
    CHECK(dd > 0.0);
  }
  // The raised rail tracks the supply at fixed vmin, so the last point's
  // ground bucket is pinned by the sweep geometry alone.
  const ArrayConfig& a = ctx.array;
  double vssm = supplies.back() - ctx.vmin;
  CHECK(rows.back().ground_swing_w ==
        tight(a.bits_per_word * (a.c_vg1_f + a.c_vg2_f) * vssm * vssm *
              ctx.params.duty_hz));
}

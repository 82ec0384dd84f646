#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "sdgsim/array.hpp"

using namespace sdg;

namespace {

// Charge conservation written out longhand, with its own operation order:
// every capacitor's charge just before the equalize, divided by the merged
// capacitance. The ground-line segments come back empty (they were cycled
// to the hard rail during the access), the untouched share of the read
// tank keeps its charge, and the returning bitlines carry theirs.
double share_oracle(const VssmState& s, const ArrayConfig& cfg) {
  double c_merged = cfg.c_vssm_read_f +
                    cfg.bits_per_word * (cfg.c_bl_f + cfg.c_vg1_f + cfg.c_vg2_f);
  double q = cfg.c_vssm_read_f * s.vssm;
  q += cfg.c_bl_f * (s.n_b0 * s.v_bl0 + s.n_b1 * s.v_bl1);
  return q / c_merged;
}

LeakFn zero_leak() {
  return [](double) { return 0.0; };
}

}  // namespace

TEST_CASE("one equalize of a 16-bit word of ones against the worked numbers") {
  ArrayConfig cfg = ArrayConfig::defaults();
  VssmState s;
  s.vssm = 0.6;
  s.n_b0 = 0;
  s.n_b1 = 16;
  s.v_bl0 = 0.0;
  s.v_bl1 = 0.6;  // a read '1' leaves its bitline at the rail value
  double expected = (9e-12 + 16 * 50e-15) / (9e-12 + 16 * 100e-15);
  CHECK(phi(s, cfg) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("survival fraction equals longhand charge conservation") {
  ArrayConfig cfg = ArrayConfig::defaults();
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    cfg.bits_per_word = 1 + static_cast<int>(u(rng) * 63.0);
    cfg.c_bl_f = 5e-15 + u(rng) * 200e-15;
    cfg.c_vg1_f = u(rng) * 60e-15;
    cfg.c_vg2_f = u(rng) * 60e-15;
    cfg.c_vssm_read_f = 0.5e-12 + u(rng) * 20e-12;

    VssmState s;
    s.vssm = 0.05 + u(rng) * 1.2;
    s.n_b0 = static_cast<int>(u(rng) * (cfg.bits_per_word + 1));
    s.n_b1 = cfg.bits_per_word - s.n_b0;
    s.v_bl0 = u(rng) * s.vssm;
    s.v_bl1 = u(rng) * 1.3;

    double survived = phi(s, cfg) * s.vssm;
    double expected = share_oracle(s, cfg);
    CHECK(survived == doctest::Approx(expected).epsilon(1e-12));
    CHECK(oracle_charge_sharing(s, cfg) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("survival fraction refuses a rail too low to form ratios") {
  ArrayConfig cfg = ArrayConfig::defaults();
  VssmState s;
  s.vssm = 0.0;
  CHECK_THROWS_AS(phi(s, cfg), std::domain_error);
  s.vssm = 1e-9;
  CHECK_THROWS_AS(phi(s, cfg), std::domain_error);
}

TEST_CASE("a read cycle decomposes into charge share plus leak replenish") {
  ArrayConfig cfg = ArrayConfig::defaults();
  cfg.rd_stby_overlap_c = 3e-15;
  LeakFn leak = [](double v) { return 2e-6 * (0.6 - v); };
  double c = standby_tank_cap_f(cfg);

  for (IAvgMode mode :
       {IAvgMode::EndOfCycle, IAvgMode::StartOfCycle, IAvgMode::Trapezoid}) {
    VssmState s;
    s.vssm = 0.57;
    s.n_b0 = 5;
    s.n_b1 = 11;
    VssmState next = step_read_cycle(s, cfg, leak, mode);

    VssmState pre = s;  // the share consumed the refreshed bitline levels
    pre.v_bl0 = next.v_bl0;
    pre.v_bl1 = next.v_bl1;
    CHECK(next.v_bl0 == doctest::Approx(cfg.v_bl0_frac * s.vssm).epsilon(1e-15));
    CHECK(next.v_bl1 == doctest::Approx(cfg.v_bl1_frac * s.vssm).epsilon(1e-15));

    double shared = phi(pre, cfg) * s.vssm - cfg.rd_stby_overlap_c / c;
    double reassembled = shared + next.i_avg * cfg.dt_s / c;
    CHECK(next.vssm == doctest::Approx(reassembled).epsilon(1e-12));
    CHECK(next.cycle_index == s.cycle_index + 1);
  }
}

TEST_CASE("the implicit leak sample satisfies its own balance") {
  ArrayConfig cfg = ArrayConfig::defaults();
  LeakFn leak = [](double v) { return 5e-6 * (0.63 - v); };
  VssmState s;
  s.vssm = 0.5;
  s.n_b0 = 8;
  s.n_b1 = 8;
  VssmState next = step_read_cycle(s, cfg, leak, IAvgMode::EndOfCycle);
  // End-of-cycle sampling means the current is evaluated at the voltage the
  // cycle lands on.
  CHECK(next.i_avg == doctest::Approx(leak(next.vssm)).epsilon(1e-9));
}

TEST_CASE("with no leak at all the rail decays geometrically") {
  ArrayConfig cfg = ArrayConfig::defaults();
  // Bitline refresh levels are fixed fractions of the entry voltage, so
  // the survival fraction is the same every cycle and the trace is an
  // exact geometric sequence.
  VssmState probe;
  probe.vssm = 1.0;
  probe.n_b0 = 8;
  probe.n_b1 = 8;
  probe.v_bl0 = cfg.v_bl0_frac;
  probe.v_bl1 = cfg.v_bl1_frac;
  double ratio = phi(probe, cfg);

  VssmTrace tr = run_to_steady_state(cfg, zero_leak(), 8, 8, 0.6, 4000);
  REQUIRE(tr.samples.size() > 10);
  for (size_t i = 0; i < 10; ++i) {
    double expected = 0.6 * std::pow(ratio, static_cast<double>(i));
    CHECK(tr.samples[i].vssm == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("read cycling settles monotonically onto the fixed point") {
  ArrayConfig cfg = ArrayConfig::defaults();
  // A stiff linear restorer standing in for the clamp pair; the fixed
  // point can be cross-checked by hand. 10 uV stop, per the default.
  LeakFn leak = [](double v) { return 8e-4 * (0.6 - v); };
  VssmTrace tr = run_to_steady_state(cfg, leak, 8, 8, 0.6, 4000);
  REQUIRE(tr.steady_state.has_value());

  // Per-cycle drops shrink monotonically on the way down.
  for (size_t i = 1; i + 1 < tr.samples.size(); ++i) {
    CHECK(tr.samples[i].delta_v <= tr.samples[i - 1].delta_v + 1e-15);
    CHECK(tr.samples[i].delta_v >= 0.0);
  }
  CHECK(std::fabs(tr.samples[tr.samples.size() - 2].delta_v) < 1e-5);

  double fp = steady_state_fixed_point(cfg, leak, 8, 8);
  CHECK(std::fabs(*tr.steady_state - fp) < 1e-5);
  CHECK(tr.delta_v_tot == doctest::Approx(0.6 - *tr.steady_state).epsilon(1e-12));
}

TEST_CASE("a bigger tank loses less per burst") {
  Corner k = Corner::make("TT", 27.0);
  CellTopology cell = CellTopology::five_t_sdg();
  double prev_drop = 1e9;
  for (int scale : {1, 16}) {
    ArrayConfig cfg = ArrayConfig::defaults();
    cfg.total_cells = 65536 * scale;
    cfg.c_vssm_read_f = 9e-12 * scale;
    VssmLeakModel leak(cell, k, cfg, 1.3);
    VssmTrace tr = run_to_steady_state(cfg, leak.as_fn(), 8, 8, 0.6, 20000);
    REQUIRE(tr.steady_state.has_value());
    CHECK(tr.delta_v_tot < prev_drop);
    CHECK(tr.delta_v_tot > 0.0);
    prev_drop = tr.delta_v_tot;
  }
}

TEST_CASE("standby equilibrium balances the leak model to zero") {
  ArrayConfig cfg = ArrayConfig::defaults();
  Corner k = Corner::make("FF", 120.0);
  VssmLeakModel leak(CellTopology::five_t_sdg(), k, cfg, 1.3);
  double veq = standby_equilibrium(leak.as_fn(), 1.3);
  CHECK(veq > 0.3);
  CHECK(veq < 0.9);
  // Net current at the equilibrium is zero at the bisection's resolution.
  double span = std::fabs(leak.net_current_a(veq + 0.01)) +
                std::fabs(leak.net_current_a(veq - 0.01));
  CHECK(std::fabs(leak.net_current_a(veq)) < 0.01 * span);

  // The model's own split has to reassemble into the net.
  double v = 0.55;
  double net = cfg.total_cells * leak.cell_current_a(v) +
               leak.clamp_source_a(v) - leak.clamp_sink_a(v);
  CHECK(leak.net_current_a(v) == doctest::Approx(net).epsilon(1e-12));
  // Clamp orientation: the source weakens and the sink strengthens as the
  // rail rises.
  CHECK(leak.clamp_source_a(0.5) > leak.clamp_source_a(0.7));
  CHECK(leak.clamp_sink_a(0.7) > leak.clamp_sink_a(0.5));
}

TEST_CASE("standby relaxation climbs from a cold rail and settles flat") {
  ArrayConfig cfg = ArrayConfig::defaults();
  Corner k = Corner::make("TT", 27.0);
  VssmLeakModel leak(CellTopology::five_t_sdg(), k, cfg, 1.3);
  double veq = standby_equilibrium(leak.as_fn(), 1.3);

  auto pts = standby_rise(cfg, leak.as_fn(), 0.0);
  REQUIRE(pts.size() > 10);
  CHECK(pts.front().vssm == 0.0);
  for (size_t i = 1; i < pts.size(); ++i) {
    CHECK(pts[i].t_s > pts[i - 1].t_s);
    CHECK(pts[i].vssm >= pts[i - 1].vssm - 1e-9);
  }
  CHECK(std::fabs(pts.back().vssm - veq) < 1e-3);
  CHECK(pts.back().t_s < 1e-7);

  // Starting at the equilibrium there is nothing to integrate.
  auto flat = standby_rise(cfg, leak.as_fn(), veq);
  CHECK(flat.size() == 1);
}

TEST_CASE("standby relaxation reports a rail that will not settle") {
  ArrayConfig cfg = ArrayConfig::defaults();
  // A constant charge pump never balances; the integrator must say so
  // rather than spin forever.
  LeakFn pump = [](double) { return 1e-3; };
  CHECK_THROWS_AS(standby_rise(cfg, pump, 0.0), std::runtime_error);
}

TEST_CASE("read bursts barely dent the rail at the shipped sizing") {
  ArrayConfig cfg = ArrayConfig::defaults();
  Corner k = Corner::make("TT", 27.0);
  VssmLeakModel leak(CellTopology::five_t_sdg(), k, cfg, 1.3);
  double exc = read_mode_excursion(cfg, leak.as_fn(), 8, 8, 100);
  CHECK(exc > 0.0);
  CHECK(exc < 0.025);
}

TEST_CASE("with unmoved bitlines and empty ground segments nothing is lost") {
  ArrayConfig cfg = ArrayConfig::defaults();
  cfg.c_vg1_f = 0.0;
  cfg.c_vg2_f = 0.0;
  VssmState s;
  s.vssm = 0.48;
  s.n_b0 = 4;
  s.n_b1 = 12;
  s.v_bl0 = s.vssm;
  s.v_bl1 = s.vssm;
  CHECK(phi(s, cfg) == doctest::Approx(1.0).epsilon(1e-12));
}

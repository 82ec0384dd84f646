// Command-line front end: loads the configuration, runs one analysis and
// drops deterministic CSVs plus a `summary` file into the output directory.
// Exit codes: 0 all invariant checks pass, 1 an invariant failed, 2 the
// configuration or command line is bad.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sdgsim/calibrate.hpp"
#include "sdgsim/config.hpp"

namespace fs = std::filesystem;
using namespace sdg;

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Minimal row writer; callers pass every cell already formatted.
class Csv {
 public:
  Csv(const fs::path& p, const std::string& header) : out_(p) {
    if (!out_) throw std::runtime_error("cannot open " + p.string());
    out_ << header << "\n";
  }
  void row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i)
      out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

struct CheckRecord {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct RunContext {
  Config cfg;
  fs::path out;
  std::vector<std::string> corners;
  double temp_c = 27.0;
  std::vector<CheckRecord> checks;
  std::vector<std::pair<std::string, std::string>> derived;

  void check(const std::string& name, bool ok, const std::string& detail = "") {
    checks.push_back({name, ok, detail});
  }
  void note(const std::string& key, double value) {
    derived.emplace_back(key, g17(value));
  }
  Corner corner_at(const std::string& name) const {
    return cfg.corner(name, temp_c);
  }
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

void write_summary(const RunContext& rc, const std::string& command) {
  std::ofstream s(rc.out / "summary");
  s << "command: " << command << "\n";
  s << "corners:";
  for (const auto& c : rc.corners) s << " " << c;
  s << "\ntemp_c: " << g17(rc.temp_c) << "\n";

  s << "\n[configuration]\n";
  for (const auto& [k, v] : echo_config(rc.cfg)) s << k << " = " << v << "\n";

  s << "\n[derived]\n";
  ArrayConfig ac = rc.cfg.array_config();
  s << "vssm_v = " << g17(rc.cfg.vssm_v()) << "\n";
  s << "c_vssm_stby_f = " << g17(standby_tank_cap_f(ac)) << "\n";
  s << "w1_vg1_delivered_v = "
    << g17(equalizer_delivered_v(rc.cfg.vssm_v(), rc.cfg.g_equalizer_s,
                                 rc.cfg.g_w1_pulldown_s))
    << "\n";
  for (const auto& [k, v] : rc.derived) s << k << " = " << v << "\n";

  s << "\n[checks]\n";
  bool all = true;
  for (const auto& c : rc.checks) {
    all = all && c.pass;
    s << c.name << ": " << (c.pass ? "pass" : "FAIL");
    if (!c.detail.empty()) s << " (" << c.detail << ")";
    s << "\n";
  }
  s << "\nresult: " << (all ? "pass" : "fail") << "\n";
}

// ---- commands ----------------------------------------------------------

void cmd_snm(RunContext& rc) {
  CellTopology cell = rc.cfg.cell_5t();
  double vddm = rc.cfg.vddm_v, vssm = rc.cfg.vssm_v();
  Csv margins(rc.out / "margins.csv", "kind,corner,temp_c,value_mv");
  for (const auto& name : rc.corners) {
    Corner k = rc.corner_at(name);
    MarginResult m = snm(cell, k, standby_bias(cell.kind, vddm, vssm));
    margins.row({"hold_snm", name, g17(rc.temp_c), g17(m.value_mv)});
    rc.check("hold_bistable_" + name, !m.monostable);

    Csv a(rc.out / ("butterfly_a_" + name + ".csv"), "vin_volts,vout_volts");
    for (size_t i = 0; i < m.curve_a.x.size(); ++i)
      a.row({g17(m.curve_a.x[i]), g17(m.curve_a.y[i])});
    // curve_b is stored output-first so both curves share plot axes;
    // the CSV goes back to input-first.
    Csv b(rc.out / ("butterfly_b_" + name + ".csv"), "vin_volts,vout_volts");
    for (size_t i = 0; i < m.curve_b.x.size(); ++i)
      b.row({g17(m.curve_b.y[i]), g17(m.curve_b.x[i])});
  }
}

void cmd_rnm_sweep(RunContext& rc) {
  CellTopology cell = rc.cfg.cell_5t();
  double vddm = rc.cfg.vddm_v, vssm = rc.cfg.vssm_v();
  Csv csv(rc.out / "rnm_sweep.csv", "bl_mv,corner,temp_c,value_mv");
  for (const auto& name : rc.corners) {
    Corner k = rc.corner_at(name);
    int best = -1, idx = 0, last = 0;
    double best_v = -1.0;
    for (double bl = 0.0; bl <= vddm + 1e-9; bl += 0.020, ++idx) {
      MarginResult m = rnm(cell, k, vddm, vssm, bl);
      double v = m.monostable ? 0.0 : m.value_mv;
      csv.row({g17(bl * 1e3), name, g17(rc.temp_c), g17(v)});
      if (v > best_v) {
        best_v = v;
        best = idx;
      }
      last = idx;
    }
    rc.check("rnm_max_interior_" + name, best > 0 && best < last,
             "max at step " + std::to_string(best));
  }
}

void cmd_trip_table(RunContext& rc) {
  CellTopology cell = rc.cfg.cell_5t();
  double vddm = rc.cfg.vddm_v, vssm = rc.cfg.vssm_v();
  Csv csv(rc.out / "trip_table.csv", "corner,trip_mv,qmax_mv,qmin_mv");
  for (const auto& name : rc.corners) {
    Corner k = rc.corner_at(name);
    FoldedCell f = fold_cell(cell, k);
    double trip = trip_voltage(f, standby_bias(cell.kind, vddm, vssm));
    ReadLevels lv = read_disturb_levels(f, read_bias(cell.kind, vddm, vssm));
    // q_low_v is the stored 0 dragged up (the Qmax of the table), q_high_v
    // the stored 1 dragged down (Qmin).
    csv.row({name, g17(trip * 1e3), g17(lv.q_low_v * 1e3),
             g17(lv.q_high_v * 1e3)});
    rc.check("trip_order_" + name,
             lv.q_low_v < trip && trip < lv.q_high_v,
             "qmax " + g17(lv.q_low_v * 1e3) + " trip " + g17(trip * 1e3) +
                 " qmin " + g17(lv.q_high_v * 1e3));
  }
}

void cmd_write_margin(RunContext& rc) {
  CellTopology cell = rc.cfg.cell_5t();
  double vddm = rc.cfg.vddm_v, vssm = rc.cfg.vssm_v();
  Csv csv(rc.out / "margins.csv", "kind,corner,temp_c,value_mv");
  for (const auto& name : rc.corners) {
    Corner k = rc.corner_at(name);
    BiasCondition wb = standby_bias(cell.kind, vddm, vssm);
    wb.vwl = vddm;
    wb.vg2 = vssm;

    wb.vg1 = rc.cfg.w1_vg1_v;
    WriteResult w1 = write_margin(cell, k, wb, WriteKind::WriteOne);
    csv.row({"w1m", name, g17(rc.temp_c),
             g17(w1.writable ? w1.margin_v * 1e3 : -1.0)});
    rc.check("writable_w1_" + name, w1.writable);

    wb.vg1 = rc.cfg.w0_vg1_v;
    WriteResult w0 = write_margin(cell, k, wb, WriteKind::WriteZero);
    csv.row({"w0m", name, g17(rc.temp_c),
             g17(w0.writable ? w0.margin_v * 1e3 : -1.0)});
    rc.check("writable_w0_" + name, w0.writable);
  }
}

void cmd_vssm_trace(RunContext& rc) {
  CellTopology cell = rc.cfg.cell_5t();
  ArrayConfig ac = rc.cfg.array_config();
  int zeros = rc.cfg.pattern_zeros;
  int ones = ac.bits_per_word - zeros;
  for (const auto& name : rc.corners) {
    Corner k = rc.corner_at(name);
    VssmLeakModel leak(cell, k, ac, rc.cfg.vddm_v);
    double v0 = standby_equilibrium(leak.as_fn(), rc.cfg.vddm_v);
    VssmTrace tr = run_to_steady_state(ac, leak.as_fn(), zeros, ones, v0,
                                       5000, rc.cfg.i_avg());
    Csv csv(rc.out / ("trace_" + name + ".csv"),
            "cycle,vssm_volts,delta_v_volts");
    bool monotone = true;
    for (size_t i = 0; i < tr.samples.size(); ++i) {
      const auto& p = tr.samples[i];
      csv.row({std::to_string(p.cycle), g17(p.vssm), g17(p.delta_v)});
      if (i + 1 < tr.samples.size())
        monotone = monotone && std::fabs(tr.samples[i + 1].delta_v) <=
                                   std::fabs(p.delta_v) + 1e-12;
    }
    rc.check("trace_settles_" + name, tr.steady_state.has_value());
    rc.check("trace_monotone_" + name, monotone);
    rc.note("delta_v_tot_" + name, tr.delta_v_tot);
    if (tr.steady_state) rc.note("steady_state_" + name, *tr.steady_state);
  }
}

void cmd_standby_rise(RunContext& rc) {
  CellTopology cell = rc.cfg.cell_5t();
  ArrayConfig ac = rc.cfg.array_config();
  for (const auto& name : rc.corners) {
    Corner k = rc.corner_at(name);
    VssmLeakModel leak(cell, k, ac, rc.cfg.vddm_v);
    bool settled = true;
    std::vector<TimePoint> pts;
    try {
      pts = standby_rise(ac, leak.as_fn(), 0.0);
    } catch (const std::runtime_error&) {
      settled = false;
    }
    Csv csv(rc.out / ("standby_rise_" + name + ".csv"), "time_s,vssm_volts");
    for (const auto& p : pts) csv.row({g17(p.t_s), g17(p.vssm)});
    rc.check("standby_settles_" + name, settled);
    if (!pts.empty()) rc.note("standby_final_" + name, pts.back().vssm);
  }
}

void cmd_delay_report(RunContext& rc) {
  CellTopology cell = rc.cfg.cell_5t();
  ArrayConfig ac = rc.cfg.array_config();
  TimingModel tm = rc.cfg.timing_model();
  double vddm = rc.cfg.vddm_v, vssm = rc.cfg.vssm_v();

  Csv delays(rc.out / "delays.csv", "kind,corner,temp_c,delay_s");
  for (const auto& name : rc.corners) {
    Corner k = rc.corner_at(name);
    double rd = read_delay(cell, k, tm, ac, vddm, vssm);
    double d0 = w0_delay(cell, k, tm, vddm, vssm, rc.cfg.w0_vg1_v, vssm);
    double d1 = w1_delay(cell, k, tm, vddm, vssm, rc.cfg.w1_vg1_v, vssm);
    delays.row({"read", name, g17(rc.temp_c), g17(rd)});
    delays.row({"w0", name, g17(rc.temp_c), g17(d0)});
    delays.row({"w1", name, g17(rc.temp_c), g17(d1)});
    rc.check("delays_finite_" + name,
             std::isfinite(rd) && std::isfinite(d0) && std::isfinite(d1));
  }

  // Functional pass over one sub-block at the first corner: write every
  // word a fixed pattern, read it all back.
  Corner k0 = rc.corner_at(rc.corners.front());
  WordArray wa(cell, k0, ac, tm, vddm, vssm, rc.cfg.write_drive());
  std::vector<OpCommand> ops;
  auto pattern = [](int i) {
    return static_cast<uint16_t>((0x9E3779B9u * (i + 1)) >> 16);
  };
  for (int i = 0; i < ac.cells_per_subcolumn; ++i)
    ops.push_back({AccessKind::Write, i, pattern(i)});
  for (int i = 0; i < ac.cells_per_subcolumn; ++i)
    ops.push_back({AccessKind::Read, i, 0});
  std::vector<OpResult> res = wa.execute(ops);

  uint16_t mask = ac.bits_per_word >= 16
                      ? 0xffffu
                      : static_cast<uint16_t>((1u << ac.bits_per_word) - 1u);
  bool roundtrip = true, clean = true;
  Csv events(rc.out / "events.csv", "op_index,kind,address,delay_s,flags");
  for (size_t i = 0; i < res.size(); ++i) {
    const OpResult& r = res[i];
    std::string flags;
    for (const auto& f : r.flags) {
      if (!flags.empty()) flags += ';';
      flags += std::to_string(f.bit);
      flags += ':';
      flags += upset_kind_name(f.kind);
    }
    if (flags.empty()) flags = "-";
    clean = clean && r.flags.empty();
    events.row({std::to_string(i), access_kind_name(r.kind),
                std::to_string(r.address), g17(r.delay_s), flags});
    if (r.kind == AccessKind::Read)
      roundtrip = roundtrip &&
                  r.read_data == (pattern(r.address) & mask);
  }
  rc.check("roundtrip_ok", roundtrip);
  rc.check("no_upsets", clean);
  rc.note("vssm_after_block", wa.vssm_now());
}

const std::string kPowerHeader =
    "cell_type,corner,temp_c,op_kind,standby_w,ground_swing_w,bitline_w,"
    "globalbit_w,total_w,normalized";

void power_row(Csv& csv, const PowerBreakdown& p) {
  csv.row({scheme_name(p.scheme), p.corner_name, g17(p.temp_c),
           op_kind_name(p.op), g17(p.standby_w), g17(p.ground_swing_w),
           g17(p.bitline_w), g17(p.globalbit_w), g17(p.total_w),
           g17(p.normalized)});
}

bool parts_sum(const PowerBreakdown& p) {
  double sum = p.standby_w + p.ground_swing_w + p.bitline_w + p.globalbit_w;
  return std::fabs(sum - p.total_w) <= 1e-12 * std::max(sum, p.total_w);
}

void cmd_power_report(RunContext& rc) {
  PowerContext ctx = rc.cfg.power_context();
  const OpKind ops[5] = {OpKind::Standby, OpKind::ReadZeros, OpKind::ReadOnes,
                         OpKind::WriteZeros, OpKind::WriteOnes};
  Csv csv(rc.out / "power_report.csv", kPowerHeader);
  double norm = 0.0;
  bool sums = true;
  for (const auto& name : rc.corners) {
    Corner k = rc.corner_at(name);
    for (OpKind op : ops) {
      PowerBreakdown p = op_power(ctx, Scheme::FiveTSDG, k, op);
      if (norm == 0.0) norm = p.total_w;
      p.normalized = p.total_w / norm;
      sums = sums && parts_sum(p);
      power_row(csv, p);
    }
  }
  rc.check("totals_sum_parts", sums);

  // Supply sweep at the first corner with the retention headroom pinned.
  Corner k0 = rc.corner_at(rc.corners.front());
  std::vector<double> sweep;
  for (double v = 1.0; v <= 1.6 + 1e-9; v += 0.05) sweep.push_back(v);
  auto pts = read_power_vs_vddm(ctx, k0, sweep);
  Csv vs(rc.out / "read_vs_vddm.csv",
         "vddm_volts,vssm_volts,standby_w,ground_swing_w,bitline_w,"
         "globalbit_w,total_w,normalized");
  bool increasing = true;
  for (size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    vs.row({g17(sweep[i]), g17(sweep[i] - ctx.vmin), g17(p.standby_w),
            g17(p.ground_swing_w), g17(p.bitline_w), g17(p.globalbit_w),
            g17(p.total_w), g17(p.normalized)});
    if (i) increasing = increasing && p.total_w > pts[i - 1].total_w;
  }
  rc.check("read_power_increasing_in_vddm", increasing);
}

void cmd_compare(RunContext& rc) {
  PowerContext ctx = rc.cfg.power_context();
  Csv csv(rc.out / "compare.csv", kPowerHeader);
  bool sums = true, leak_order = true;
  for (const auto& name : rc.corners) {
    Corner k = rc.corner_at(name);
    for (const PowerBreakdown& p : compare_report(ctx, k)) {
      sums = sums && parts_sum(p);
      power_row(csv, p);
    }
    leak_order = leak_order &&
                 standby_power_w(ctx, Scheme::Conv6T, k) >
                     standby_power_w(ctx, Scheme::LP6T, k);
  }
  rc.check("totals_sum_parts", sums);
  rc.check("conv6t_leaks_more_than_lp6t", leak_order);
}

void cmd_calibrate_check(RunContext& rc) {
  std::vector<CalibrationRow> rows = run_calibration(rc.cfg);
  Csv csv(rc.out / "calibration.csv", "check,measured,lo,hi,pass");
  for (const auto& r : rows) {
    csv.row({r.check, g17(r.measured), g17(r.lo), g17(r.hi),
             r.pass ? "1" : "0"});
    std::printf("%s %-42s measured %-22s target [%s, %s]\n",
                r.pass ? "PASS" : "FAIL", r.check.c_str(),
                g17(r.measured).c_str(), g17(r.lo).c_str(),
                g17(r.hi).c_str());
    rc.check(r.check, r.pass, "measured " + g17(r.measured));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"raised-ground SRAM margin, dynamics and power toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "sdgsim_out";
  std::string corners = "TT,FF,SS,FS,SF";
  std::vector<std::string> sets;
  double temp_c = 27.0;
  app.add_option("--config", config_path, "INI configuration file");
  app.add_option("--set", sets, "override, section.key=value (repeatable)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--corners", corners, "comma list out of TT,FF,SS,FS,SF");
  app.add_option("--temp", temp_c, "temperature in Celsius");

  using Handler = void (*)(RunContext&);
  const std::map<std::string, std::pair<const char*, Handler>> commands = {
      {"snm", {"hold-state butterfly curves and noise margins", cmd_snm}},
      {"rnm-sweep",
       {"read noise margin against bitline clamp level", cmd_rnm_sweep}},
      {"trip-table",
       {"trip voltage against read-disturbed node levels", cmd_trip_table}},
      {"write-margin", {"write-0 and write-1 margins", cmd_write_margin}},
      {"vssm-trace",
       {"cycle-by-cycle array ground voltage under reads", cmd_vssm_trace}},
      {"standby-rise",
       {"array ground relaxing to its standby level", cmd_standby_rise}},
      {"delay-report",
       {"access delays plus a functional block pass", cmd_delay_report}},
      {"power-report",
       {"per-operation power decomposition and supply sweep",
        cmd_power_report}},
      {"compare", {"three array schemes, five operations", cmd_compare}},
      {"calibrate-check",
       {"full target table against shipped constants", cmd_calibrate_check}},
  };
  for (const auto& [name, v] : commands) {
    CLI::App* sub = app.add_subcommand(name, v.first);
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    RunContext rc;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in)
        throw config_error("cannot open config file '" + config_path + "'", 0,
                           config_path);
      std::stringstream buf;
      buf << in.rdbuf();
      parse_ini(rc.cfg, buf.str());
    }
    for (const auto& s : sets) apply_set(rc.cfg, s);
    rc.cfg.validate();

    rc.temp_c = temp_c;
    rc.corners = split_list(corners);
    if (rc.corners.empty())
      throw config_error("--corners list is empty", 0, "corners");
    for (const auto& c : rc.corners)
      if (c != "TT" && c != "FF" && c != "SS" && c != "FS" && c != "SF")
        throw config_error("unknown corner '" + c + "'", 0, "corners");

    rc.out = out_dir;
    fs::create_directories(rc.out);

    std::string name;
    for (const auto& [n, v] : commands)
      if (app.got_subcommand(n)) {
        name = n;
        v.second(rc);
        break;
      }
    write_summary(rc, name);

    for (const auto& c : rc.checks)
      if (!c.pass) {
        std::fprintf(stderr, "invariant failed: %s%s%s\n", c.name.c_str(),
                     c.detail.empty() ? "" : " ", c.detail.c_str());
        return 1;
      }
    return 0;
  } catch (const config_error& e) {
    std::fprintf(stderr, "config error (line %d, key '%s'): %s\n", e.line(),
                 e.key().c_str(), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "analysis failed: %s\n", e.what());
    return 1;
  }
}

#include "sdgsim/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

namespace sdg {

VtFlavor flavor_from_string(const std::string& s) {
  if (s == "lvt") return VtFlavor::LVT;
  if (s == "svt") return VtFlavor::SVT;
  if (s == "hvt") return VtFlavor::HVT;
  throw config_error("flavor must be lvt, svt or hvt, got '" + s + "'", 0, s);
}

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& v, const std::string& key, int line) {
  try {
    size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size())
      throw config_error("trailing characters after number in '" + key + "'",
                         line, key);
    if (!std::isfinite(d))
      throw config_error("value for '" + key + "' is not finite", line, key);
    return d;
  } catch (const config_error&) {
    throw;
  } catch (const std::exception&) {
    throw config_error("cannot parse '" + v + "' as a number for '" + key +
                           "'",
                       line, key);
  }
}

int parse_int(const std::string& v, const std::string& key, int line) {
  double d = parse_double(v, key, line);
  int i = static_cast<int>(std::lround(d));
  if (std::fabs(d - i) > 1e-9)
    throw config_error("'" + key + "' wants an integer, got '" + v + "'",
                       line, key);
  return i;
}

bool parse_bool(const std::string& v, const std::string& key, int line) {
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw config_error("'" + key + "' wants a boolean, got '" + v + "'", line,
                     key);
}

std::string fmt_double(double d) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  return buf;
}

struct Entry {
  const char* key;  // "section.key"
  std::function<void(Config&, const std::string&, int)> set;
  std::function<std::string(const Config&)> get;
};

Entry num(const char* key, double Config::*field) {
  return {key,
          [field, key](Config& c, const std::string& v, int line) {
            c.*field = parse_double(v, key, line);
          },
          [field](const Config& c) { return fmt_double(c.*field); }};
}

Entry integer(const char* key, int Config::*field) {
  return {key,
          [field, key](Config& c, const std::string& v, int line) {
            c.*field = parse_int(v, key, line);
          },
          [field](const Config& c) { return std::to_string(c.*field); }};
}

Entry boolean(const char* key, bool Config::*field) {
  return {key,
          [field, key](Config& c, const std::string& v, int line) {
            c.*field = parse_bool(v, key, line);
          },
          [field](const Config& c) { return c.*field ? "1" : "0"; }};
}

Entry word(const char* key, std::string Config::*field,
           std::vector<std::string> allowed) {
  return {key,
          [field, key, allowed](Config& c, const std::string& v, int line) {
            for (const auto& a : allowed)
              if (v == a) {
                c.*field = v;
                return;
              }
            std::string opts;
            for (const auto& a : allowed) opts += (opts.empty() ? "" : ", ") + a;
            throw config_error(
                "'" + std::string(key) + "' must be one of " + opts, line, key);
          },
          [field](const Config& c) { return c.*field; }};
}

const std::vector<Entry>& registry() {
  static const std::vector<Entry> table = {
      num("devices.nmos_k_a_per_v2", &Config::nmos_k_a_per_v2),
      num("devices.pmos_k_a_per_v2", &Config::pmos_k_a_per_v2),
      num("devices.swing_mv", &Config::swing_mv),
      num("devices.dibl_v_per_v", &Config::dibl_v_per_v),
      num("devices.lambda_per_v", &Config::lambda_per_v),
      num("devices.vt_tempco_v_per_k", &Config::vt_tempco_v_per_k),
      num("devices.gate_leak_frac", &Config::gate_leak_frac),
      num("devices.lvt_v", &Config::lvt_v),
      num("devices.svt_v", &Config::svt_v),
      num("devices.hvt_v", &Config::hvt_v),
      num("corners.sigma_vth_v", &Config::sigma_vth_v),
      num("corners.sigma_k_frac", &Config::sigma_k_frac),
      num("cell.vddm_v", &Config::vddm_v),
      num("cell.vmin_v", &Config::vmin_v),
      num("cell.beta_6t", &Config::beta_6t),
      word("cell.inverter_flavor", &Config::inverter_flavor,
           {"lvt", "svt", "hvt"}),
      word("cell.access_flavor", &Config::access_flavor,
           {"lvt", "svt", "hvt"}),
      num("cell.w1_vg1_v", &Config::w1_vg1_v),
      num("cell.w0_vg1_v", &Config::w0_vg1_v),
      num("cell.g_equalizer_s", &Config::g_equalizer_s),
      num("cell.g_w1_pulldown_s", &Config::g_w1_pulldown_s),
      integer("array.total_cells", &Config::total_cells),
      integer("array.cells_per_subcolumn", &Config::cells_per_subcolumn),
      integer("array.bits_per_word", &Config::bits_per_word),
      num("array.c_bl_f", &Config::c_bl_f),
      num("array.c_vg1_f", &Config::c_vg1_f),
      num("array.c_vg2_f", &Config::c_vg2_f),
      num("array.c_vssm_read_64kb_f", &Config::c_vssm_read_64kb_f),
      num("array.dt_s", &Config::dt_s),
      num("array.v_bl0_frac", &Config::v_bl0_frac),
      num("array.v_bl1_frac", &Config::v_bl1_frac),
      integer("array.pattern_zeros", &Config::pattern_zeros),
      word("array.i_avg_mode", &Config::i_avg_mode, {"end", "start", "trap"}),
      num("array.rd_stby_overlap_c", &Config::rd_stby_overlap_c),
      num("array.m1_w_um", &Config::m1_w_um),
      num("array.m2_w_um", &Config::m2_w_um),
      num("timing.wl_slew_v_per_s", &Config::wl_slew_v_per_s),
      num("timing.c_node_f", &Config::c_node_f),
      num("timing.sense_frac", &Config::sense_frac),
      num("timing.write_pulse_s", &Config::write_pulse_s),
      num("timing.t_max_s", &Config::t_max_s),
      num("power.c_gbit_f", &Config::c_gbit_f),
      num("power.c_gwr_f", &Config::c_gwr_f),
      num("power.duty_hz", &Config::duty_hz),
      boolean("power.ground_hold", &Config::ground_hold),
  };
  return table;
}

const Entry* find_entry(const std::string& key) {
  for (const auto& e : registry())
    if (key == e.key) return &e;
  return nullptr;
}

void set_key(Config& cfg, const std::string& key, const std::string& value,
             int line) {
  const Entry* e = find_entry(key);
  if (!e) throw config_error("unknown key '" + key + "'", line, key);
  e->set(cfg, value, line);
}

}  // namespace

void parse_ini(Config& cfg, const std::string& text) {
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    size_t cmt = s.find_first_of("#;");
    if (cmt != std::string::npos) s = trim(s.substr(0, cmt));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']')
        throw config_error("unterminated section header", line, s);
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty())
        throw config_error("empty section header", line, s);
      continue;
    }
    size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw config_error("expected key=value, got '" + s + "'", line, s);
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (section.empty())
      throw config_error("key '" + key + "' before any [section]", line, key);
    set_key(cfg, section + "." + key, value, line);
  }
}

void apply_set(Config& cfg, const std::string& assignment) {
  size_t eq = assignment.find('=');
  if (eq == std::string::npos)
    throw config_error("--set wants section.key=value, got '" + assignment +
                           "'",
                       0, assignment);
  std::string key = trim(assignment.substr(0, eq));
  std::string value = trim(assignment.substr(eq + 1));
  set_key(cfg, key, value, 0);
}

std::vector<std::pair<std::string, std::string>> echo_config(
    const Config& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(registry().size());
  for (const auto& e : registry()) out.emplace_back(e.key, e.get(cfg));
  return out;
}

DeviceParams Config::device(Polarity p, VtFlavor f) const {
  DeviceParams d =
      p == Polarity::NMOS ? DeviceParams::nmos(f) : DeviceParams::pmos(f);
  d.transconductance_a_per_v2 =
      p == Polarity::NMOS ? nmos_k_a_per_v2 : pmos_k_a_per_v2;
  d.subthreshold_swing_mv = swing_mv;
  d.dibl_v_per_v = dibl_v_per_v;
  d.lambda_per_v = lambda_per_v;
  d.vt_tempco_v_per_k = vt_tempco_v_per_k;
  d.gate_leak_frac = gate_leak_frac;
  switch (f) {
    case VtFlavor::LVT: d.vth_nominal_v = lvt_v; break;
    case VtFlavor::SVT: d.vth_nominal_v = svt_v; break;
    case VtFlavor::HVT: d.vth_nominal_v = hvt_v; break;
  }
  return d;
}

namespace {
// Swaps in config-derived device parameters while keeping the geometry the
// topology factory chose (beta widening and so on).
void rebuild(const Config& cfg, DeviceParams& dp, VtFlavor f) {
  DeviceParams fresh = cfg.device(dp.polarity, f);
  fresh.width_um = dp.width_um;
  fresh.length_um = dp.length_um;
  dp = fresh;
}
}  // namespace

CellTopology Config::cell_5t() const {
  VtFlavor inv = flavor_from_string(inverter_flavor);
  VtFlavor acc = flavor_from_string(access_flavor);
  CellTopology c = CellTopology::five_t_sdg(inv, acc);
  rebuild(*this, c.n1, inv);
  rebuild(*this, c.p1, inv);
  rebuild(*this, c.n2, inv);
  rebuild(*this, c.p2, inv);
  rebuild(*this, c.n3, acc);
  rebuild(*this, c.a2, acc);
  return c;
}

CellTopology Config::cell_6t() const {
  VtFlavor inv = flavor_from_string(inverter_flavor);
  VtFlavor acc = flavor_from_string(access_flavor);
  CellTopology c = CellTopology::six_t(beta_6t, inv, acc);
  rebuild(*this, c.n1, inv);
  rebuild(*this, c.p1, inv);
  rebuild(*this, c.n2, inv);
  rebuild(*this, c.p2, inv);
  rebuild(*this, c.n3, acc);
  rebuild(*this, c.a2, acc);
  return c;
}

ArrayConfig Config::array_config() const {
  ArrayConfig a = ArrayConfig::defaults();
  a.total_cells = total_cells;
  a.cells_per_subcolumn = cells_per_subcolumn;
  a.bits_per_word = bits_per_word;
  a.c_bl_f = c_bl_f;
  a.c_vg1_f = c_vg1_f;
  a.c_vg2_f = c_vg2_f;
  a.c_vssm_read_f = c_vssm_read_64kb_f * (total_cells / 65536.0);
  a.dt_s = dt_s;
  a.v_bl0_frac = v_bl0_frac;
  a.v_bl1_frac = v_bl1_frac;
  a.rd_stby_overlap_c = rd_stby_overlap_c;
  a.clamp_m1 = device(Polarity::PMOS, VtFlavor::SVT);
  a.clamp_m1.width_um = m1_w_um;
  a.clamp_m2 = device(Polarity::NMOS, VtFlavor::SVT);
  a.clamp_m2.width_um = m2_w_um;
  return a;
}

WriteDrive Config::write_drive() const {
  WriteDrive d;
  d.w1_vg1_v = w1_vg1_v;
  d.w0_vg1_v = w0_vg1_v;
  d.g_equalizer_s = g_equalizer_s;
  d.g_w1_pulldown_s = g_w1_pulldown_s;
  return d;
}

TimingModel Config::timing_model() const {
  TimingModel t;
  t.wl_slew_v_per_s = wl_slew_v_per_s;
  t.c_node_f = c_node_f;
  t.sense_frac = sense_frac;
  t.write_pulse_s = write_pulse_s;
  t.t_max_s = t_max_s;
  return t;
}

PowerParams Config::power_params() const {
  PowerParams p;
  p.c_gbit_f = c_gbit_f;
  p.c_gwr_f = c_gwr_f;
  p.duty_hz = duty_hz;
  p.ground_hold = ground_hold;
  p.g_equalizer_s = g_equalizer_s;
  p.g_w1_pulldown_s = g_w1_pulldown_s;
  p.write_pulse_s = write_pulse_s;
  p.w0_vg1_v = w0_vg1_v;
  return p;
}

PowerContext Config::power_context() const {
  PowerContext ctx;
  ctx.cell_5t = cell_5t();
  ctx.cell_6t = cell_6t();
  ctx.array = array_config();
  ctx.params = power_params();
  ctx.vddm = vddm_v;
  ctx.vmin = vmin_v;
  return ctx;
}

Corner Config::corner(const std::string& name, double temperature_c) const {
  return Corner::make(name, temperature_c, sigma_vth_v, sigma_k_frac);
}

IAvgMode Config::i_avg() const {
  if (i_avg_mode == "end") return IAvgMode::EndOfCycle;
  if (i_avg_mode == "start") return IAvgMode::StartOfCycle;
  return IAvgMode::Trapezoid;
}

void Config::validate() const {
  auto fail = [](const std::string& msg, const char* key) {
    throw config_error(msg, 0, key);
  };
  if (vddm_v <= 0.0) fail("cell.vddm_v must be positive", "cell.vddm_v");
  if (vmin_v <= 0.0 || vmin_v >= vddm_v)
    fail("cell.vmin_v must sit strictly between 0 and vddm_v", "cell.vmin_v");
  // n = swing / (ln10 * phit) has to stay above 1 for the model to mean
  // anything; 60 mV/decade is the room-temperature floor.
  if (swing_mv < 60.0)
    fail("devices.swing_mv below the 60 mV/decade floor", "devices.swing_mv");
  if (beta_6t <= 0.0) fail("cell.beta_6t must be positive", "cell.beta_6t");
  if (total_cells < cells_per_subcolumn * bits_per_word)
    fail("array.total_cells smaller than one sub-block",
         "array.total_cells");
  if (cells_per_subcolumn < 1 || bits_per_word < 1 || bits_per_word > 16)
    fail("array word geometry out of range", "array.bits_per_word");
  if (c_bl_f < 0 || c_vg1_f < 0 || c_vg2_f < 0 || c_vssm_read_64kb_f <= 0)
    fail("array capacitances must be nonnegative, tank positive",
         "array.c_vssm_read_64kb_f");
  if (dt_s <= 0) fail("array.dt_s must be positive", "array.dt_s");
  if (v_bl0_frac < 0 || v_bl0_frac > 1 || v_bl1_frac < 0 || v_bl1_frac > 1)
    fail("bitline level fractions must lie in [0, 1]", "array.v_bl0_frac");
  if (pattern_zeros < 0 || pattern_zeros > bits_per_word)
    fail("array.pattern_zeros must fit in the word", "array.pattern_zeros");
  if (sense_frac <= 0 || sense_frac >= 1)
    fail("timing.sense_frac must lie in (0, 1)", "timing.sense_frac");
  if (wl_slew_v_per_s <= 0)
    fail("timing.wl_slew_v_per_s must be positive", "timing.wl_slew_v_per_s");
  if (duty_hz < 0) fail("power.duty_hz cannot be negative", "power.duty_hz");
  if (duty_hz > 1.0 / dt_s)
    fail("power.duty_hz exceeds one access per array.dt_s cycle",
         "power.duty_hz");
  if (g_equalizer_s < 0 || g_w1_pulldown_s < 0)
    fail("write-path conductances cannot be negative", "cell.g_equalizer_s");
}

}  // namespace sdg

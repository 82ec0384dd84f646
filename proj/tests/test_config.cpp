#include <set>
#include <string>

#include "doctest.h"
#include "sdgsim/config.hpp"

using namespace sdg;

TEST_CASE("defaults validate and build consistent model objects") {
  Config cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.vssm_v() == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(cfg.array_config().c_vssm_read_f == doctest::Approx(9e-12));
  CHECK(cfg.cell_5t().kind == CellKind::FiveTSDG);
  CHECK(cfg.cell_6t().kind == CellKind::SixT);
  CHECK(cfg.i_avg() == IAvgMode::EndOfCycle);
  CHECK(cfg.corner("FS", 120.0).name == "FS");
  CHECK(cfg.corner("FS", 120.0).temperature_c == 120.0);
}

TEST_CASE("ini text lands in the right fields and leaves the rest alone") {
  Config cfg;
  parse_ini(cfg,
            "# tuned-down retention corner\n"
            "[devices]\n"
            "swing_mv = 100\n"
            "[cell]\n"
            "vmin_v = 0.65\n"
            "inverter_flavor = svt\n"
            "[array]\n"
            "total_cells = 131072\n"
            "; mid-cycle current sampling\n"
            "i_avg_mode = trap\n"
            "[power]\n"
            "ground_hold = true\n");
  CHECK(cfg.swing_mv == 100.0);
  CHECK(cfg.vmin_v == 0.65);
  CHECK(cfg.inverter_flavor == "svt");
  CHECK(cfg.total_cells == 131072);
  CHECK(cfg.i_avg() == IAvgMode::Trapezoid);
  CHECK(cfg.ground_hold);
  // untouched keys keep their defaults
  CHECK(cfg.dibl_v_per_v == 0.06);
  CHECK(cfg.access_flavor == "svt");
  CHECK(cfg.bits_per_word == 16);
}

TEST_CASE("the read tank capacitance scales with the cell count") {
  Config cfg;
  cfg.total_cells = 65536 * 16;
  CHECK(cfg.array_config().c_vssm_read_f ==
        doctest::Approx(16 * 9e-12).epsilon(1e-12));
  cfg.total_cells = 65536 / 2;
  CHECK(cfg.array_config().c_vssm_read_f ==
        doctest::Approx(4.5e-12).epsilon(1e-12));
  // the knob itself is per-64Kb and does not move
  CHECK(cfg.c_vssm_read_64kb_f == 9e-12);
}

TEST_CASE("unknown keys are refused by name with their line") {
  Config cfg;
  try {
    parse_ini(cfg, "[array]\ntotal_cellz = 5\n");
    FAIL("expected config_error");
  } catch (const config_error& e) {
    CHECK(e.line() == 2);
    CHECK(e.key() == "array.total_cellz");
    CHECK(std::string(e.what()).find("unknown key") != std::string::npos);
  }
}

TEST_CASE("malformed ini lines point at themselves") {
  Config cfg;
  try {
    parse_ini(cfg, "[array]\ndt_s = 1e-9\njust words\n");
    FAIL("expected config_error");
  } catch (const config_error& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("key=value") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_ini(cfg, "dt_s = 1e-9\n"), config_error);  // no section
  CHECK_THROWS_AS(parse_ini(cfg, "[array\ndt_s = 1e-9\n"), config_error);
}

TEST_CASE("values are refused when the type does not fit") {
  Config cfg;
  CHECK_THROWS_AS(parse_ini(cfg, "[devices]\nswing_mv = abc\n"), config_error);
  CHECK_THROWS_AS(parse_ini(cfg, "[devices]\nswing_mv = 1.3volts\n"),
                  config_error);
  CHECK_THROWS_AS(parse_ini(cfg, "[array]\ntotal_cells = 1.5\n"), config_error);
  CHECK_THROWS_AS(parse_ini(cfg, "[power]\nground_hold = perhaps\n"),
                  config_error);
  try {
    parse_ini(cfg, "[array]\ni_avg_mode = middle\n");
    FAIL("expected config_error");
  } catch (const config_error& e) {
    CHECK(std::string(e.what()).find("end, start, trap") != std::string::npos);
  }
  // nothing above may have half-applied
  CHECK(cfg.swing_mv == 95.0);
  CHECK(cfg.total_cells == 65536);
}

TEST_CASE("command-line overrides use the same registry") {
  Config cfg;
  apply_set(cfg, "cell.vddm_v=1.2");
  CHECK(cfg.vddm_v == 1.2);
  apply_set(cfg, "array.i_avg_mode=start");
  CHECK(cfg.i_avg() == IAvgMode::StartOfCycle);

  CHECK_THROWS_AS(apply_set(cfg, "cell.vddm_v"), config_error);  // no value
  try {
    apply_set(cfg, "cell.nonsense=1");
    FAIL("expected config_error");
  } catch (const config_error& e) {
    CHECK(e.line() == 0);  // overrides have no source line
    CHECK(e.key() == "cell.nonsense");
  }
}

TEST_CASE("validation rejects combinations that cannot work together") {
  auto expect_key = [](Config& cfg, const std::string& key) {
    try {
      cfg.validate();
      FAIL_CHECK("expected config_error for ", key);
    } catch (const config_error& e) {
      CHECK(e.key() == key);
    }
  };

  Config cfg;
  cfg.vmin_v = 1.4;  // above vddm: no retention headroom left
  expect_key(cfg, "cell.vmin_v");

  cfg = Config{};
  cfg.swing_mv = 55.0;  // below the room-temperature physical floor
  expect_key(cfg, "devices.swing_mv");

  cfg = Config{};
  cfg.total_cells = 512;  // smaller than one 64x16 sub-block
  expect_key(cfg, "array.total_cells");

  cfg = Config{};
  cfg.pattern_zeros = 17;
  expect_key(cfg, "array.pattern_zeros");

  cfg = Config{};
  cfg.duty_hz = 1e9;  // faster than one access per dt
  expect_key(cfg, "power.duty_hz");

  cfg = Config{};
  cfg.sense_frac = 1.0;
  expect_key(cfg, "timing.sense_frac");
}

TEST_CASE("echoed configuration feeds back through the override path") {
  Config cfg;
  cfg.vddm_v = 1.25;
  cfg.total_cells = 131072;
  cfg.i_avg_mode = "trap";
  auto echoed = echo_config(cfg);
  REQUIRE(!echoed.empty());

  std::set<std::string> seen;
  Config rebuilt;
  for (const auto& [key, value] : echoed) {
    CHECK(key.find('.') != std::string::npos);
    CHECK(seen.insert(key).second);  // no duplicate keys
    apply_set(rebuilt, key + "=" + value);
  }
  CHECK(rebuilt.vddm_v == cfg.vddm_v);
  CHECK(rebuilt.total_cells == cfg.total_cells);
  CHECK(rebuilt.i_avg_mode == cfg.i_avg_mode);
  CHECK(echo_config(rebuilt) == echoed);
}

TEST_CASE("builders hand each model the knobs it owns") {
  Config cfg;
  cfg.sense_frac = 0.6;
  cfg.g_equalizer_s = 2e-3;
  cfg.duty_hz = 1e7;
  cfg.w0_vg1_v = 0.05;
  CHECK(cfg.timing_model().sense_frac == 0.6);
  CHECK(cfg.write_drive().g_equalizer_s == 2e-3);
  CHECK(cfg.power_params().g_equalizer_s == 2e-3);
  CHECK(cfg.power_params().duty_hz == 1e7);
  CHECK(cfg.power_params().w0_vg1_v == 0.05);
  CHECK(cfg.write_drive().w0_vg1_v == 0.05);
  CHECK(cfg.power_context().vmin == cfg.vmin_v);
}

TEST_CASE("flavor names parse case-sensitively") {
  CHECK(flavor_from_string("lvt") == VtFlavor::LVT);
  CHECK(flavor_from_string("svt") == VtFlavor::SVT);
  CHECK(flavor_from_string("hvt") == VtFlavor::HVT);
  CHECK_THROWS_AS(flavor_from_string("HVT"), config_error);
  CHECK_THROWS_AS(flavor_from_string(""), config_error);
}

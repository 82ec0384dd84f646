#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

// Drives the installed binary end to end: exit protocol, CSV layout and
// the determinism promise. Everything runs in throwaway directories under
// the system temp root.

namespace fs = std::filesystem;

namespace {

struct CliRun {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& tag) {
  fs::path d = fs::temp_directory_path() / ("sdgsim_cli_" + tag);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

CliRun run_cli(const std::string& args, const fs::path& dir) {
  const char* bin = std::getenv("SDGSIM_BIN");
  REQUIRE_MESSAGE(bin != nullptr, "SDGSIM_BIN must point at the binary");
  fs::path so = dir / "stdout.txt";
  fs::path se = dir / "stderr.txt";
  std::string cmd = std::string(bin) + " " + args + " >" + so.string() +
                    " 2>" + se.string();
  int status = std::system(cmd.c_str());
  CliRun r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(so);
  r.err = slurp(se);
  return r;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("trip-table emits the documented csv and a passing summary") {
  fs::path d = fresh_dir("trip");
  CliRun r = run_cli("trip-table --out " + (d / "out").string(), d);
  CHECK(r.exit_code == 0);

  auto rows = lines_of(slurp(d / "out" / "trip_table.csv"));
  REQUIRE(rows.size() == 6);  // header plus the five default corners
  CHECK(rows[0] == "corner,trip_mv,qmax_mv,qmin_mv");
  const char* corners[] = {"TT", "FF", "SS", "FS", "SF"};
  for (int i = 0; i < 5; ++i)
    CHECK(rows[i + 1].substr(0, rows[i + 1].find(',')) == corners[i]);

  std::string summary = slurp(d / "out" / "summary");
  CHECK(summary.find("command: trip-table") != std::string::npos);
  CHECK(summary.find("result: pass") != std::string::npos);
}

TEST_CASE("the same command twice produces byte-identical outputs") {
  fs::path d = fresh_dir("repeat");
  CliRun r1 = run_cli("trip-table --temp 85 --out " + (d / "a").string(), d);
  CliRun r2 = run_cli("trip-table --temp 85 --out " + (d / "b").string(), d);
  CHECK(r1.exit_code == 0);
  CHECK(r2.exit_code == 0);
  CHECK(slurp(d / "a" / "trip_table.csv") == slurp(d / "b" / "trip_table.csv"));
  CHECK(slurp(d / "a" / "summary") == slurp(d / "b" / "summary"));
}

TEST_CASE("corner and temperature options select what actually runs") {
  fs::path d = fresh_dir("snm");
  CliRun r =
      run_cli("snm --corners TT,FS --temp 120 --out " + (d / "out").string(),
              d);
  CHECK(r.exit_code == 0);

  auto rows = lines_of(slurp(d / "out" / "margins.csv"));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == "kind,corner,temp_c,value_mv");
  CHECK(rows[1].find("hold_snm,TT,120,") == 0);
  CHECK(rows[2].find("hold_snm,FS,120,") == 0);
  CHECK(fs::exists(d / "out" / "butterfly_a_TT.csv"));
  CHECK(fs::exists(d / "out" / "butterfly_b_FS.csv"));
  CHECK_FALSE(fs::exists(d / "out" / "butterfly_a_SS.csv"));
}

TEST_CASE("a bad override exits 2 and names the key") {
  fs::path d = fresh_dir("badset");
  CliRun r = run_cli("trip-table --set arrray.total_cells=5 --out " +
                         (d / "out").string(),
                     d);
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("config error") != std::string::npos);
  CHECK(r.err.find("arrray.total_cells") != std::string::npos);
  CHECK_FALSE(fs::exists(d / "out"));  // refused before any output
}

TEST_CASE("a missing config file exits 2") {
  fs::path d = fresh_dir("noconf");
  CliRun r = run_cli("trip-table --config " + (d / "absent.ini").string() +
                         " --out " + (d / "out").string(),
                     d);
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("cannot open config file") != std::string::npos);
}

TEST_CASE("an unknown corner name exits 2") {
  fs::path d = fresh_dir("badcorner");
  CliRun r = run_cli("trip-table --corners TT,XX --out " +
                         (d / "out").string(),
                     d);
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("unknown corner 'XX'") != std::string::npos);
}

TEST_CASE("a failed invariant exits 1 and is named on stderr") {
  fs::path d = fresh_dir("inv");
  // With VG1 left at the rail the cell cannot take a one, so the
  // writability check must trip.
  CliRun r = run_cli("write-margin --corners TT --set cell.w1_vg1_v=0.6 --out " +
                         (d / "out").string(),
                     d);
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("invariant failed: writable_w1_TT") != std::string::npos);

  // The outputs are still written for post-mortem, with the margin marked
  // by the -1 sentinel.
  std::string csv = slurp(d / "out" / "margins.csv");
  CHECK(csv.find("w1m,TT,27,-1") != std::string::npos);
  std::string summary = slurp(d / "out" / "summary");
  CHECK(summary.find("result: fail") != std::string::npos);
}

TEST_CASE("a config file feeds the run and is echoed in the summary") {
  fs::path d = fresh_dir("conf");
  {
    std::ofstream ini(d / "run.ini");
    ini << "[cell]\nvmin_v = 0.65\n[array]\npattern_zeros = 4\n";
  }
  CliRun r = run_cli("trip-table --config " + (d / "run.ini").string() +
                         " --corners TT --out " + (d / "out").string(),
                     d);
  CHECK(r.exit_code == 0);
  std::string summary = slurp(d / "out" / "summary");
  CHECK(summary.find("cell.vmin_v = 0.65") != std::string::npos);
  CHECK(summary.find("array.pattern_zeros = 4") != std::string::npos);
  CHECK(summary.find("vssm_v = 0.65") != std::string::npos);
}

TEST_CASE("vssm-trace reports a settled trace per corner") {
  fs::path d = fresh_dir("trace");
  CliRun r = run_cli("vssm-trace --corners TT --out " + (d / "out").string(),
                     d);
  CHECK(r.exit_code == 0);

  auto rows = lines_of(slurp(d / "out" / "trace_TT.csv"));
  REQUIRE(rows.size() >= 4);
  CHECK(rows[0] == "cycle,vssm_volts,delta_v_volts");
  // final sample is the settled point: delta exactly zero
  CHECK(rows.back().substr(rows.back().rfind(',') + 1) == "0");

  std::string summary = slurp(d / "out" / "summary");
  CHECK(summary.find("steady_state_TT = ") != std::string::npos);
  CHECK(summary.find("trace_settles_TT: pass") != std::string::npos);
  CHECK(summary.find("trace_monotone_TT: pass") != std::string::npos);
}

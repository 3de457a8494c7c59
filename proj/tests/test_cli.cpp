#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using dissolv::testing::fixture;
using dissolv::testing::slurp;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

// Runs the CLI with stderr folded into stdout.
Run run(const std::string& args) {
  const std::string cmd = std::string("\"") + DISSOLVPCB_EXE + "\" " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf;
  while (std::size_t n = fread(buf.data(), 1, buf.size(), p)) r.out.append(buf.data(), n);
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string quoted(const fs::path& p) { return "\"" + p.string() + "\""; }

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("dissolvpcb_cli_" + name);
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("inspect reports counts") {
  const auto r = run("inspect " + quoted(fixture("two_layer_demo.kicad_pcb")) + " --format json");
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["copper_layers"] == 2);
  CHECK(j["segments"] == 6);
  CHECK(j["vias"] == 2);
  CHECK(j["pads"] == 12);
  CHECK(j["nets"] == 3);
}

TEST_CASE("drc exit codes") {
  CHECK(run("drc " + quoted(fixture("two_layer_demo.kicad_pcb"))).status == 0);
  const auto bad = run("drc " + quoted(fixture("gap_0p10.kicad_pcb")) + " --format json");
  CHECK(bad.status == 1);
  const auto j = nlohmann::json::parse(bad.out);
  REQUIRE(j["violations"].size() == 1);
  CHECK(j["violations"][0]["rule"] == "TraceClearance");
}

TEST_CASE("operational errors exit with 2") {
  CHECK(run("drc " + quoted(fixture("truncated.kicad_pcb"))).status == 2);
  CHECK(run("inspect /nonexistent/board.kicad_pcb").status == 2);
  CHECK(run("").status == 2);
  CHECK(run("frobnicate").status == 2);
  CHECK(run("synth " + quoted(fixture("single_trace.kicad_pcb")) + " --out " + quoted(scratch("p")) +
            " --mesh-pitch 0")
            .status == 2);
  CHECK(run("synth " + quoted(fixture("single_trace.kicad_pcb")) + " --out " + quoted(scratch("p")) +
            " --volume-pitch -1")
            .status == 2);
  CHECK(run("estimate " + quoted(fixture("single_trace.kicad_pcb")) + " --current LINE").status == 2);
  CHECK(run("estimate " + quoted(fixture("single_trace.kicad_pcb")) + " --current NOPE=1").status == 2);
  const auto e = run("inventory --bundled nonsense");
  CHECK(e.status == 2);
  CHECK(e.out.rfind("error: ", 0) == 0);
}

TEST_CASE("config below process floors is refused") {
  const fs::path dir = scratch("cfg");
  fs::create_directories(dir);
  const fs::path cfg = dir / "thin.json";
  {
    std::FILE* f = std::fopen(cfg.c_str(), "w");
    std::fputs("{\"wall_xy_min\": 0.1}", f);
    std::fclose(f);
  }
  CHECK(run("drc " + quoted(fixture("two_layer_demo.kicad_pcb")) + " --config " + quoted(cfg)).status == 2);
  CHECK(run("drc " + quoted(fixture("two_layer_demo.kicad_pcb")) + " --config " +
            quoted(fs::path(DISSOLV_FIXTURE_DIR) / "../../data/process_0p4_nozzle.json"))
            .status == 1);
}

TEST_CASE("synth writes a reproducible STL and manifest") {
  const fs::path a = scratch("a"), b = scratch("b");
  const std::string in = quoted(fixture("single_trace.kicad_pcb"));
  REQUIRE(run("synth " + in + " --out " + quoted(a)).status == 0);
  REQUIRE(run("synth " + in + " --out " + quoted(b)).status == 0);
  CHECK(slurp(a / "board.stl") == slurp(b / "board.stl"));
  CHECK(slurp(a / "manifest.json") == slurp(b / "manifest.json"));
  const auto m = nlohmann::json::parse(slurp(a / "manifest.json"));
  CHECK(m["mesh"]["watertight"] == true);
  CHECK(m["mesh"]["volume_mm3"].get<double>() > 0);
  CHECK(m["nets"][0]["outlets"].get<int>() >= 1);
  CHECK(m["input"]["sha256"].get<std::string>().size() == 64);
  CHECK(m["print_settings_advisory"].size() >= 5);

  const fs::path c = scratch("c");
  REQUIRE(run("synth " + in + " --out " + quoted(c) + " --stl ascii").status == 0);
  CHECK(slurp(c / "board.stl").rfind("solid ", 0) == 0);
}

TEST_CASE("synth refuses rule violations unless forced") {
  const std::string in = quoted(fixture("gap_0p10.kicad_pcb"));
  CHECK(run("synth " + in + " --out " + quoted(scratch("g1"))).status == 1);
  const fs::path d = scratch("g2");
  REQUIRE(run("synth " + in + " --out " + quoted(d) + " --force").status == 0);
  const auto m = nlohmann::json::parse(slurp(d / "manifest.json"));
  CHECK(m["drc"]["violations"] == 1);
  CHECK(m["drc"]["forced"] == true);
}

TEST_CASE("estimate reports the reference channel and per-net resistance") {
  const auto r = run("estimate " + quoted(fixture("two_layer_demo.kicad_pcb")) +
                     " --current VCC=0.5 --current GND=6 --format json");
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["reference_channel"]["nominal_ohm"].get<double>() == doctest::Approx(0.017755).epsilon(1e-5));
  CHECK(j["reference_channel"]["measured_ohm"] == 0.03);
  CHECK(j["nets"].size() == 3);
  bool flagged = false;
  for (const auto& n : j["currents"]["nets"])
    if (n["net"] == "GND") flagged = n["over_limit"];
  CHECK(flagged);
}

TEST_CASE("inventory with a factor table") {
  const auto r = run("inventory --format json --factors " +
                     quoted(fs::path(DISSOLV_FIXTURE_DIR) / "../../data/factors_example.csv"));
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.dump().find("climate change") != std::string::npos);
}

TEST_CASE("scalar and vector kernels produce the same files") {
  const fs::path a = scratch("simd_default"), b = scratch("simd_scalar");
  const std::string in = quoted(fixture("two_layer_demo.kicad_pcb"));
  REQUIRE(run("synth " + in + " --out " + quoted(a)).status == 0);
  const Run r = [&] {
    setenv("DISSOLVPCB_SIMD", "scalar", 1);
    Run x = run("synth " + in + " --out " + quoted(b));
    unsetenv("DISSOLVPCB_SIMD");
    return x;
  }();
  REQUIRE(r.status == 0);
  CHECK(slurp(a / "board.stl") == slurp(b / "board.stl"));
  CHECK(slurp(a / "manifest.json") == slurp(b / "manifest.json"));
}

// dissolvpcb: KiCad board -> printable PVA substrate with liquid-metal channels.
//
// Exit status: 0 success, 1 design-rule violations, 2 operational errors.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dissolv/analysis.hpp"
#include "dissolv/drc.hpp"
#include "dissolv/error.hpp"
#include "dissolv/inventory.hpp"
#include "dissolv/meshing.hpp"
#include "dissolv/pcb_model.hpp"
#include "dissolv/process.hpp"
#include "dissolv/sockets.hpp"
#include "dissolv/stl.hpp"
#include "dissolv/synth.hpp"
#include "json.hpp"
#include "sha256.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace dissolv;

namespace {

constexpr int kOk = 0;
constexpr int kViolations = 1;
constexpr int kFailure = 2;

// Raised for bad flag values detected after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string input;
  std::string out_dir;
  std::string config;
  std::string sockets;
  double mesh_pitch = 0.1;
  double volume_pitch = 0.05;
  std::string stl = "binary";
  std::vector<std::string> currents;
  std::string format = "table";
  bool force = false;
  std::string preset = "nominal";
  std::string bundled = "dissolvpcb";
  std::string baseline = "fr4";
  std::string factors;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& p, const std::string& data) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + p.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  out.close();
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + p.string());
}

fs::path prepare_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(ErrorCode::IoError, "cannot create output directory " + dir);
  return dir;
}

ProcessParams load_config(const RunConfig& rc) {
  ProcessParams p = rc.config.empty() ? ProcessParams{} : load_params(rc.config);
  const auto violations = validate_params(p);
  if (!violations.empty()) throw Error(ErrorCode::ParamBelowMinimum, violations.front().message);
  return p;
}

void check_pitches(const RunConfig& rc) {
  if (!(rc.mesh_pitch > 0)) throw UsageError("--mesh-pitch must be positive");
  if (!(rc.volume_pitch > 0)) throw UsageError("--volume-pitch must be positive");
}

SocketLibrary load_sockets(const RunConfig& rc) {
  if (!rc.sockets.empty()) return load_socket_library(rc.sockets);
  if (const char* env = std::getenv("DISSOLVPCB_SOCKETS"); env && *env) return load_socket_library(env);
  return load_socket_library(default_socket_library_path());
}

void emit(const RunConfig& rc, const json& j, const std::string& table, const std::string& file_name) {
  const std::string text = j.dump(2) + "\n";
  if (rc.format == "json")
    std::cout << text;
  else
    std::cout << table;
  if (!rc.out_dir.empty()) write_file(prepare_out_dir(rc.out_dir) / file_name, text);
}

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

json vec2_json(Vec2 v) { return json::array({v.x, v.y}); }
json vec3_json(Vec3 v) { return json::array({v.x, v.y, v.z}); }

json warnings_json(const PcbDesign& d) {
  json arr = json::array();
  for (const auto& w : d.warnings) arr.push_back({{"line", w.line}, {"message", w.message}});
  return arr;
}

// ---------------------------------------------------------------- inspect

int cmd_inspect(const RunConfig& rc) {
  const PcbDesign d = load_design(rc.input);
  const auto poly = loop_polygon(sort_outline(d.outline), 0.01);
  Vec2 lo = poly.front(), hi = poly.front();
  for (Vec2 p : poly) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
  std::size_t pads = 0;
  for (const auto& fp : d.footprints) pads += fp.pads.size();
  const std::size_t nets = d.nets.size() - (d.nets.contains(0) ? 1 : 0);

  json j;
  j["input"] = fs::path(rc.input).filename().string();
  j["version"] = d.version ? json(*d.version) : json(nullptr);
  j["copper_layers"] = d.copper_layer_count;
  j["layer_names"] = d.layer_names;
  j["nets"] = nets;
  j["segments"] = d.segments.size();
  j["vias"] = d.vias.size();
  j["footprints"] = d.footprints.size();
  j["pads"] = pads;
  j["outline_elements"] = d.outline.size();
  j["board_bbox"] = {{"min", vec2_json(lo)}, {"max", vec2_json(hi)}};
  j["warnings"] = warnings_json(d);

  std::ostringstream t;
  t << "file:             " << j["input"].get<std::string>() << "\n"
    << "copper layers:    " << d.copper_layer_count << "\n"
    << "nets:             " << nets << "\n"
    << "segments:         " << d.segments.size() << "\n"
    << "vias:             " << d.vias.size() << "\n"
    << "footprints:       " << d.footprints.size() << " (" << pads << " pads)\n"
    << "outline elements: " << d.outline.size() << "\n"
    << "board bbox:       (" << fmt(lo.x) << ", " << fmt(lo.y) << ") - (" << fmt(hi.x) << ", " << fmt(hi.y)
    << ") mm\n";
  for (const auto& w : d.warnings) t << "warning (line " << w.line << "): " << w.message << "\n";
  emit(rc, j, t.str(), "inspect.json");
  return kOk;
}

// ---------------------------------------------------------------- drc

int cmd_drc(const RunConfig& rc) {
  const ProcessParams params = load_config(rc);
  const PcbDesign d = load_design(rc.input);
  const auto violations = run_drc(d, params);
  const std::string text = drc_report_json(violations, params);
  if (rc.format == "json")
    std::cout << text;
  else
    std::cout << drc_report_table(violations);
  if (!rc.out_dir.empty()) write_file(prepare_out_dir(rc.out_dir) / "drc_report.json", text);
  return violations.empty() ? kOk : kViolations;
}

// ---------------------------------------------------------------- synth

constexpr const char* kPrintAdvice[] = {
    "nozzle: 0.2 mm",
    "layer height: 0.06 mm",
    "print speed: 30 mm/s",
    "retraction: 10 mm",
    "bridge infill angle: 22.5 degrees",
    "dry the PVA filament before printing",
};

json volume_json(const geom::VolumeEstimate& v) {
  return {{"volume_mm3", v.volume}, {"error_bound_mm3", v.error_bound}, {"pitch_mm", v.pitch}};
}

int cmd_synth(const RunConfig& rc) {
  check_pitches(rc);
  if (rc.stl != "binary" && rc.stl != "ascii") throw UsageError("--stl must be ascii or binary");
  if (rc.out_dir.empty()) throw UsageError("synth needs --out");
  const ProcessParams params = load_config(rc);
  const SocketLibrary lib = load_sockets(rc);
  const std::string source = read_file(rc.input);
  const PcbDesign d = load_design(rc.input);
  const fs::path out = prepare_out_dir(rc.out_dir);

  const auto violations = run_drc(d, params);
  if (!violations.empty() && !rc.force) {
    std::cerr << "error: " << violations.size() << " design-rule violation(s); rerun with --force to synthesize anyway\n";
    std::cerr << drc_report_table(violations);
    return kViolations;
  }

  SynthOptions opts;
  opts.volume_pitch = rc.volume_pitch;
  opts.force = rc.force;
  const Assembly a = assemble(d, params, lib, opts);

  MeshOptions mo;
  mo.pitch = rc.mesh_pitch;
  mo.min_feature = params.trace_width_min;
  const SurfaceMesh sm = extract_surface(a.board, mo);
  const WatertightReport wt = check_watertight(sm.mesh);
  const double mvol = wt.ok() ? signed_volume(sm.mesh) : 0.0;
  const std::string stl = write_stl(sm.mesh, rc.stl == "ascii" ? StlMode::Ascii : StlMode::Binary);
  write_file(out / "board.stl", stl);
  const geom::VolumeEstimate board_vol = geom::volume(a.board, rc.volume_pitch);

  json m;
  m["input"] = {{"file", fs::path(rc.input).filename().string()}, {"sha256", tools::sha256_hex(source)}};
  m["params"] = json::parse(params_to_json(params));
  m["stackup"] = {{"layers", a.stackup.layer_count},
                  {"insulation_mm", a.stackup.insulation},
                  {"trace_height_mm", a.stackup.trace_height},
                  {"board_height_mm", a.stackup.board_height}};
  m["drc"] = {{"violations", violations.size()}, {"forced", rc.force && !violations.empty()}};
  if (!violations.empty()) m["drc"]["report"] = json::parse(drc_report_json(violations, params));

  json nets = json::array();
  for (const auto& n : a.channel_set.nets) {
    json e{{"net", n.name}, {"id", n.net}, {"traces", n.traces.size()}, {"vias", n.vias.size()},
           {"pads", n.pads.size()}, {"outlets", n.outlet_count}};
    if (n.volume) e["channel"] = volume_json(*n.volume);
    nets.push_back(e);
  }
  m["nets"] = nets;
  json warn = json::array();
  for (const auto& w : a.warnings) warn.push_back({{"code", w.code}, {"message", w.message}});
  for (const auto& w : sm.warnings) warn.push_back({{"code", "MeshPitch"}, {"message", w}});
  m["warnings"] = warn;

  const auto& bb = a.board.bounds();
  m["board"] = {{"bbox", {{"min", vec3_json(bb.min)}, {"max", vec3_json(bb.max)}}},
                {"volume", volume_json(board_vol)}};
  json mesh{{"file", "board.stl"},
            {"format", rc.stl},
            {"sha256", tools::sha256_hex(stl)},
            {"pitch_mm", sm.pitch},
            {"vertices", sm.mesh.vertices.size()},
            {"triangles", sm.mesh.triangles.size()},
            {"watertight", wt.ok()},
            {"volume_mm3", mvol},
            {"error_bound_mm3", sm.error_bound}};
  if (auto mb = mesh_bounds(sm.mesh)) mesh["bbox"] = {{"min", vec3_json(mb->min)}, {"max", vec3_json(mb->max)}};
  m["mesh"] = mesh;
  m["print_settings_advisory"] = kPrintAdvice;
  const std::string manifest = m.dump(2) + "\n";
  write_file(out / "manifest.json", manifest);

  if (rc.format == "json") {
    std::cout << manifest;
  } else {
    std::cout << "board: " << fmt(bb.max.x - bb.min.x) << " x " << fmt(bb.max.y - bb.min.y) << " x "
              << fmt(bb.max.z - bb.min.z) << " mm, " << a.stackup.layer_count << " layer(s)\n";
    for (const auto& n : a.channel_set.nets) {
      std::cout << "net " << n.name << ": " << n.outlet_count << " outlet(s)";
      if (n.volume) std::cout << ", channel " << fmt(n.volume->volume, "%.4f") << " mm^3";
      std::cout << "\n";
    }
    for (const auto& w : warn) std::cout << "warning: " << w["code"].get<std::string>() << ": "
                                         << w["message"].get<std::string>() << "\n";
    std::cout << "mesh: " << sm.mesh.triangles.size() << " triangles, "
              << (wt.ok() ? "watertight" : "NOT watertight") << ", " << fmt(mvol, "%.3f") << " mm^3\n";
    std::cout << "wrote " << (out / "board.stl").string() << " and " << (out / "manifest.json").string() << "\n";
  }
  if (!wt.ok()) throw Error(ErrorCode::NotWatertight, "extracted mesh is not watertight");
  return kOk;
}

// ---------------------------------------------------------------- estimate

std::map<std::string, double> parse_currents(const std::vector<std::string>& specs) {
  std::map<std::string, double> out;
  for (const auto& s : specs) {
    const auto eq = s.rfind('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--current expects NET=AMPS, got '" + s + "'");
    const std::string amps = s.substr(eq + 1);
    char* end = nullptr;
    const double v = std::strtod(amps.c_str(), &end);
    if (amps.empty() || *end != '\0') throw UsageError("--current expects NET=AMPS, got '" + s + "'");
    out[s.substr(0, eq)] = v;
  }
  return out;
}

int cmd_estimate(const RunConfig& rc) {
  check_pitches(rc);
  const ProcessParams params = load_config(rc);
  const SocketLibrary lib = load_sockets(rc);
  const PcbDesign d = load_design(rc.input);
  const auto currents = parse_currents(rc.currents);

  MaterialConstants mc;
  if (rc.preset == "nominal") mc.split = kGaInNominal;
  else if (rc.preset == "inventory") mc.split = kGaInInventory;
  else throw UsageError("--preset must be nominal or inventory");

  SynthOptions opts;
  opts.volume_pitch = rc.volume_pitch;
  opts.force = true;  // estimates are informative even for boards that fail DRC
  const Assembly a = assemble(d, params, lib, opts);
  const auto graphs = build_net_graph(d, params, mc);
  const CurrentReport cr = current_check(d, graphs, currents, params);
  const MaterialReport mr = material_estimate(a.channel_set, a.board, mc, rc.volume_pitch);

  const double nominal = trace_resistance(30, 0.7, 0.7, mc.resistivity_egain);
  const double copper = trace_resistance(30, 0.7, 0.035, mc.resistivity_cu);

  json j;
  j["input"] = fs::path(rc.input).filename().string();
  j["drc_violations"] = a.drc_violations;
  j["constants"] = {{"resistivity_egain_uohm_cm", mc.resistivity_egain},
                    {"resistivity_cu_uohm_cm", mc.resistivity_cu},
                    {"density_egain_g_cm3", mc.density_egain},
                    {"density_pva_g_cm3", mc.density_pva},
                    {"ga_fraction", mc.split.ga},
                    {"in_fraction", mc.split.in},
                    {"fill_factor", mc.fill_factor}};
  j["reference_channel"] = {
      {"length_mm", 30.0},
      {"section_mm", {0.7, 0.7}},
      {"nominal_ohm", nominal},
      {"measured_ohm", kMeasuredChannelResistance},
      {"measured_over_nominal", kMeasuredChannelResistance / nominal},
      {"copper_1oz_ohm", copper},
      {"note", "measured value shown for comparison only; no correction is applied"}};

  json nets = json::array();
  std::ostringstream t;
  t << "net resistance (nominal, EGaIn " << fmt(mc.resistivity_egain) << " uOhm*cm)\n";
  for (const auto& [id, g] : graphs) {
    double series = 0.0;
    for (const auto& e : g.edges) series += e.resistance;
    json pairs = json::array();
    const auto& term = g.terminals;
    for (std::size_t i = 0; i < term.size(); ++i) {
      for (std::size_t k = i + 1; k < term.size(); ++k) {
        json p{{"from", g.nodes[term[i]].label}, {"to", g.nodes[term[k]].label}};
        if (g.component[term[i]] == g.component[term[k]])
          p["ohm"] = net_resistance(g, term[i], term[k]);
        else
          p["disconnected"] = true;
        pairs.push_back(p);
      }
    }
    nets.push_back({{"net", g.name},
                    {"nodes", g.nodes.size()},
                    {"edges", g.edges.size()},
                    {"components", g.component_count},
                    {"edge_sum_ohm", series},
                    {"terminal_pairs", pairs}});
    t << "  " << g.name << ": " << g.nodes.size() << " nodes, " << g.edges.size() << " edges";
    if (!g.connected()) t << ", DISCONNECTED (" << g.component_count << " parts)";
    t << "\n";
    for (const auto& p : pairs) {
      t << "    " << p["from"].get<std::string>() << " -> " << p["to"].get<std::string>() << ": ";
      if (p.contains("ohm"))
        t << fmt(p["ohm"].get<double>(), "%.6f") << " Ohm\n";
      else
        t << "disconnected\n";
    }
  }
  j["nets"] = nets;

  json cur = json::array();
  for (const auto& n : cr.nets) {
    json edges = json::array();
    for (const auto& e : n.edges) edges.push_back({{"source", e.source}, {"ohm", e.resistance}, {"watts", e.watts}});
    cur.push_back({{"net", n.name}, {"amps", n.current}, {"over_limit", n.over_limit},
                   {"total_watts", n.total_watts}, {"edges", edges}});
  }
  j["currents"] = {{"limit_amps", cr.limit}, {"nets", cur}, {"warnings", cr.warnings},
                   {"note", "dissipation assumes the full net current in every edge; no thermal model"}};

  j["materials"] = {{"channel_volume_mm3", mr.channel_volume}, {"channel_error_mm3", mr.channel_error},
                    {"egain_g", mr.egain_g},                   {"gallium_g", mr.ga_g},
                    {"indium_g", mr.in_g},                     {"board_volume_mm3", mr.board_volume},
                    {"board_error_mm3", mr.board_error},       {"pva_g", mr.pva_g},
                    {"pitch_mm", mr.pitch}};

  t << "reference 30 mm channel: " << fmt(nominal, "%.6f") << " Ohm nominal, " << fmt(kMeasuredChannelResistance)
    << " Ohm measured (x" << fmt(kMeasuredChannelResistance / nominal, "%.2f") << "), 1 oz copper "
    << fmt(copper, "%.5f") << " Ohm\n";
  for (const auto& n : cr.nets)
    t << "current " << n.name << ": " << fmt(n.current) << " A, " << fmt(n.total_watts, "%.4f") << " W"
      << (n.over_limit ? "  OVER LIMIT" : "") << "\n";
  t << "channel volume: " << fmt(mr.channel_volume, "%.3f") << " +- " << fmt(mr.channel_error, "%.3f") << " mm^3\n"
    << "EGaIn: " << fmt(mr.egain_g, "%.4f") << " g (Ga " << fmt(mr.ga_g, "%.4f") << " g, In " << fmt(mr.in_g, "%.4f")
    << " g)\n"
    << "PVA (solid upper bound): " << fmt(mr.pva_g, "%.3f") << " g from " << fmt(mr.board_volume, "%.1f")
    << " mm^3\n";
  for (const auto& w : cr.warnings) t << "warning: " << w << "\n";
  emit(rc, j, t.str(), "estimate.json");
  return kOk;
}

// ---------------------------------------------------------------- inventory

int cmd_inventory(const RunConfig& rc) {
  const InventoryRecord ours = bundled_record(rc.bundled);
  const InventoryRecord base = bundled_record(rc.baseline);
  std::optional<FactorTable> factors;
  if (!rc.factors.empty()) factors = load_factor_csv(rc.factors);
  const InventoryReport r = inventory_report(ours, base, factors);
  const std::string text = inventory_report_json(r);
  if (rc.format == "json")
    std::cout << text;
  else
    std::cout << inventory_report_table(r);
  if (!rc.out_dir.empty()) write_file(prepare_out_dir(rc.out_dir) / "inventory.json", text);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convert KiCad boards into printable PVA substrates with liquid-metal channels"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "dissolvpcb 1.0.0");
  RunConfig rc;

  auto add_format = [&](CLI::App* c) {
    c->add_option("--format", rc.format, "Report format")->check(CLI::IsMember({"json", "table"}));
  };
  auto add_config = [&](CLI::App* c) {
    c->add_option("--config", rc.config, "Process parameter overrides (JSON)");
  };

  auto* inspect = app.add_subcommand("inspect", "Summarize a board file");
  inspect->add_option("input", rc.input, "KiCad .kicad_pcb file")->required();
  inspect->add_option("--out", rc.out_dir, "Directory for inspect.json");
  add_format(inspect);

  auto* drc = app.add_subcommand("drc", "Check the board against the process rules");
  drc->add_option("input", rc.input, "KiCad .kicad_pcb file")->required();
  drc->add_option("--out", rc.out_dir, "Directory for drc_report.json");
  add_config(drc);
  add_format(drc);

  auto* synth = app.add_subcommand("synth", "Build the substrate solid and export STL");
  synth->add_option("input", rc.input, "KiCad .kicad_pcb file")->required();
  synth->add_option("--out", rc.out_dir, "Output directory")->required();
  add_config(synth);
  synth->add_option("--sockets", rc.sockets, "Socket library JSON (default: $DISSOLVPCB_SOCKETS or bundled)");
  synth->add_option("--mesh-pitch", rc.mesh_pitch, "Surface extraction grid pitch, mm");
  synth->add_option("--volume-pitch", rc.volume_pitch, "Volume integration grid pitch, mm");
  synth->add_option("--stl", rc.stl, "STL encoding")->check(CLI::IsMember({"ascii", "binary"}));
  synth->add_flag("--force", rc.force, "Synthesize even when DRC reports violations");
  add_format(synth);

  auto* estimate = app.add_subcommand("estimate", "Resistance, current and material estimates");
  estimate->add_option("input", rc.input, "KiCad .kicad_pcb file")->required();
  estimate->add_option("--out", rc.out_dir, "Directory for estimate.json");
  add_config(estimate);
  estimate->add_option("--sockets", rc.sockets, "Socket library JSON");
  estimate->add_option("--volume-pitch", rc.volume_pitch, "Volume integration grid pitch, mm");
  estimate->add_option("--current", rc.currents, "Net current assignment NET=AMPS (repeatable)");
  estimate->add_option("--preset", rc.preset, "Ga/In split: nominal (75.5/24.5) or inventory (75/25)");
  add_format(estimate);

  auto* inventory = app.add_subcommand("inventory", "Material and energy inventory comparison");
  inventory->add_option("--bundled", rc.bundled, "Record to report: dissolvpcb, dissolvpcb-recycling, fr4");
  inventory->add_option("--baseline", rc.baseline, "Baseline record (default fr4)");
  inventory->add_option("--factors", rc.factors, "Impact factor CSV (item,indicator,factor,unit)");
  inventory->add_option("--out", rc.out_dir, "Directory for inventory.json");
  add_format(inventory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kFailure;
  }

  try {
    if (*inspect) return cmd_inspect(rc);
    if (*drc) return cmd_drc(rc);
    if (*synth) return cmd_synth(rc);
    if (*estimate) return cmd_estimate(rc);
    if (*inventory) return cmd_inventory(rc);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}

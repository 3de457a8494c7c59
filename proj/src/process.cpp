#include "dissolv/process.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "dissolv/error.hpp"
#include "json.hpp"

namespace dissolv {

double nozzle_diameter(Nozzle n) { return n == Nozzle::Mm02 ? 0.2 : 0.4; }

namespace {

void floor_check(std::vector<ParamViolation>& out, const char* field, double value, double limit) {
  if (value < limit) {
    out.push_back({field, limit, value,
                   std::string(field) + " = " + std::to_string(value) + " is below the minimum " +
                       std::to_string(limit)});
  }
}

}  // namespace

std::vector<ParamViolation> validate_params(const ProcessParams& p) {
  std::vector<ParamViolation> out;
  const double trace_floor = p.nozzle == Nozzle::Mm02 ? limits::kTraceMin02 : limits::kTraceMin04;
  floor_check(out, "trace_width_min", p.trace_width_min, trace_floor);
  floor_check(out, "trace_height", p.trace_height, trace_floor);
  floor_check(out, "wall_xy_min", p.wall_xy_min, limits::kWallXyMin);
  floor_check(out, "insulation_z", p.insulation_z, limits::kInsulationZMin);
  floor_check(out, "via_diameter", p.via_diameter, limits::kViaDiameterMin);
  if (!(p.end_clearance > 0)) out.push_back({"end_clearance", 0.0, p.end_clearance, "end_clearance must be positive"});
  if (!(p.max_current > 0)) out.push_back({"max_current", 0.0, p.max_current, "max_current must be positive"});
  if (!(p.max_signal_freq > 0))
    out.push_back({"max_signal_freq", 0.0, p.max_signal_freq, "max_signal_freq must be positive"});
  return out;
}

double board_height(int layer_count, double insulation, double trace_height, double min_trace_height) {
  if (layer_count < 1)
    throw Error(ErrorCode::ParamBelowMinimum, "layer count " + std::to_string(layer_count) + " < 1");
  if (insulation < limits::kInsulationZMin)
    throw Error(ErrorCode::ParamBelowMinimum, "insulation " + std::to_string(insulation) + " mm < 0.18 mm");
  if (trace_height < min_trace_height)
    throw Error(ErrorCode::ParamBelowMinimum, "trace height " + std::to_string(trace_height) + " mm < " +
                                                  std::to_string(min_trace_height) + " mm");
  return (layer_count + 1) * insulation + layer_count * trace_height;
}

Stackup make_stackup(int layer_count, const ProcessParams& p) {
  const double h_min = p.nozzle == Nozzle::Mm02 ? limits::kTraceMin02 : limits::kTraceMin04;
  Stackup s;
  s.layer_count = layer_count;
  s.insulation = p.insulation_z;
  s.trace_height = p.trace_height;
  s.board_height = board_height(layer_count, p.insulation_z, p.trace_height, h_min);
  for (int k = 0; k < layer_count; ++k) {
    s.layers.push_back({(k + 1) * p.insulation_z + k * p.trace_height,
                        (k + 1) * p.insulation_z + (k + 1) * p.trace_height});
  }
  return s;
}

ProcessParams params_from_json(const std::string& text, ProcessParams base) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "process config must be a JSON object");

  ProcessParams p = base;
  std::optional<double> requested_pitch;
  for (const auto& [key, value] : j.items()) {
    if (key == "nozzle") {
      if (!value.is_number()) throw Error(ErrorCode::ConfigError, "nozzle must be 0.2 or 0.4");
      const double d = value.get<double>();
      if (d == 0.2) p.nozzle = Nozzle::Mm02;
      else if (d == 0.4) p.nozzle = Nozzle::Mm04;
      else throw Error(ErrorCode::ConfigError, "nozzle must be 0.2 or 0.4");
      continue;
    }
    if (key == "$schema" || key == "comment") continue;
    if (!value.is_number()) throw Error(ErrorCode::ConfigError, key + " must be a number");
    const double v = value.get<double>();
    if (key == "trace_width_min") p.trace_width_min = v;
    else if (key == "trace_height") p.trace_height = v;
    else if (key == "insulation_z") p.insulation_z = v;
    else if (key == "wall_xy_min") p.wall_xy_min = v;
    else if (key == "via_diameter") p.via_diameter = v;
    else if (key == "end_clearance") p.end_clearance = v;
    else if (key == "max_current") p.max_current = v;
    else if (key == "max_signal_freq") p.max_signal_freq = v;
    else if (key == "pad_pitch_min") requested_pitch = v;
    else {
      throw Error(ErrorCode::ConfigError, "unknown process parameter '" + key + "'");
    }
  }
  if (requested_pitch && std::abs(*requested_pitch - p.pad_pitch_min()) > 1e-9)
    throw Error(ErrorCode::ConfigError, "pad_pitch_min is derived (trace_width_min + wall_xy_min)");
  return p;
}

ProcessParams load_params(const std::filesystem::path& path, ProcessParams base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return params_from_json(buf.str(), base);
}

std::string params_to_json(const ProcessParams& p) {
  nlohmann::ordered_json j;
  j["trace_width_min"] = p.trace_width_min;
  j["trace_height"] = p.trace_height;
  j["insulation_z"] = p.insulation_z;
  j["wall_xy_min"] = p.wall_xy_min;
  j["via_diameter"] = p.via_diameter;
  j["pad_pitch_min"] = p.pad_pitch_min();
  j["end_clearance"] = p.end_clearance;
  j["nozzle"] = nozzle_diameter(p.nozzle);
  j["max_current"] = p.max_current;
  j["max_signal_freq"] = p.max_signal_freq;
  return j.dump(2);
}

}  // namespace dissolv

#include "dissolv/sockets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "dissolv/error.hpp"
#include "json.hpp"

namespace dissolv {

SocketLibrary::SocketLibrary(std::vector<SocketSpec> specs) : specs_(std::move(specs)) {
  std::sort(specs_.begin(), specs_.end(),
            [](const SocketSpec& a, const SocketSpec& b) { return a.package < b.package; });
}

const SocketSpec* SocketLibrary::match(std::string_view lib_id) const {
  const SocketSpec* best = nullptr;
  std::size_t best_len = 0;
  for (const SocketSpec& s : specs_) {
    for (const std::string& alias : s.aliases) {
      if (alias.size() > best_len && lib_id.find(alias) != std::string_view::npos) {
        best = &s;
        best_len = alias.size();
      }
    }
  }
  return best;
}

const SocketSpec* SocketLibrary::find(std::string_view package) const {
  for (const SocketSpec& s : specs_)
    if (s.package == package) return &s;
  return nullptr;
}

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

double positive(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number()) config_error(where + " must be a number");
  const double v = j.get<double>();
  if (!(v > 0)) config_error(where + " must be positive");
  return v;
}

SocketSpec parse_spec(const std::string& key, const nlohmann::json& j) {
  if (!j.is_object()) config_error("socket '" + key + "' must be an object");
  SocketSpec s;
  s.package = key;
  for (const auto& [field, value] : j.items()) {
    const std::string where = key + "." + field;
    if (field == "kind") {
      const std::string k = value.is_string() ? value.get<std::string>() : "";
      if (k == "two_terminal") s.kind = SocketKind::TwoTerminal;
      else if (k == "leaded_smd") s.kind = SocketKind::LeadedSmd;
      else if (k == "tht") s.kind = SocketKind::ThroughHole;
      else config_error(where + " must be two_terminal, leaded_smd or tht");
    } else if (field == "aliases") {
      if (!value.is_array()) config_error(where + " must be an array of strings");
      for (const auto& a : value) {
        if (!a.is_string() || a.get<std::string>().empty()) config_error(where + " must hold non-empty strings");
        s.aliases.push_back(a.get<std::string>());
      }
    } else if (field == "body") {
      if (!value.is_array() || value.size() != 3) config_error(where + " must be [l, w, h]");
      s.body = {positive(value[0], where), positive(value[1], where), positive(value[2], where)};
    } else if (field == "pins") {
      if (!value.is_number_integer() || value.get<int>() < 0) config_error(where + " must be a non-negative integer");
      s.pins = value.get<int>();
    } else if (field == "pitch") {
      s.pitch = positive(value, where);
    } else if (field == "end_clearance") {
      s.end_clearance = positive(value, where);
    } else if (field == "recess_depth") {
      s.recess_depth = positive(value, where);
    } else if (field == "pin_diameter") {
      s.pin_diameter = positive(value, where);
    } else if (field == "insertion_side_only") {
      if (!value.is_boolean()) config_error(where + " must be a boolean");
      s.insertion_side_only = value.get<bool>();
    } else if (field != "comment") {
      config_error("unknown socket field '" + where + "'");
    }
  }
  if (!(s.body.l > 0)) config_error(key + ".body is required");
  if (s.aliases.empty()) s.aliases.push_back(key);
  return s;
}

}  // namespace

SocketLibrary socket_library_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    config_error(std::string("socket library: ") + e.what());
  }
  if (!j.is_object() || !j.contains("packages") || !j["packages"].is_object())
    config_error("socket library needs a \"packages\" object");
  std::vector<SocketSpec> specs;
  for (const auto& [key, value] : j["packages"].items()) specs.push_back(parse_spec(key, value));
  return SocketLibrary(std::move(specs));
}

SocketLibrary load_socket_library(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return socket_library_from_json(buf.str());
}

std::filesystem::path default_socket_library_path() {
  return std::filesystem::path(DISSOLV_DATA_DIR) / "sockets.json";
}

namespace {

// Cuboid cavity between z0 and z1 (board frame, before side mirroring).
geom::Solid slab(Vec2 c, double l, double w, double yaw, double z0, double z1) {
  return geom::box({c.x, c.y, 0.5 * (z0 + z1)}, {0.5 * l, 0.5 * w, 0.5 * (z1 - z0)}, yaw);
}

std::size_t distinct(const std::vector<double>& v) {
  std::set<long long> keys;
  for (double d : v) keys.insert(std::llround(d * 1000.0));
  return keys.size();
}

}  // namespace

std::vector<geom::Solid> socket_solids(const FootprintInst& fp, const SocketLibrary& lib, const Stackup& stackup,
                                       const ProcessParams& params) {
  const SocketSpec* spec = lib.match(fp.lib_id);
  if (!spec) throw Error(ErrorCode::UnknownPackage, "no socket for '" + fp.lib_id + "' (" + fp.reference + ")");
  if (spec->pins != 0 && static_cast<int>(fp.pads.size()) != spec->pins) {
    throw Error(ErrorCode::PinCountMismatch, fp.reference + " has " + std::to_string(fp.pads.size()) +
                                                 " pads but " + spec->package + " expects " +
                                                 std::to_string(spec->pins));
  }

  const double H = stackup.board_height;
  const double t = stackup.insulation;
  const bool top = fp.side == Side::Top;
  // Depth d below the insertion face, expressed as a z interval.
  auto from_face = [&](double depth) -> std::pair<double, double> {
    depth = std::min(depth, H - t);
    return top ? std::pair{H - depth, H} : std::pair{0.0, depth};
  };

  std::vector<geom::Solid> out;
  switch (spec->kind) {
    case SocketKind::TwoTerminal: {
      const double ec = spec->end_clearance.value_or(params.end_clearance);
      const auto [z0, z1] = from_face(spec->body.h);
      out.push_back(slab(fp.at, spec->body.l + 2 * ec, spec->body.w, fp.rot_deg, z0, z1));
      break;
    }
    case SocketKind::LeadedSmd: {
      // The body's long side follows the pin rows.
      std::vector<double> xs, ys;
      for (const PadDef& p : fp.pads) {
        xs.push_back(p.at_rel.x);
        ys.push_back(p.at_rel.y);
      }
      const bool rows_along_y = distinct(xs) <= distinct(ys);
      const double bl = rows_along_y ? spec->body.w : spec->body.l;
      const double bw = rows_along_y ? spec->body.l : spec->body.w;
      const auto [rz0, rz1] = from_face(spec->recess_depth);
      out.push_back(slab(fp.at, bl, bw, fp.rot_deg, rz0, rz1));
      const auto [pz0, pz1] = from_face(t);
      for (const PadDef& p : fp.pads)
        out.push_back(slab(pad_center(fp, p), p.size.x, p.size.y, pad_rotation(fp, p), pz0, pz1));
      break;
    }
    case SocketKind::ThroughHole: {
      const auto [z0, z1] = from_face(H - t);
      for (const PadDef& p : fp.pads) {
        const double d = std::max(spec->pin_diameter, p.drill);
        const Vec2 c = pad_center(fp, p);
        out.push_back(geom::cylinder({c.x, c.y, z0}, 0.5 * d, z1 - z0));
      }
      break;
    }
  }
  return out;
}

}  // namespace dissolv

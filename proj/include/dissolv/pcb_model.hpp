#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dissolv/sexpr.hpp"
#include "dissolv/vec.hpp"

namespace dissolv {

using NetId = int;

/// Copper layers are indexed bottom-up: B.Cu is 0, F.Cu is count-1.
using LayerIndex = int;

struct TraceSegment {
  Vec2 start;
  Vec2 end;
  double width = 0.0;
  LayerIndex layer = 0;
  NetId net = 0;

  double length() const { return distance(start, end); }
};

struct ViaDef {
  Vec2 at;
  double diameter = 0.0;
  LayerIndex layer_from = 0;
  LayerIndex layer_to = 0;
  NetId net = 0;
};

enum class PadKind { Smd, ThruHole };
enum class Side { Top, Bottom };

struct PadDef {
  std::string number;
  Vec2 at_rel;         // footprint frame, Y up
  double rot_deg = 0;  // relative to the footprint
  Vec2 size;           // (w, h)
  PadKind kind = PadKind::Smd;
  double drill = 0.0;  // ThruHole only
  std::optional<NetId> net;
};

struct FootprintInst {
  std::string lib_id;
  std::string reference;
  Vec2 at;
  double rot_deg = 0;  // [0, 360), counter-clockwise in model space
  Side side = Side::Top;
  std::vector<PadDef> pads;
  int source_line = 0;
};

/// Absolute pad centre and orientation in model space.
Vec2 pad_center(const FootprintInst& fp, const PadDef& pad);
double pad_rotation(const FootprintInst& fp, const PadDef& pad);

struct OutlineLine {
  Vec2 start;
  Vec2 end;
  friend bool operator==(const OutlineLine&, const OutlineLine&) = default;
};

struct OutlineArc {
  Vec2 start;
  Vec2 mid;
  Vec2 end;
  friend bool operator==(const OutlineArc&, const OutlineArc&) = default;
};

using OutlineElem = std::variant<OutlineLine, OutlineArc>;

Vec2 start_of(const OutlineElem& e);
Vec2 end_of(const OutlineElem& e);
OutlineElem reversed(const OutlineElem& e);

struct Warning {
  std::string message;
  int line = 0;
};

struct PcbDesign {
  std::map<NetId, std::string> nets;
  std::vector<TraceSegment> segments;
  std::vector<ViaDef> vias;
  std::vector<FootprintInst> footprints;
  std::vector<OutlineElem> outline;
  int copper_layer_count = 1;
  std::vector<std::string> layer_names;  // indexed by LayerIndex
  std::optional<long long> version;
  std::vector<Warning> warnings;

  std::string net_name(NetId id) const;
  std::optional<NetId> find_net(std::string_view name) const;
};

/// File-format versions the fixture suite was written against
/// (KiCad 6, 7 and 8).
inline constexpr long long kKnownVersions[] = {20211014, 20221018, 20240108};

PcbDesign extract_design(const sexpr::Node& root);

/// Reads, parses and extracts a .kicad_pcb file.
PcbDesign load_design(const std::filesystem::path& path);

/// Chains outline elements into one closed counter-clockwise loop.
std::vector<OutlineElem> sort_outline(std::vector<OutlineElem> elems, double tol = 1e-3);

struct Circle {
  Vec2 center;
  double radius = 0.0;
};

/// Circle through three points; throws CollinearPoints.
Circle circumcircle(Vec2 a, Vec2 b, Vec2 c);

/// Points from arc.start to arc.end (inclusive) along the circle through
/// the three arc points, with chord deviation <= chord_tol.
std::vector<Vec2> arc_to_polyline(const OutlineArc& arc, double chord_tol = 0.01);

/// Flattens a sorted loop into a polygon (first point not repeated).
std::vector<Vec2> loop_polygon(const std::vector<OutlineElem>& loop, double chord_tol = 0.01);

double signed_area(const std::vector<Vec2>& polygon);

}  // namespace dissolv

#include "dissolv/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "dissolv/drc.hpp"
#include "dissolv/error.hpp"

namespace dissolv {

namespace {

// Bearing in degrees; exact for axis-aligned segments.
double bearing_deg(Vec2 d) {
  if (d.y == 0.0) return d.x >= 0 ? 0.0 : 180.0;
  if (d.x == 0.0) return d.y > 0 ? 90.0 : 270.0;
  return std::atan2(d.y, d.x) * 180.0 / kPi;
}

void check_layer(int layer, const Stackup& s, const std::string& what) {
  if (layer < 0 || layer >= s.layer_count)
    throw Error(ErrorCode::LayerOutOfRange, what + " on layer " + std::to_string(layer) + " of a " +
                                                std::to_string(s.layer_count) + "-layer stackup");
}

}  // namespace

geom::Solid trace_solid(const TraceSegment& seg, const Stackup& stackup, const ProcessParams&) {
  check_layer(seg.layer, stackup, "segment");
  const ZRange& z = stackup.layer(seg.layer);
  const double r = 0.5 * seg.width;
  std::vector<geom::Solid> parts;
  const Vec2 d = seg.end - seg.start;
  const double len = norm(d);
  if (len > 0) {
    const Vec2 mid = (seg.start + seg.end) * 0.5;
    parts.push_back(geom::box({mid.x, mid.y, 0.5 * (z.z0 + z.z1)}, {0.5 * len, r, 0.5 * z.extent()}, bearing_deg(d)));
  }
  parts.push_back(geom::cylinder({seg.start.x, seg.start.y, z.z0}, r, z.extent()));
  if (len > 0) parts.push_back(geom::cylinder({seg.end.x, seg.end.y, z.z0}, r, z.extent()));
  return geom::unite(std::move(parts));
}

geom::Solid via_solid(const ViaDef& via, const Stackup& stackup, double min_diameter) {
  if (via.diameter < min_diameter - 1e-9) {
    throw Error(ErrorCode::DiameterBelowMinimum, "via diameter " + std::to_string(via.diameter) + " mm < " +
                                                     std::to_string(min_diameter) + " mm");
  }
  const int lo = std::min(via.layer_from, via.layer_to), hi = std::max(via.layer_from, via.layer_to);
  check_layer(lo, stackup, "via");
  check_layer(hi, stackup, "via");
  if (lo == hi) throw Error(ErrorCode::LayerOutOfRange, "via must span two different layers");
  const double z0 = stackup.layer(lo).z0, z1 = stackup.layer(hi).z1;
  return geom::cylinder({via.at.x, via.at.y, z0}, 0.5 * via.diameter, z1 - z0);
}

geom::Solid pad_solid(const PadDef& pad, const FootprintInst& owner, const Stackup& stackup, const ProcessParams&,
                      const std::vector<Vec2>* board) {
  const Vec2 c = pad_center(owner, pad);
  if (board && !board->empty() && !point_in_polygon(c, *board)) {
    throw Error(ErrorCode::PadOutsideBoard,
                owner.reference + "." + pad.number + " lies outside the board outline", owner.source_line);
  }
  if (pad.kind == PadKind::ThruHole || !pad.net) return {};
  const double H = stackup.board_height, t = stackup.insulation;
  const double z0 = owner.side == Side::Top ? H - t : 0.0;
  return geom::box({c.x, c.y, z0 + 0.5 * t}, {0.5 * pad.size.x, 0.5 * pad.size.y, 0.5 * t},
                   pad_rotation(owner, pad));
}

geom::Solid body_solid(const std::vector<OutlineElem>& loop, const Stackup& stackup) {
  return geom::extrusion(loop_polygon(loop, 0.01), 0.0, stackup.board_height);
}

double ChannelSet::total_volume() const {
  double v = 0;
  for (const auto& n : nets)
    if (n.volume) v += n.volume->volume;
  return v;
}

double ChannelSet::total_error_bound() const {
  double v = 0;
  for (const auto& n : nets)
    if (n.volume) v += n.volume->error_bound;
  return v;
}

const NetChannels* ChannelSet::find(NetId id) const {
  for (const auto& n : nets)
    if (n.net == id) return &n;
  return nullptr;
}

Assembly assemble(const PcbDesign& design, const ProcessParams& params, const SocketLibrary& lib,
                  const SynthOptions& options) {
  Assembly out;
  const auto drc = run_drc(design, params);
  out.drc_violations = drc.size();
  if (!drc.empty() && !options.force) {
    throw Error(ErrorCode::DrcNotClean, std::to_string(drc.size()) + " design-rule violation(s); use --force to override");
  }

  out.stackup = make_stackup(design.copper_layer_count, params);
  const Stackup& st = out.stackup;
  const auto loop = sort_outline(design.outline);
  const auto polygon = loop_polygon(loop, 0.01);
  out.body = body_solid(loop, st);

  // Forced runs keep undersized vias at their drawn size.
  const double via_min = options.force ? 0.0 : limits::kViaDiameterMin;

  std::map<NetId, NetChannels> nets;
  auto net_entry = [&](NetId id) -> NetChannels& {
    auto& n = nets[id];
    n.net = id;
    n.name = design.net_name(id);
    return n;
  };
  for (const auto& seg : design.segments)
    if (seg.net != 0) net_entry(seg.net).traces.push_back(trace_solid(seg, st, params));
  for (const auto& via : design.vias)
    if (via.net != 0) net_entry(via.net).vias.push_back(via_solid(via, st, via_min));

  std::vector<geom::Solid> cavities;
  std::map<NetId, std::vector<geom::Solid>> pad_outlets;
  for (const auto& fp : design.footprints) {
    for (const auto& pad : fp.pads) {
      geom::Solid p = pad_solid(pad, fp, st, params, &polygon);
      if (!p.is_empty() && nets.count(*pad.net)) net_entry(*pad.net).pads.push_back(p);
    }
    if (!fp.pads.empty()) {
      for (auto& c : socket_solids(fp, lib, st, params)) cavities.push_back(std::move(c));
    }
  }

  std::vector<geom::Solid> all_channels;
  for (auto& [id, n] : nets) {
    std::vector<geom::Solid> copper = n.traces;
    copper.insert(copper.end(), n.vias.begin(), n.vias.end());
    const geom::Solid conductors = geom::unite(copper);

    for (const auto& p : n.pads)
      if (geom::touches(p, conductors)) ++n.outlet_count;
    for (const auto& c : cavities)
      if (geom::touches(c, conductors)) ++n.outlet_count;
    if (n.outlet_count == 0) {
      out.warnings.push_back({"NetWithoutOutlet",
                              "net '" + n.name + "' has channels but no opening to the board surface", id});
    }

    copper.insert(copper.end(), n.pads.begin(), n.pads.end());
    n.channel = geom::unite(std::move(copper));
    all_channels.push_back(n.channel);
    if (options.volume_pitch > 0) n.volume = geom::volume(n.channel, options.volume_pitch);
    out.channel_set.nets.push_back(n);
  }

  out.channels = geom::unite(std::move(all_channels));
  out.cavities = geom::unite(std::move(cavities));
  out.board = geom::subtract(out.body, {out.channels, out.cavities});
  return out;
}

}  // namespace dissolv

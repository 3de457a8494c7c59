#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dissolv/geom.hpp"
#include "dissolv/pcb_model.hpp"
#include "dissolv/process.hpp"
#include "dissolv/sockets.hpp"

namespace dissolv {

/// Box along the segment plus a cylindrical joint at each end, occupying
/// the segment's trace layer. Throws LayerOutOfRange.
geom::Solid trace_solid(const TraceSegment& seg, const Stackup& stackup, const ProcessParams& params);

/// Vertical cylinder from the bottom of layer_from to the top of layer_to.
/// Throws DiameterBelowMinimum when diameter < min_diameter.
geom::Solid via_solid(const ViaDef& via, const Stackup& stackup,
                      double min_diameter = limits::kViaDiameterMin);

/// Thin cuboid joining the outer trace layer to the board face on the
/// component's side. Through-hole pads and pads without a net give the
/// empty solid. When `board` is given, a pad centre outside it throws
/// PadOutsideBoard.
geom::Solid pad_solid(const PadDef& pad, const FootprintInst& owner, const Stackup& stackup,
                      const ProcessParams& params, const std::vector<Vec2>* board = nullptr);

/// Prism of the outline (arcs tessellated to 0.01 mm) from 0 to the board
/// height. Accepts any closed loop orientation.
geom::Solid body_solid(const std::vector<OutlineElem>& loop, const Stackup& stackup);

struct NetChannels {
  NetId net = 0;
  std::string name;
  std::vector<geom::Solid> traces;
  std::vector<geom::Solid> vias;
  std::vector<geom::Solid> pads;
  geom::Solid channel;  // union of the above
  std::optional<geom::VolumeEstimate> volume;
  int outlet_count = 0;
};

struct ChannelSet {
  std::vector<NetChannels> nets;  // ascending net id, copper nets only

  double total_volume() const;
  double total_error_bound() const;
  const NetChannels* find(NetId id) const;
};

struct SynthWarning {
  std::string code;  // e.g. "NetWithoutOutlet"
  std::string message;
  std::optional<NetId> net;
};

struct SynthOptions {
  double volume_pitch = 0.05;  // mm; <= 0 skips per-net volume integration
  bool force = false;          // synthesize despite DRC violations
};

struct Assembly {
  Stackup stackup;
  geom::Solid body;      // plain prism
  geom::Solid board;     // body minus channels and cavities
  geom::Solid channels;  // union over all nets
  geom::Solid cavities;  // union of socket cavities
  ChannelSet channel_set;
  std::vector<SynthWarning> warnings;
  std::size_t drc_violations = 0;
};

/// Builds the printable solid. Throws DrcNotClean unless options.force.
Assembly assemble(const PcbDesign& design, const ProcessParams& params, const SocketLibrary& lib,
                  const SynthOptions& options = {});

}  // namespace dissolv

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dissolv/geom.hpp"
#include "dissolv/pcb_model.hpp"
#include "dissolv/process.hpp"
#include "dissolv/synth.hpp"

namespace dissolv {

/// Weight split of the gallium-indium alloy.
struct GaInSplit {
  double ga = 0.755;
  double in = 0.245;
};

/// Composition quoted for the alloy recipe.
inline constexpr GaInSplit kGaInNominal{0.755, 0.245};
/// Split implied by the reported inventory masses (0.651 g / 0.217 g).
inline constexpr GaInSplit kGaInInventory{0.75, 0.25};

struct MaterialConstants {
  double resistivity_egain = 29.0;  // uOhm*cm
  double resistivity_cu = 1.68;     // uOhm*cm, annealed copper
  double density_egain = 6.25;      // g/cm^3
  double density_pva = 1.19;        // g/cm^3
  GaInSplit split = kGaInNominal;
  double fill_factor = 1.0;  // printed PVA infill fraction
};

/// Measured resistance of a 30 mm, 0.7 x 0.7 mm channel, reported next to
/// the nominal formula value and never applied as a correction.
inline constexpr double kMeasuredChannelResistance = 0.03;  // Ohm

/// R = rho * L / A. Lengths in mm, resistivity in uOhm*cm.
double trace_resistance(double length, double width, double height, double resistivity);

/// Cylindrical conductor of the given length and diameter (mm).
double via_resistance(double span, double diameter, double resistivity);

struct GraphNode {
  Vec2 at;
  int layer = 0;      // -1 for through-hole pads spanning every layer
  std::string label;  // pad name ("R1.2") when a pad is attached
};

struct GraphEdge {
  int a = 0;
  int b = 0;
  double resistance = 0.0;
  std::string source;  // "segment#3", "via#0"
};

struct NetGraph {
  NetId net = 0;
  std::string name;
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;
  std::vector<int> component;  // per node
  int component_count = 0;
  std::vector<int> terminals;  // nodes carrying pads, in footprint order

  bool connected() const { return component_count <= 1; }
  std::optional<int> find_label(std::string_view label) const;
};

/// One graph per copper net (net id != 0). Segment endpoints, vias and pad
/// centres on the same layer merge within 1e-3 mm; pads also absorb nodes
/// inside their copper rectangle.
std::map<NetId, NetGraph> build_net_graph(const PcbDesign& design, const ProcessParams& params,
                                          const MaterialConstants& constants);

/// Two-point resistance by nodal analysis. Throws Disconnected or
/// SingularSystem.
double net_resistance(const NetGraph& g, int a, int b);

struct EdgeDissipation {
  std::string source;
  double resistance = 0.0;
  double watts = 0.0;
};

struct NetCurrent {
  NetId net = 0;
  std::string name;
  double current = 0.0;
  bool over_limit = false;
  std::vector<EdgeDissipation> edges;
  double total_watts = 0.0;
};

struct CurrentReport {
  double limit = 0.0;
  std::vector<NetCurrent> nets;
  std::vector<std::string> warnings;
};

/// Flags nets whose current exceeds params.max_current. Dissipation assumes
/// the full net current through every edge. Throws UnknownNet.
CurrentReport current_check(const PcbDesign& design, const std::map<NetId, NetGraph>& graphs,
                            const std::map<std::string, double>& net_currents, const ProcessParams& params);

struct MaterialReport {
  double channel_volume = 0.0;  // mm^3
  double channel_error = 0.0;
  double egain_g = 0.0;
  double ga_g = 0.0;
  double in_g = 0.0;
  double board_volume = 0.0;  // mm^3 of printed PVA
  double board_error = 0.0;
  double pva_g = 0.0;
  double pitch = 0.0;
};

/// Splits a mass so that ga + in == mass exactly.
std::pair<double, double> split_egain(double mass, GaInSplit split);

/// Channel volumes come from the ChannelSet (integrated at synthesis); the
/// board volume is integrated here at `pitch`.
MaterialReport material_estimate(const ChannelSet& channels, const geom::Solid& board,
                                 const MaterialConstants& constants, double pitch);

}  // namespace dissolv

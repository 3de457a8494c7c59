#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace dissolv {

enum class Nozzle { Mm02, Mm04 };

double nozzle_diameter(Nozzle n);

/// Fabrication constants for printed PVA substrates with liquid-metal
/// channels. Defaults are the 0.2 mm nozzle process; insulation_z follows
/// the 2.3 mm sample board (0.3 mm) rather than the 0.18 mm floor.
struct ProcessParams {
  double trace_width_min = 0.7;  // mm
  double trace_height = 0.7;     // mm
  double insulation_z = 0.3;     // mm
  double wall_xy_min = 0.15;     // mm
  double via_diameter = 1.2;     // mm
  double end_clearance = 0.2;    // mm, two-terminal sockets
  Nozzle nozzle = Nozzle::Mm02;
  double max_current = 5.0;          // A
  double max_signal_freq = 10.0e6;   // Hz, report metadata only

  /// Narrowest pin pitch the channel + wall minima allow.
  double pad_pitch_min() const { return trace_width_min + wall_xy_min; }
};

/// Hard floors from the characterization experiments.
namespace limits {
inline constexpr double kTraceMin02 = 0.7;
inline constexpr double kTraceMin04 = 0.9;
inline constexpr double kWallXyMin = 0.15;
inline constexpr double kInsulationZMin = 0.18;
inline constexpr double kViaDiameterMin = 1.2;
}  // namespace limits

struct ParamViolation {
  std::string field;
  double limit = 0.0;
  double value = 0.0;
  std::string message;
};

std::vector<ParamViolation> validate_params(const ProcessParams& p);

/// Total substrate height (L+1)t + Lh. Throws ParamBelowMinimum when
/// L < 1, t < 0.18 or h < min_trace_height.
double board_height(int layer_count, double insulation, double trace_height,
                    double min_trace_height = limits::kTraceMin02);

struct ZRange {
  double z0 = 0.0;
  double z1 = 0.0;
  double extent() const { return z1 - z0; }
};

/// Vertical layout: insulation slab, trace layer, insulation slab, ...
struct Stackup {
  int layer_count = 1;
  double insulation = 0.3;
  double trace_height = 0.7;
  double board_height = 1.3;
  std::vector<ZRange> layers;  // bottom-up

  const ZRange& layer(int index) const { return layers.at(static_cast<std::size_t>(index)); }
};

Stackup make_stackup(int layer_count, const ProcessParams& p);

/// JSON overrides; keys are the ProcessParams field names. Unknown keys
/// and non-numeric values raise ConfigError.
ProcessParams params_from_json(const std::string& text, ProcessParams base = {});
ProcessParams load_params(const std::filesystem::path& path, ProcessParams base = {});
std::string params_to_json(const ProcessParams& p);

}  // namespace dissolv

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dissolv/pcb_model.hpp"
#include "dissolv/process.hpp"

namespace dissolv {

enum class DrcRule { TraceWidth, TraceClearance, EdgeClearance, PadPitch, ViaDiameter };

std::string_view to_string(DrcRule rule);

struct DrcViolation {
  DrcRule rule = DrcRule::TraceWidth;
  Vec2 location;
  double measured = 0.0;  // mm, always < limit
  double limit = 0.0;     // mm
  std::vector<std::string> subjects;

  friend bool operator==(const DrcViolation&, const DrcViolation&) = default;
};

/// Limits are compared with this slack so that designs drawn exactly at a
/// limit are not failed by decimal-to-binary rounding.
inline constexpr double kDrcTolerance = 1e-9;

/// Minimum Euclidean distance between two closed segments.
double segment_distance(Vec2 a_start, Vec2 a_end, Vec2 b_start, Vec2 b_end);

struct ClosestPair {
  double distance = 0.0;
  Vec2 on_a;
  Vec2 on_b;
};
ClosestPair closest_points(Vec2 a_start, Vec2 a_end, Vec2 b_start, Vec2 b_end);

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);
bool point_in_polygon(Vec2 p, const std::vector<Vec2>& polygon);

/// Checks a design against the process rules. Clearances are measured on
/// capsule silhouettes (centre-line distance minus half widths); via
/// barrels use the same wall rule as traces. Output is sorted by
/// (rule, subjects) and independent of input order.
std::vector<DrcViolation> run_drc(const PcbDesign& design, const ProcessParams& params);

std::string drc_report_json(const std::vector<DrcViolation>& violations, const ProcessParams& params);
std::string drc_report_table(const std::vector<DrcViolation>& violations);

}  // namespace dissolv

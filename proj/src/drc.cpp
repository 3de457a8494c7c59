#include "dissolv/drc.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <limits>
#include <tuple>

#include "json.hpp"

namespace dissolv {

std::string_view to_string(DrcRule rule) {
  switch (rule) {
    case DrcRule::TraceWidth: return "TraceWidth";
    case DrcRule::TraceClearance: return "TraceClearance";
    case DrcRule::EdgeClearance: return "EdgeClearance";
    case DrcRule::PadPitch: return "PadPitch";
    case DrcRule::ViaDiameter: return "ViaDiameter";
  }
  return "?";
}

namespace {

Vec2 closest_on_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return a;
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return a + ab * t;
}

int orientation(Vec2 a, Vec2 b, Vec2 c) {
  const double v = cross(b - a, c - a);
  return (v > 0) - (v < 0);
}

bool within_box(Vec2 p, Vec2 a, Vec2 b) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) {
  const int o1 = orientation(a0, a1, b0), o2 = orientation(a0, a1, b1);
  const int o3 = orientation(b0, b1, a0), o4 = orientation(b0, b1, a1);
  if (o1 != o2 && o3 != o4) return true;
  return (o1 == 0 && within_box(b0, a0, a1)) || (o2 == 0 && within_box(b1, a0, a1)) ||
         (o3 == 0 && within_box(a0, b0, b1)) || (o4 == 0 && within_box(a1, b0, b1));
}

}  // namespace

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) { return distance(p, closest_on_segment(p, a, b)); }

ClosestPair closest_points(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) {
  if (segments_intersect(a0, a1, b0, b1)) {
    const Vec2 da = a1 - a0, db = b1 - b0;
    const double denom = cross(da, db);
    Vec2 hit = a0;
    if (denom != 0.0) {
      hit = a0 + da * (cross(b0 - a0, db) / denom);
    } else {
      // Collinear overlap: report the first shared endpoint.
      if (within_box(a0, b0, b1)) hit = a0;
      else if (within_box(a1, b0, b1)) hit = a1;
      else hit = within_box(b0, a0, a1) ? b0 : b1;
    }
    return {0.0, hit, hit};
  }
  std::array<ClosestPair, 4> c{{
      {0, a0, closest_on_segment(a0, b0, b1)},
      {0, a1, closest_on_segment(a1, b0, b1)},
      {0, closest_on_segment(b0, a0, a1), b0},
      {0, closest_on_segment(b1, a0, a1), b1},
  }};
  for (auto& p : c) p.distance = distance(p.on_a, p.on_b);
  return *std::ranges::min_element(c, {}, &ClosestPair::distance);
}

double segment_distance(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) { return closest_points(a0, a1, b0, b1).distance; }

bool point_in_polygon(Vec2 p, const std::vector<Vec2>& poly) {
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Vec2 a = poly[j], b = poly[i];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

namespace {

std::string fmt_pt(Vec2 p) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "(%.4f,%.4f)", p.x + 0.0, p.y + 0.0);
  return buf;
}

std::string segment_id(const PcbDesign& d, const TraceSegment& s) {
  Vec2 a = s.start, b = s.end;
  if (std::tie(b.x, b.y) < std::tie(a.x, a.y)) std::swap(a, b);
  return "segment[" + d.layer_names.at(s.layer) + "]" + fmt_pt(a) + "-" + fmt_pt(b);
}

std::string via_id(const ViaDef& v) { return "via" + fmt_pt(v.at); }

std::string pad_id(const FootprintInst& fp, const PadDef& pad) {
  std::string owner = fp.reference.empty() ? fp.lib_id : fp.reference;
  return "pad " + owner + "." + pad.number + "@" + fmt_pt(pad_center(fp, pad));
}

std::array<Vec2, 4> pad_corners(const FootprintInst& fp, const PadDef& pad) {
  const Vec2 c = pad_center(fp, pad);
  const double rot = pad_rotation(fp, pad);
  const double hx = pad.size.x / 2, hy = pad.size.y / 2;
  return {c + rotate({-hx, -hy}, rot), c + rotate({hx, -hy}, rot), c + rotate({hx, hy}, rot),
          c + rotate({-hx, hy}, rot)};
}

ClosestPair quad_distance(const std::array<Vec2, 4>& a, const std::array<Vec2, 4>& b) {
  std::vector<Vec2> pa(a.begin(), a.end()), pb(b.begin(), b.end());
  for (Vec2 p : a)
    if (point_in_polygon(p, pb)) return {0.0, p, p};
  for (Vec2 p : b)
    if (point_in_polygon(p, pa)) return {0.0, p, p};
  ClosestPair best{std::numeric_limits<double>::infinity(), {}, {}};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      auto c = closest_points(a[i], a[(i + 1) % 4], b[j], b[(j + 1) % 4]);
      if (c.distance < best.distance) best = c;
    }
  return best;
}

struct Collector {
  std::vector<DrcViolation> out;

  void add(DrcRule rule, Vec2 where, double measured, double limit, std::vector<std::string> subjects) {
    if (!(measured < limit - kDrcTolerance)) return;
    std::ranges::sort(subjects);
    out.push_back({rule, where, measured, limit, std::move(subjects)});
  }
};

// Pairs are always evaluated in subject order so that the reported location
// does not depend on which element came first in the file.
template <class F>
void ordered_pair(const std::string& ida, const std::string& idb, F&& f) {
  if (idb < ida) f(true);
  else f(false);
}

}  // namespace

std::vector<DrcViolation> run_drc(const PcbDesign& design, const ProcessParams& params) {
  Collector c;
  const double wall = params.wall_xy_min;

  std::vector<std::string> seg_ids;
  for (const auto& s : design.segments) seg_ids.push_back(segment_id(design, s));
  std::vector<std::string> via_ids;
  for (const auto& v : design.vias) via_ids.push_back(via_id(v));

  for (std::size_t i = 0; i < design.segments.size(); ++i) {
    const auto& s = design.segments[i];
    c.add(DrcRule::TraceWidth, (s.start + s.end) * 0.5, s.width, params.trace_width_min, {seg_ids[i]});
  }
  for (std::size_t i = 0; i < design.vias.size(); ++i) {
    const auto& v = design.vias[i];
    c.add(DrcRule::ViaDiameter, v.at, v.diameter, params.via_diameter, {via_ids[i]});
  }

  // Segment / segment
  for (std::size_t i = 0; i < design.segments.size(); ++i) {
    for (std::size_t j = i + 1; j < design.segments.size(); ++j) {
      const auto& a = design.segments[i];
      const auto& b = design.segments[j];
      if (a.layer != b.layer || a.net == b.net) continue;
      ordered_pair(seg_ids[i], seg_ids[j], [&](bool swap) {
        const auto& p = swap ? b : a;
        const auto& q = swap ? a : b;
        auto cp = closest_points(p.start, p.end, q.start, q.end);
        c.add(DrcRule::TraceClearance, (cp.on_a + cp.on_b) * 0.5, cp.distance - (p.width + q.width) / 2, wall,
              {seg_ids[i], seg_ids[j]});
      });
    }
  }

  // Via barrel / segment and via / via
  for (std::size_t i = 0; i < design.vias.size(); ++i) {
    const auto& v = design.vias[i];
    for (std::size_t j = 0; j < design.segments.size(); ++j) {
      const auto& s = design.segments[j];
      if (s.net == v.net || s.layer < v.layer_from || s.layer > v.layer_to) continue;
      const Vec2 q = closest_on_segment(v.at, s.start, s.end);
      c.add(DrcRule::TraceClearance, (q + v.at) * 0.5, distance(q, v.at) - (v.diameter + s.width) / 2, wall,
            {via_ids[i], seg_ids[j]});
    }
    for (std::size_t j = i + 1; j < design.vias.size(); ++j) {
      const auto& w = design.vias[j];
      if (w.net == v.net || w.layer_to < v.layer_from || w.layer_from > v.layer_to) continue;
      c.add(DrcRule::TraceClearance, (v.at + w.at) * 0.5, distance(v.at, w.at) - (v.diameter + w.diameter) / 2,
            wall, {via_ids[i], via_ids[j]});
    }
  }

  // Edge clearance
  if (!design.outline.empty()) {
    const auto poly = loop_polygon(sort_outline(design.outline), 0.01);
    auto edge_check = [&](Vec2 a, Vec2 b, double half_width, const std::string& id) {
      ClosestPair best{std::numeric_limits<double>::infinity(), {}, {}};
      for (std::size_t k = 0; k < poly.size(); ++k) {
        auto cp = closest_points(a, b, poly[k], poly[(k + 1) % poly.size()]);
        if (cp.distance < best.distance) best = cp;
      }
      double measured = best.distance - half_width;
      if (!point_in_polygon((a + b) * 0.5, poly)) measured = -(best.distance + half_width);
      c.add(DrcRule::EdgeClearance, best.on_b, measured, wall, {id});
    };
    for (std::size_t i = 0; i < design.segments.size(); ++i) {
      const auto& s = design.segments[i];
      edge_check(s.start, s.end, s.width / 2, seg_ids[i]);
    }
    for (std::size_t i = 0; i < design.vias.size(); ++i)
      edge_check(design.vias[i].at, design.vias[i].at, design.vias[i].diameter / 2, via_ids[i]);
  }

  // Pad pitch inside each footprint
  for (const auto& fp : design.footprints) {
    for (std::size_t i = 0; i < fp.pads.size(); ++i) {
      for (std::size_t j = i + 1; j < fp.pads.size(); ++j) {
        const auto& a = fp.pads[i];
        const auto& b = fp.pads[j];
        if (!a.net || !b.net || *a.net == *b.net) continue;
        const auto ida = pad_id(fp, a), idb = pad_id(fp, b);
        ordered_pair(ida, idb, [&](bool swap) {
          auto cp = quad_distance(pad_corners(fp, swap ? b : a), pad_corners(fp, swap ? a : b));
          c.add(DrcRule::PadPitch, (cp.on_a + cp.on_b) * 0.5, cp.distance, wall, {ida, idb});
        });
      }
    }
  }

  std::ranges::sort(c.out, [](const DrcViolation& x, const DrcViolation& y) {
    return std::tie(x.rule, x.subjects, x.measured) < std::tie(y.rule, y.subjects, y.measured);
  });
  return c.out;
}

std::string drc_report_json(const std::vector<DrcViolation>& violations, const ProcessParams& params) {
  nlohmann::ordered_json j;
  j["assumptions"] = {
      "via barrels use the wall_xy_min clearance rule",
      "Z insulation is guaranteed by the stackup and checked through the process parameters only",
  };
  j["limits"] = {{"trace_width_min", params.trace_width_min},
                 {"wall_xy_min", params.wall_xy_min},
                 {"via_diameter", params.via_diameter}};
  j["violation_count"] = violations.size();
  auto arr = nlohmann::ordered_json::array();
  for (const auto& v : violations) {
    arr.push_back({{"rule", to_string(v.rule)},
                   {"location", {v.location.x, v.location.y}},
                   {"measured", v.measured},
                   {"limit", v.limit},
                   {"subjects", v.subjects}});
  }
  j["violations"] = std::move(arr);
  return j.dump(2);
}

std::string drc_report_table(const std::vector<DrcViolation>& violations) {
  if (violations.empty()) return "DRC clean: no violations\n";
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-15s %10s %8s  %-22s %s\n", "rule", "measured", "limit", "location", "subjects");
  out += line;
  for (const auto& v : violations) {
    std::string subjects;
    for (const auto& s : v.subjects) subjects += (subjects.empty() ? "" : ", ") + s;
    std::snprintf(line, sizeof line, "%-15s %10.4f %8.4f  %-22s ", std::string(to_string(v.rule)).c_str(),
                  v.measured, v.limit, fmt_pt(v.location).c_str());
    out += line + subjects + "\n";
  }
  out += std::to_string(violations.size()) + " violation(s)\n";
  return out;
}

}  // namespace dissolv

#include <algorithm>
#include <cmath>
#include <limits>

#include "dissolv/error.hpp"
#include "dissolv/pcb_model.hpp"

namespace dissolv {

Vec2 start_of(const OutlineElem& e) {
  return std::visit([](const auto& v) { return v.start; }, e);
}

Vec2 end_of(const OutlineElem& e) {
  return std::visit([](const auto& v) { return v.end; }, e);
}

OutlineElem reversed(const OutlineElem& e) {
  if (const auto* l = std::get_if<OutlineLine>(&e)) return OutlineLine{l->end, l->start};
  const auto& a = std::get<OutlineArc>(e);
  return OutlineArc{a.end, a.mid, a.start};
}

Circle circumcircle(Vec2 a, Vec2 b, Vec2 c) {
  // Work relative to `a` to keep the determinant well conditioned.
  const Vec2 ab = b - a, ac = c - a;
  const double d = 2.0 * cross(ab, ac);
  const double scale = std::max(dot(ab, ab), dot(ac, ac));
  if (!(std::abs(d) > 1e-12 * scale) || scale == 0.0)
    throw Error(ErrorCode::CollinearPoints, "arc points are collinear");
  const double ab2 = dot(ab, ab), ac2 = dot(ac, ac);
  const Vec2 u{(ac.y * ab2 - ab.y * ac2) / d, (ab.x * ac2 - ac.x * ab2) / d};
  return {a + u, norm(u)};
}

namespace {

double wrap_2pi(double a) {
  const double two_pi = 2.0 * kPi;
  a = std::fmod(a, two_pi);
  if (a < 0) a += two_pi;
  return a;
}

}  // namespace

std::vector<Vec2> arc_to_polyline(const OutlineArc& arc, double chord_tol) {
  const Circle circ = circumcircle(arc.start, arc.mid, arc.end);
  const Vec2 c = circ.center;
  const double r = circ.radius;
  const double a0 = std::atan2(arc.start.y - c.y, arc.start.x - c.x);
  const double am = std::atan2(arc.mid.y - c.y, arc.mid.x - c.x);
  const double a1 = std::atan2(arc.end.y - c.y, arc.end.x - c.x);

  double sweep = wrap_2pi(a1 - a0);
  if (sweep == 0.0) sweep = 2.0 * kPi;  // closed circle through mid
  const double to_mid = wrap_2pi(am - a0);
  if (to_mid > sweep) sweep -= 2.0 * kPi;  // mid lies on the clockwise side

  double max_step = kPi / 2;
  if (chord_tol < r) max_step = std::min(max_step, 2.0 * std::acos(1.0 - chord_tol / r));
  const int n = std::max(2, static_cast<int>(std::ceil(std::abs(sweep) / max_step)));

  std::vector<Vec2> pts;
  pts.reserve(n + 1);
  pts.push_back(arc.start);
  for (int i = 1; i < n; ++i) {
    const double a = a0 + sweep * i / n;
    pts.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
  }
  pts.push_back(arc.end);
  return pts;
}

std::vector<Vec2> loop_polygon(const std::vector<OutlineElem>& loop, double chord_tol) {
  std::vector<Vec2> poly;
  for (const auto& e : loop) {
    if (const auto* l = std::get_if<OutlineLine>(&e)) {
      poly.push_back(l->start);
    } else {
      auto pts = arc_to_polyline(std::get<OutlineArc>(e), chord_tol);
      poly.insert(poly.end(), pts.begin(), pts.end() - 1);
    }
  }
  return poly;
}

double signed_area(const std::vector<Vec2>& polygon) {
  double twice = 0.0;
  for (std::size_t i = 0, n = polygon.size(); i < n; ++i) twice += cross(polygon[i], polygon[(i + 1) % n]);
  return 0.5 * twice;
}

std::vector<OutlineElem> sort_outline(std::vector<OutlineElem> elems, double tol) {
  if (elems.empty()) throw Error(ErrorCode::MissingBoardOutline, "empty outline");

  std::vector<std::vector<OutlineElem>> loops;
  std::vector<bool> used(elems.size(), false);
  std::size_t remaining = elems.size();

  while (remaining > 0) {
    std::size_t first = std::find(used.begin(), used.end(), false) - used.begin();
    std::vector<OutlineElem> loop{elems[first]};
    used[first] = true;
    --remaining;
    const Vec2 origin = start_of(loop.front());

    while (distance(end_of(loop.back()), origin) > tol) {
      const Vec2 tail = end_of(loop.back());
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_i = elems.size();
      bool flip = false;
      for (std::size_t i = 0; i < elems.size(); ++i) {
        if (used[i]) continue;
        const double ds = distance(start_of(elems[i]), tail);
        const double de = distance(end_of(elems[i]), tail);
        if (ds < best) best = ds, best_i = i, flip = false;
        if (de < best) best = de, best_i = i, flip = true;
      }
      if (best_i == elems.size() || best > tol)
        throw Error(ErrorCode::OpenOutline, "no element continues from (" + std::to_string(tail.x) + ", " +
                                                std::to_string(tail.y) + ")");
      loop.push_back(flip ? reversed(elems[best_i]) : elems[best_i]);
      used[best_i] = true;
      --remaining;
    }
    loops.push_back(std::move(loop));
  }

  if (loops.size() > 1) {
    // Outer loop = largest bounding box; inner cutouts are not supported.
    std::size_t outer = 0;
    double best_area = -1;
    for (std::size_t i = 0; i < loops.size(); ++i) {
      auto poly = loop_polygon(loops[i], 0.1);
      auto [xmin, xmax] = std::ranges::minmax(poly, {}, &Vec2::x);
      auto [ymin, ymax] = std::ranges::minmax(poly, {}, &Vec2::y);
      double a = (xmax.x - xmin.x) * (ymax.y - ymin.y);
      if (a > best_area) best_area = a, outer = i;
    }
    throw Error(ErrorCode::MultipleLoops, std::to_string(loops.size()) + " closed loops found; loop " +
                                              std::to_string(outer) +
                                              " is the outer boundary and inner cutouts are not supported");
  }

  auto& loop = loops.front();
  if (signed_area(loop_polygon(loop, 0.1)) < 0) {
    std::reverse(loop.begin(), loop.end());
    for (auto& e : loop) e = reversed(e);
  }
  return loop;
}

}  // namespace dissolv

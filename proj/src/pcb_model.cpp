#include "dissolv/pcb_model.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "dissolv/error.hpp"

namespace dissolv {

using sexpr::Node;

Vec2 pad_center(const FootprintInst& fp, const PadDef& pad) { return fp.at + rotate(pad.at_rel, fp.rot_deg); }

double pad_rotation(const FootprintInst& fp, const PadDef& pad) {
  double r = std::fmod(fp.rot_deg + pad.rot_deg, 360.0);
  return r < 0 ? r + 360.0 : r;
}

std::string PcbDesign::net_name(NetId id) const {
  auto it = nets.find(id);
  return it == nets.end() ? std::string() : it->second;
}

std::optional<NetId> PcbDesign::find_net(std::string_view name) const {
  for (const auto& [id, n] : nets)
    if (n == name) return id;
  return std::nullopt;
}

namespace {

constexpr std::string_view kEdgeCuts = "Edge.Cuts";

[[noreturn]] void malformed(const Node& n, const std::string& what) {
  throw Error(ErrorCode::MalformedForm, what, n.source_line);
}

double require_number(const Node& form, std::size_t i, const char* what) {
  auto v = form.number(i);
  if (!v) malformed(form, std::string("expected number for ") + what);
  return *v;
}

// KiCad coordinates are Y-down; the model is Y-up. This is the only place
// the flip happens.
Vec2 read_xy(const Node& parent, std::string_view key) {
  const Node* f = parent.child(key);
  if (!f) malformed(parent, "missing (" + std::string(key) + ")");
  return {require_number(*f, 1, "x"), -require_number(*f, 2, "y")};
}

std::optional<std::string> layer_of(const Node& form) {
  const Node* l = form.child("layer");
  if (!l) return std::nullopt;
  auto t = l->atom(1);
  if (!t) malformed(*l, "layer name");
  return std::string(*t);
}

double normalize_deg(double d) {
  d = std::fmod(d, 360.0);
  if (d < 0) d += 360.0;
  if (d >= 360.0) d = 0.0;
  return d;
}

// 0 for F.Cu, N for InN.Cu, INT_MAX for B.Cu; nullopt when not copper.
std::optional<int> copper_rank(std::string_view name) {
  if (name == "F.Cu") return 0;
  if (name == "B.Cu") return INT_MAX;
  if (name.size() > 5 && name.starts_with("In") && name.ends_with(".Cu")) {
    auto digits = name.substr(2, name.size() - 5);
    int v = 0;
    for (char c : digits) {
      if (c < '0' || c > '9') return std::nullopt;
      v = v * 10 + (c - '0');
      if (v > 1000) return std::nullopt;
    }
    if (v >= 1) return v;
  }
  return std::nullopt;
}

struct LayerMap {
  std::vector<std::string> names;  // by index, bottom-up

  LayerIndex index(const std::string& name, int line) const {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return static_cast<LayerIndex>(i);
    throw Error(ErrorCode::UnknownLayerName, name, line);
  }
};

void note_copper(std::set<std::pair<int, std::string>>& seen, const std::string& name, int line) {
  auto rank = copper_rank(name);
  if (!rank) throw Error(ErrorCode::UnknownLayerName, name, line);
  seen.insert({*rank, name});
}

LayerMap build_layer_map(const Node& root) {
  std::set<std::pair<int, std::string>> seen;  // (rank, name) sorted top-down

  if (const Node* layers = root.child("layers")) {
    for (std::size_t i = 1; i < layers->children.size(); ++i) {
      const Node& entry = layers->children[i];
      if (!entry.is_list()) continue;
      auto name = entry.atom(1);
      if (name && copper_rank(*name)) seen.insert({*copper_rank(*name), std::string(*name)});
    }
  }
  for (const Node* seg : sexpr::find_children(root, "segment"))
    if (auto l = layer_of(*seg)) note_copper(seen, *l, seg->source_line);
  for (const Node* via : sexpr::find_children(root, "via")) {
    if (const Node* ls = via->child("layers"))
      for (std::size_t i = 1; i < ls->children.size(); ++i)
        if (auto t = ls->atom(i)) note_copper(seen, std::string(*t), ls->source_line);
  }
  for (const char* kw : {"footprint", "module"})
    for (const Node* fp : sexpr::find_children(root, kw))
      if (auto l = layer_of(*fp)) note_copper(seen, *l, fp->source_line);

  if (seen.empty()) seen.insert({0, "F.Cu"});

  LayerMap map;
  for (auto it = seen.rbegin(); it != seen.rend(); ++it) map.names.push_back(it->second);
  return map;
}

NetId read_net(const Node& form, const PcbDesign& design) {
  const Node* n = form.child("net");
  if (!n) return 0;
  auto id = n->number(1);
  if (!id) malformed(*n, "net id");
  NetId net = static_cast<NetId>(*id);
  if (!design.nets.contains(net)) malformed(*n, "undeclared net " + std::to_string(net));
  return net;
}

std::string footprint_reference(const Node& fp) {
  for (const Node* t : sexpr::find_children(fp, "fp_text"))
    if (t->atom(1) == "reference" && t->atom(2)) return std::string(*t->atom(2));
  for (const Node* p : sexpr::find_children(fp, "property"))
    if (p->atom(1) == "Reference" && p->atom(2)) return std::string(*p->atom(2));
  return {};
}

void read_outline_form(const Node& g, std::vector<OutlineElem>& out) {
  std::string_view kw = g.keyword();
  if (kw == "gr_line") {
    out.push_back(OutlineLine{read_xy(g, "start"), read_xy(g, "end")});
  } else if (kw == "gr_arc") {
    if (!g.child("mid"))
      throw Error(ErrorCode::UnsupportedFeature, "legacy gr_arc (center/angle form)", g.source_line);
    OutlineArc arc{read_xy(g, "start"), read_xy(g, "mid"), read_xy(g, "end")};
    (void)circumcircle(arc.start, arc.mid, arc.end);  // rejects collinear arcs early
    out.push_back(arc);
  } else if (kw == "gr_rect") {
    Vec2 a = read_xy(g, "start"), c = read_xy(g, "end");
    Vec2 b{c.x, a.y}, d{a.x, c.y};
    out.push_back(OutlineLine{a, b});
    out.push_back(OutlineLine{b, c});
    out.push_back(OutlineLine{c, d});
    out.push_back(OutlineLine{d, a});
  } else if (kw == "gr_circle") {
    Vec2 c = read_xy(g, "center"), e = read_xy(g, "end");
    Vec2 r = e - c;
    if (norm(r) <= 0) malformed(g, "zero-radius circle");
    Vec2 opposite = c - r;
    out.push_back(OutlineArc{e, c + rotate(r, 90), opposite});
    out.push_back(OutlineArc{opposite, c + rotate(r, 270), e});
  } else if (kw == "gr_poly") {
    const Node* pts = g.child("pts");
    if (!pts) malformed(g, "gr_poly without pts");
    std::vector<Vec2> p;
    for (std::size_t i = 1; i < pts->children.size(); ++i) {
      const Node& xy = pts->children[i];
      if (xy.keyword() != "xy")
        throw Error(ErrorCode::UnsupportedFeature, "non-linear gr_poly vertex", xy.source_line);
      p.push_back({require_number(xy, 1, "x"), -require_number(xy, 2, "y")});
    }
    for (std::size_t i = 0; i < p.size(); ++i) out.push_back(OutlineLine{p[i], p[(i + 1) % p.size()]});
  }
}

PadDef read_pad(const Node& pad, const FootprintInst& fp, const PcbDesign& design, bool& skip) {
  PadDef out;
  skip = false;
  out.number = std::string(pad.atom(1).value_or(""));
  auto type = pad.atom(2).value_or("");
  if (type == "np_thru_hole") {
    skip = true;
    return out;
  }
  out.kind = type == "thru_hole" ? PadKind::ThruHole : PadKind::Smd;

  const Node* at = pad.child("at");
  if (!at) malformed(pad, "pad without (at)");
  out.at_rel = {require_number(*at, 1, "x"), -require_number(*at, 2, "y")};
  double abs_rot = at->number(3).value_or(0.0);
  out.rot_deg = normalize_deg(abs_rot - fp.rot_deg);

  const Node* size = pad.child("size");
  if (!size) malformed(pad, "pad without (size)");
  out.size = {require_number(*size, 1, "w"), require_number(*size, 2, "h")};
  if (!(out.size.x > 0 && out.size.y > 0)) malformed(pad, "pad size must be positive");

  if (const Node* drill = pad.child("drill")) {
    // (drill d) or (drill oval w h)
    for (std::size_t i = 1; i < drill->children.size(); ++i)
      if (auto v = drill->number(i)) {
        out.drill = *v;
        break;
      }
  }
  if (pad.child("net")) out.net = read_net(pad, design);
  return out;
}

}  // namespace

PcbDesign extract_design(const Node& root) {
  if (!root.is_list()) throw Error(ErrorCode::NotAList, "document root", root.source_line);
  if (root.keyword() != "kicad_pcb") malformed(root, "root form is not kicad_pcb");

  PcbDesign design;

  if (const Node* v = root.child("version"); v && v->number(1)) {
    design.version = static_cast<long long>(*v->number(1));
    if (std::ranges::find(kKnownVersions, *design.version) == std::end(kKnownVersions))
      design.warnings.push_back({"untested file-format version " + std::to_string(*design.version), v->source_line});
  } else {
    design.warnings.push_back({"no (version) form; assuming a current format", root.source_line});
  }

  for (const Node* n : sexpr::find_children(root, "net")) {
    auto id = n->number(1);
    if (!id) malformed(*n, "net id");
    design.nets[static_cast<NetId>(*id)] = std::string(n->atom(2).value_or(""));
  }
  if (!design.nets.contains(0)) design.nets[0] = "";

  const LayerMap layers = build_layer_map(root);
  design.layer_names = layers.names;
  design.copper_layer_count = static_cast<int>(layers.names.size());

  for (const Node& form : root.children) {
    std::string_view kw = form.keyword();
    if (kw == "segment") {
      TraceSegment s;
      s.start = read_xy(form, "start");
      s.end = read_xy(form, "end");
      const Node* w = form.child("width");
      if (!w) malformed(form, "segment without width");
      s.width = require_number(*w, 1, "width");
      if (!(s.width > 0)) malformed(form, "segment width must be positive");
      auto l = layer_of(form);
      if (!l) malformed(form, "segment without layer");
      s.layer = layers.index(*l, form.source_line);
      s.net = read_net(form, design);
      if (s.start == s.end) {
        design.warnings.push_back({"dropped zero-length segment", form.source_line});
        continue;
      }
      design.segments.push_back(s);
    } else if (kw == "arc") {
      throw Error(ErrorCode::UnsupportedFeature, "curved copper traces are not supported", form.source_line);
    } else if (kw == "via") {
      ViaDef v;
      const Node* at = form.child("at");
      if (!at) malformed(form, "via without (at)");
      v.at = {require_number(*at, 1, "x"), -require_number(*at, 2, "y")};
      const Node* size = form.child("size");
      if (!size) malformed(form, "via without (size)");
      v.diameter = require_number(*size, 1, "size");
      if (!(v.diameter > 0)) malformed(form, "via size must be positive");
      const Node* ls = form.child("layers");
      if (!ls || ls->children.size() < 3) malformed(form, "via without a layer pair");
      LayerIndex a = layers.index(std::string(ls->atom(1).value_or("")), ls->source_line);
      LayerIndex b = layers.index(std::string(ls->atom(2).value_or("")), ls->source_line);
      if (a == b) malformed(form, "via connects a layer to itself");
      v.layer_from = std::min(a, b);
      v.layer_to = std::max(a, b);
      v.net = read_net(form, design);
      design.vias.push_back(v);
    } else if (kw == "footprint" || kw == "module") {
      FootprintInst fp;
      fp.source_line = form.source_line;
      fp.lib_id = std::string(form.atom(1).value_or(""));
      fp.reference = footprint_reference(form);
      const Node* at = form.child("at");
      if (!at) malformed(form, "footprint without (at)");
      fp.at = {require_number(*at, 1, "x"), -require_number(*at, 2, "y")};
      fp.rot_deg = normalize_deg(at->number(3).value_or(0.0));
      auto l = layer_of(form).value_or("F.Cu");
      fp.side = l == "B.Cu" ? Side::Bottom : Side::Top;
      for (const Node* pad : sexpr::find_children(form, "pad")) {
        bool skip = false;
        PadDef p = read_pad(*pad, fp, design, skip);
        if (!skip) fp.pads.push_back(std::move(p));
      }
      design.footprints.push_back(std::move(fp));
    } else if (kw == "zone") {
      design.warnings.push_back({"copper zone ignored", form.source_line});
    } else if (kw.starts_with("gr_")) {
      if (layer_of(form) == kEdgeCuts) read_outline_form(form, design.outline);
    }
  }

  if (design.outline.empty()) throw Error(ErrorCode::MissingBoardOutline, "no Edge.Cuts graphics");
  return design;
}

PcbDesign load_design(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return extract_design(sexpr::parse(buf.str()));
}

}  // namespace dissolv

#include "dissolv/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "dissolv/error.hpp"

namespace dissolv {

double trace_resistance(double length, double width, double height, double resistivity) {
  if (!(length > 0 && width > 0 && height > 0 && resistivity > 0))
    throw Error(ErrorCode::ConfigError, "trace_resistance needs positive length, width, height and resistivity");
  // uOhm*cm -> Ohm*m is 1e-8; mm -> m and mm^2 -> m^2.
  return resistivity * 1e-8 * (length * 1e-3) / (width * height * 1e-6);
}

double via_resistance(double span, double diameter, double resistivity) {
  if (!(span > 0 && diameter > 0 && resistivity > 0))
    throw Error(ErrorCode::ConfigError, "via_resistance needs positive span, diameter and resistivity");
  const double r = 0.5 * diameter * 1e-3;
  return resistivity * 1e-8 * (span * 1e-3) / (kPi * r * r);
}

std::optional<int> NetGraph::find_label(std::string_view label) const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    // Merged pads carry "A.1+B.2"; match any component.
    std::string_view l = nodes[i].label;
    while (!l.empty()) {
      const auto plus = l.find('+');
      if (l.substr(0, plus) == label) return static_cast<int>(i);
      if (plus == std::string_view::npos) break;
      l.remove_prefix(plus + 1);
    }
  }
  return std::nullopt;
}

namespace {

constexpr double kMergeTol = 1e-3;

struct Dsu {
  std::vector<int> parent;
  explicit Dsu(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  // Keeps the smaller index as representative so numbering follows input order.
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent[b] = a;
  }
};

struct RawNode {
  Vec2 at;
  int layer = 0;
  bool pad = false;
  std::string label;
  Vec2 half;      // pad half size
  double rot = 0; // pad rotation
};

RawNode point_node(Vec2 at, int layer) {
  RawNode n;
  n.at = at;
  n.layer = layer;
  return n;
}

bool layers_meet(int a, int b) { return a == b || a == -1 || b == -1; }

bool inside_pad(const RawNode& pad, Vec2 p) {
  const Vec2 local = rotate(p - pad.at, -pad.rot);
  return std::fabs(local.x) <= pad.half.x + 1e-9 && std::fabs(local.y) <= pad.half.y + 1e-9;
}

}  // namespace

std::map<NetId, NetGraph> build_net_graph(const PcbDesign& design, const ProcessParams& params,
                                          const MaterialConstants& constants) {
  const Stackup st = make_stackup(design.copper_layer_count, params);
  const double rho = constants.resistivity_egain;

  struct Pending {
    std::vector<RawNode> raw;
    std::vector<GraphEdge> edges;  // raw indices
  };
  std::map<NetId, Pending> work;

  for (std::size_t s = 0; s < design.segments.size(); ++s) {
    const auto& seg = design.segments[s];
    if (seg.net == 0) continue;
    auto& w = work[seg.net];
    const int a = static_cast<int>(w.raw.size());
    w.raw.push_back(point_node(seg.start, seg.layer));
    w.raw.push_back(point_node(seg.end, seg.layer));
    const double len = seg.length();
    if (len > 0)
      w.edges.push_back({a, a + 1, trace_resistance(len, seg.width, st.trace_height, rho),
                         "segment#" + std::to_string(s)});
  }
  for (std::size_t v = 0; v < design.vias.size(); ++v) {
    const auto& via = design.vias[v];
    if (via.net == 0) continue;
    auto& w = work[via.net];
    const int lo = std::min(via.layer_from, via.layer_to), hi = std::max(via.layer_from, via.layer_to);
    const int a = static_cast<int>(w.raw.size());
    w.raw.push_back(point_node(via.at, lo));
    w.raw.push_back(point_node(via.at, hi));
    const double span = st.layer(hi).z1 - st.layer(lo).z0;
    w.edges.push_back({a, a + 1, via_resistance(span, via.diameter, rho), "via#" + std::to_string(v)});
  }
  for (const auto& fp : design.footprints) {
    for (const auto& pad : fp.pads) {
      if (!pad.net || *pad.net == 0) continue;
      auto it = work.find(*pad.net);
      if (it == work.end()) continue;  // no copper on this net
      RawNode n;
      n.at = pad_center(fp, pad);
      n.layer = pad.kind == PadKind::ThruHole ? -1 : (fp.side == Side::Top ? st.layer_count - 1 : 0);
      n.pad = true;
      n.label = fp.reference + "." + pad.number;
      n.half = pad.size * 0.5;
      n.rot = pad_rotation(fp, pad);
      it->second.raw.push_back(n);
    }
  }

  std::map<NetId, NetGraph> out;
  for (auto& [id, w] : work) {
    const std::size_t n = w.raw.size();
    Dsu dsu(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const RawNode &a = w.raw[i], &b = w.raw[j];
        if (!layers_meet(a.layer, b.layer)) continue;
        bool merge = distance(a.at, b.at) <= kMergeTol;
        if (!merge && a.pad) merge = inside_pad(a, b.at);
        if (!merge && b.pad) merge = inside_pad(b, a.at);
        if (merge) dsu.unite(static_cast<int>(i), static_cast<int>(j));
      }
    }

    NetGraph g;
    g.net = id;
    g.name = design.net_name(id);
    std::vector<int> compact(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
      const int r = dsu.find(static_cast<int>(i));
      if (compact[r] < 0) {
        compact[r] = static_cast<int>(g.nodes.size());
        g.nodes.push_back({w.raw[r].at, w.raw[r].layer, ""});
      }
      compact[i] = compact[r];
      GraphNode& node = g.nodes[compact[i]];
      if (w.raw[i].pad) {
        if (node.label.empty()) {
          node.at = w.raw[i].at;
          node.label = w.raw[i].label;
          g.terminals.push_back(compact[i]);
        } else {
          node.label += "+" + w.raw[i].label;
        }
        if (w.raw[i].layer == -1) node.layer = -1;
      }
    }
    for (const auto& e : w.edges) {
      const int a = compact[e.a], b = compact[e.b];
      if (a != b) g.edges.push_back({a, b, e.resistance, e.source});
    }
    Dsu comp(g.nodes.size());
    for (const auto& e : g.edges) comp.unite(e.a, e.b);
    std::vector<int> label(g.nodes.size(), -1);
    g.component.resize(g.nodes.size());
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      const int r = comp.find(static_cast<int>(i));
      if (label[r] < 0) label[r] = g.component_count++;
      g.component[i] = label[r];
    }
    out.emplace(id, std::move(g));
  }
  return out;
}

double net_resistance(const NetGraph& g, int a, int b) {
  const int n = static_cast<int>(g.nodes.size());
  if (a < 0 || b < 0 || a >= n || b >= n)
    throw Error(ErrorCode::Disconnected, "node index out of range in net '" + g.name + "'");
  if (a == b) return 0.0;
  // Solve with a canonical terminal order so R(a, b) and R(b, a) are the
  // same floating-point number.
  if (a > b) std::swap(a, b);
  if (g.component[a] != g.component[b]) {
    throw Error(ErrorCode::Disconnected, "nodes " + std::to_string(a) + " and " + std::to_string(b) + " of net '" +
                                             g.name + "' are not connected");
  }
  // Unknowns: every node of the component except the grounded node b.
  std::vector<int> index(n, -1);
  int m = 0;
  for (int i = 0; i < n; ++i)
    if (g.component[i] == g.component[a] && i != b) index[i] = m++;

  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(m, m);
  for (const auto& e : g.edges) {
    if (g.component[e.a] != g.component[a]) continue;
    if (!(e.resistance > 0) || !std::isfinite(e.resistance))
      throw Error(ErrorCode::SingularSystem, "edge " + e.source + " has non-positive resistance");
    const double c = 1.0 / e.resistance;
    const int i = index[e.a], j = index[e.b];
    if (i >= 0) G(i, i) += c;
    if (j >= 0) G(j, j) += c;
    if (i >= 0 && j >= 0) {
      G(i, j) -= c;
      G(j, i) -= c;
    }
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  rhs(index[a]) = 1.0;
  const Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::SingularSystem, "conductance matrix is singular");
  const Eigen::VectorXd v = llt.solve(rhs);
  if (!std::isfinite(v(index[a]))) throw Error(ErrorCode::SingularSystem, "nodal solve did not converge");
  return v(index[a]);
}

CurrentReport current_check(const PcbDesign& design, const std::map<NetId, NetGraph>& graphs,
                            const std::map<std::string, double>& net_currents, const ProcessParams& params) {
  CurrentReport r;
  r.limit = params.max_current;
  std::map<NetId, double> by_id;
  for (const auto& [name, amps] : net_currents) {
    const auto id = design.find_net(name);
    if (!id) throw Error(ErrorCode::UnknownNet, "unknown net '" + name + "'");
    if (!(amps >= 0) || !std::isfinite(amps))
      throw Error(ErrorCode::ConfigError, "current for net '" + name + "' must be non-negative");
    by_id[*id] = amps;
  }
  for (const auto& [id, amps] : by_id) {
    NetCurrent nc;
    nc.net = id;
    nc.name = design.net_name(id);
    nc.current = amps;
    nc.over_limit = amps > params.max_current;
    if (auto it = graphs.find(id); it != graphs.end()) {
      for (const auto& e : it->second.edges) {
        const double w = amps * amps * e.resistance;
        nc.edges.push_back({e.source, e.resistance, w});
        nc.total_watts += w;
      }
    }
    if (nc.over_limit) {
      r.warnings.push_back("net '" + nc.name + "' carries " + std::to_string(amps) + " A, above the " +
                           std::to_string(params.max_current) + " A continuous limit");
    }
    r.nets.push_back(std::move(nc));
  }
  return r;
}

std::pair<double, double> split_egain(double mass, GaInSplit split) {
  // Multiply by the larger fraction, derive the other by subtraction so the
  // two parts always sum to the whole.
  if (split.ga >= split.in) {
    const double ga = mass * split.ga;
    return {ga, mass - ga};
  }
  const double in = mass * split.in;
  return {mass - in, in};
}

MaterialReport material_estimate(const ChannelSet& channels, const geom::Solid& board,
                                 const MaterialConstants& constants, double pitch) {
  MaterialReport r;
  r.pitch = pitch;
  r.channel_volume = channels.total_volume();
  r.channel_error = channels.total_error_bound();
  r.egain_g = r.channel_volume * constants.density_egain * 1e-3;  // mm^3 -> cm^3
  std::tie(r.ga_g, r.in_g) = split_egain(r.egain_g, constants.split);
  if (pitch > 0 && !board.is_empty()) {
    const auto v = geom::volume(board, pitch);
    r.board_volume = v.volume;
    r.board_error = v.error_bound;
  }
  r.pva_g = r.board_volume * 1e-3 * constants.density_pva * constants.fill_factor;
  return r;
}

}  // namespace dissolv

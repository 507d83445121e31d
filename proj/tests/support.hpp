#pragma once

#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <tuple>
#include <sstream>
#include <stdexcept>
#include <string>

#include "abutcheck/cell_library.hpp"
#include "abutcheck/drc.hpp"
#include "abutcheck/route_fabric.hpp"

namespace abutcheck::testing {

inline std::string data_path(const std::string& name) { return std::string(ABUTCHECK_DATA_DIR) + "/" + name; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline const TechRules& toy_tech() {
  static const TechRules t = parse_tech_rules(slurp(data_path("toy.tech")));
  return t;
}

inline CellLibrary toy_library() {
  const TechRules tech = toy_tech();
  CellParseOptions o;
  o.site_row_height = tech.site_row_height;
  return parse_cells(slurp(data_path("toy8.lef")), o);
}

/// Minimal single-routing-layer deck for hand-built geometry.
inline TechRules one_layer_deck(Coord spacing = 50, Coord width = 50, Coord dp = 0) {
  TechRules t;
  LayerRule m;
  m.name = "M1";
  m.kind = LayerKind::Routing;
  m.direction = Direction::Horizontal;
  m.pitch = 100;
  m.min_width = width;
  m.min_spacing = spacing;
  m.dp_spacing = dp;
  m.same_net_spacing = spacing;
  m.min_enclosed_width = width;
  t.layers.push_back(m);
  t.site_row_height = 1000;
  return t;
}

struct ConductorRect {
  int layer;
  Rect rect;
};

/// Conductors of one signal net grouped into pieces that are connected by
/// construction: each wire, each pin shape, each via (cut plus pads).
inline std::vector<std::vector<ConductorRect>> net_pieces(const RoutedDesign& d, const TechRules& tech,
                                                      const std::string& net) {
  std::vector<std::vector<ConductorRect>> pieces;
  for (const auto& w : d.wires) {
    if (w.net == net) pieces.push_back({{w.layer, w.rect}});
  }
  for (const auto& v : d.vias) {
    if (v.net != net) continue;
    std::vector<ConductorRect> p;
    for (const auto& [l, r] : via_geometry(tech, v.cut_layer, v.center)) p.push_back({l, r});
    pieces.push_back(std::move(p));
  }
  for (const auto& s : d.cell_shapes) {
    if (s.net == net && !s.pin.empty()) pieces.push_back({{s.layer, s.rect}});
  }
  return pieces;
}

/// Number of connected components among a net's pieces, where two pieces
/// join when rects on the same layer touch.
inline int component_count(const std::vector<std::vector<ConductorRect>>& pieces) {
  std::vector<int> parent(pieces.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    for (std::size_t j = i + 1; j < pieces.size(); ++j) {
      for (const auto& a : pieces[i]) {
        for (const auto& b : pieces[j]) {
          if (a.layer == b.layer && touches(a.rect, b.rect)) parent[find(static_cast<int>(i))] = find(static_cast<int>(j));
        }
      }
    }
  }
  int roots = 0;
  for (std::size_t i = 0; i < pieces.size(); ++i) roots += find(static_cast<int>(i)) == static_cast<int>(i);
  return roots;
}

/// Pairs of touching same-layer shapes on different nets where at least
/// one side is a routed wire or via.
inline int geometric_shorts(const RoutedDesign& d, const TechRules& tech) {
  std::vector<std::pair<std::string, ConductorRect>> routed, all;
  for (const auto& w : d.wires) routed.push_back({w.net, {w.layer, w.rect}});
  for (const auto& v : d.vias) {
    for (const auto& [l, r] : via_geometry(tech, v.cut_layer, v.center)) routed.push_back({v.net, {l, r}});
  }
  all = routed;
  for (const auto& s : d.cell_shapes) all.push_back({s.net, {s.layer, s.rect}});
  for (const auto& s : d.rails) all.push_back({"rail:" + s.net, {s.layer, s.rect}});
  for (const auto& s : d.straps) all.push_back({"strap:" + s.net, {s.layer, s.rect}});
  int shorts = 0;
  for (std::size_t i = 0; i < routed.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      const auto& [na, a] = routed[i];
      const auto& [nb, b] = all[j];
      if (na != nb && a.layer == b.layer && touches(a.rect, b.rect)) ++shorts;
    }
  }
  return shorts;
}

inline Pin m1_pin(const std::string& name, Rect r, PinKind kind = PinKind::Signal) {
  Pin p;
  p.name = name;
  p.kind = kind;
  p.shapes.push_back({"M1", r, 0});
  return p;
}

/// An 8-track cell with Z on track 2 and A on `a_track`, abutted to its own
/// mirror image. Each copy's A and Z form one net.
inline std::vector<Violation> edge_pin_fixture(int a_track) {
  const Coord ax = 55 + 110 * a_track;
  Cell c;
  c.name = "EDGE";
  c.width = 880;
  c.height = 1500;
  c.pins = {m1_pin("A", {ax - 25, 600, ax + 25, 700}), m1_pin("Z", {250, 600, 300, 700}),
            m1_pin("VDD", {0, 1450, 880, 1500}, PinKind::Power), m1_pin("VSS", {0, 0, 880, 50}, PinKind::Ground)};
  const std::vector<Cell> cells{c};

  Testcell tc;
  tc.name = "edge";
  tc.row_height = 1500;
  for (int i = 0; i < 2; ++i) {
    InstancePlacement p;
    p.instance_name = "U" + std::to_string(i + 1);
    p.cell_name = "EDGE";
    p.origin = {880 * i, 0};
    p.orientation = i == 0 ? Orientation::R0 : Orientation::MY;
    p.width = 880;
    p.height = 1500;
    tc.instances.push_back(p);
  }
  tc.die = {0, 0, 1760, 1500};

  const std::vector<Net> nets{{"n1", PinKind::Signal, {{"U1", "A"}, {"U1", "Z"}}},
                              {"n2", PinKind::Signal, {{"U2", "A"}, {"U2", "Z"}}}};
  RouteGrid grid(toy_tech(), tc.die, "M2", "M3");
  const auto rails = preroute_power(tc, cells, grid);
  const RoutedDesign routed = route_nets(tc, cells, toy_tech(), nets, RouteOptions{}, rails, {});
  if (!routed.unrouted.empty()) throw std::runtime_error("edge fixture left nets unrouted");
  return run_drc(routed, tc, toy_tech(), DrcOptions{}).violations;
}

inline long boundary_diff_net(const std::vector<Violation>& vs) {
  return std::ranges::count_if(vs, [](const Violation& v) {
    return v.rule == Rule::DiffNetSpacing && v.at_boundary && v.nets == std::vector<std::string>{"n1", "n2"};
  });
}

/// Exhaustive 2-colouring of one component.
inline bool brute_force_bipartite(const ConflictGraph& g, const std::vector<int>& comp) {
  const int n = static_cast<int>(comp.size());
  std::map<int, int> pos;
  for (int i = 0; i < n; ++i) pos[comp[i]] = i;
  for (std::uint32_t colours = 0; colours < (1u << n); ++colours) {
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      for (int j : g.adj[comp[i]]) {
        if (((colours >> i) & 1u) == ((colours >> pos[j]) & 1u)) {
          ok = false;
          break;
        }
      }
    }
    if (ok) return true;
  }
  return false;
}

inline std::vector<std::vector<int>> components(const ConflictGraph& g) {
  std::vector<int> seen(g.adj.size(), 0);
  std::vector<std::vector<int>> out;
  for (std::size_t s = 0; s < g.adj.size(); ++s) {
    if (seen[s]) continue;
    std::vector<int> comp{static_cast<int>(s)};
    seen[s] = 1;
    for (std::size_t k = 0; k < comp.size(); ++k) {
      for (int j : g.adj[comp[k]]) {
        if (!seen[j]) {
          seen[j] = 1;
          comp.push_back(j);
        }
      }
    }
    out.push_back(comp);
  }
  return out;
}

/// Layer-0 wire for hand-built layouts.
inline Shape wire(const std::string& net, Rect r, int mask = 0) {
  Shape s;
  s.layer = 0;
  s.rect = r;
  s.net = net;
  s.kind = ShapeKind::Wire;
  s.mask = mask;
  return s;
}

inline Layout layout_of(std::vector<Shape> shapes) {
  Layout l;
  l.die = {-1000, -1000, 3000, 3000};
  l.shapes = std::move(shapes);
  return l;
}

inline long count_rule(const std::vector<Violation>& vs, Rule r) { return std::ranges::count(vs, r, &Violation::rule); }

/// DIFF_NET_SPACING identities: layer, location, nets.
inline std::set<std::tuple<int, Rect, std::vector<std::string>>> spacing_set(const std::vector<Violation>& vs) {
  std::set<std::tuple<int, Rect, std::vector<std::string>>> out;
  for (const auto& v : vs) {
    if (v.rule == Rule::DiffNetSpacing) out.emplace(v.layer, v.location, v.nets);
  }
  return out;
}

}  // namespace abutcheck::testing

#include "abutcheck/drc.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace abutcheck {

namespace {

class Dsu {
 public:
  explicit Dsu(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<int> parent_;
};

bool is_cell_geometry(const Shape& s) { return s.kind == ShapeKind::Pin || s.kind == ShapeKind::Obstruction; }

bool exempt(const Shape& a, const Shape& b) {
  return is_cell_geometry(a) && is_cell_geometry(b) && a.instance >= 0 && a.instance == b.instance;
}

std::vector<std::string> sorted_nets(std::vector<std::string> nets) {
  std::ranges::sort(nets);
  nets.erase(std::unique(nets.begin(), nets.end()), nets.end());
  return nets;
}

Coord bucket_size(const TechRules& tech) {
  Coord b = 256;
  for (const auto& l : tech.layers) b = std::max({b, 4 * l.min_spacing, 4 * l.dp_spacing, 2 * l.pitch});
  return b;
}

/// Shape indices per layer, with a spatial index over each.
struct LayerShapes {
  std::vector<int> ids;
  RectIndex index;
};

std::vector<LayerShapes> split_layers(const Layout& layout, const TechRules& tech) {
  const Coord bucket = bucket_size(tech);
  std::vector<LayerShapes> out(tech.layers.size(), LayerShapes{{}, RectIndex(bucket)});
  for (std::size_t i = 0; i < layout.shapes.size(); ++i) {
    const int l = layout.shapes[i].layer;
    if (l < 0 || l >= static_cast<int>(out.size())) continue;
    out[l].index.insert(static_cast<int>(out[l].ids.size()), layout.shapes[i].rect);
    out[l].ids.push_back(static_cast<int>(i));
  }
  return out;
}

/// Shape ids on the layer whose rects touch `window`.
std::vector<int> query(const LayerShapes& ls, const Rect& window) {
  std::vector<int> out;
  for (int local : ls.index.query(window)) out.push_back(ls.ids[local]);
  return out;
}

Violation make(Rule rule, int layer, const Rect& loc, std::vector<std::string> nets, const Rect& die) {
  Violation v;
  v.rule = rule;
  v.layer = layer;
  v.location = clip_to(loc, die);
  v.nets = sorted_nets(std::move(nets));
  return v;
}

}  // namespace

std::string_view to_string(Rule r) {
  switch (r) {
    case Rule::DiffNetSpacing: return "DIFF_NET_SPACING";
    case Rule::SameNetSpacing: return "SAME_NET_SPACING";
    case Rule::MinWidth: return "MIN_WIDTH";
    case Rule::ViaEnclosure: return "VIA_ENCLOSURE";
    case Rule::MinEnclosedWidth: return "MIN_ENCLOSED_WIDTH";
    case Rule::Short: return "SHORT";
    case Rule::Open: return "OPEN";
    case Rule::DpPrecolorConflict: return "DP_PRECOLOR_CONFLICT";
    case Rule::DpOddCycle: return "DP_ODD_CYCLE";
  }
  return "";
}

std::string display_name(Rule r, LayerKind kind) {
  const bool cut = kind == LayerKind::Cut;
  switch (r) {
    case Rule::DiffNetSpacing: return cut ? "Diff net via-cut spacing" : "Diff net spacing";
    case Rule::SameNetSpacing: return cut ? "Same net via-cut spacing" : "Same net spacing";
    case Rule::MinWidth: return cut ? "Less than min via-cut width" : "Less than min width";
    case Rule::ViaEnclosure: return "Insufficient via enclosure";
    case Rule::MinEnclosedWidth: return "Less than min enclosed width";
    case Rule::Short: return "Short";
    case Rule::Open: return "Open";
    case Rule::DpPrecolorConflict: return "Double pattern mask conflict";
    case Rule::DpOddCycle: return "Local double pattern cycle violation";
  }
  return "";
}

bool violation_less(const Violation& a, const Violation& b) {
  return std::tie(a.layer, a.location, a.rule, a.nets) < std::tie(b.layer, b.location, b.rule, b.nets);
}

Layout build_layout(const RoutedDesign& routed, const TechRules& tech) {
  Layout out;
  out.die = routed.die;
  std::map<std::pair<int, std::string>, int> groups;
  for (const auto& s : routed.cell_shapes) {
    Shape sh{s.layer, s.rect, s.net, s.pin.empty() ? ShapeKind::Obstruction : ShapeKind::Pin, s.mask, -1, s.instance};
    if (!s.pin.empty()) {
      sh.pin_group = groups.emplace(std::pair{s.instance, s.pin}, static_cast<int>(groups.size())).first->second;
    }
    out.shapes.push_back(std::move(sh));
  }
  for (const auto& s : routed.rails) out.shapes.push_back({s.layer, s.rect, s.net, ShapeKind::Rail});
  for (const auto& s : routed.straps) out.shapes.push_back({s.layer, s.rect, s.net, ShapeKind::Strap});
  for (const auto& w : routed.wires) out.shapes.push_back({w.layer, w.rect, w.net, ShapeKind::Wire});
  for (const auto& v : routed.vias) {
    for (const auto& [layer, rect] : via_geometry(tech, v.cut_layer, v.center)) {
      out.shapes.push_back({layer, rect, v.net, layer == v.cut_layer ? ShapeKind::ViaCut : ShapeKind::ViaPad});
    }
  }
  for (const auto& n : routed.nets) {
    if (n.kind == PinKind::Signal && n.terminals.size() >= 2) out.signal_nets.push_back(n.name);
  }
  return out;
}

std::vector<Violation> check_geometry(const Layout& layout, const TechRules& tech) {
  const auto& shapes = layout.shapes;
  const auto layers = split_layers(layout, tech);
  std::vector<Violation> out;

  // Same-net clusters per layer.
  Dsu cluster(shapes.size());
  for (const auto& ls : layers) {
    for (int i : ls.ids) {
      for (int j : query(ls, shapes[i].rect)) {
        if (j > i && shapes[j].net == shapes[i].net) cluster.unite(i, j);
      }
    }
  }

  for (std::size_t l = 0; l < layers.size(); ++l) {
    const LayerRule& rule = tech.layers[l];
    const auto& ls = layers[l];
    const Coord s = rule.min_spacing;
    const Coord sn = rule.same_net_spacing;
    const Coord reach = std::max(s, sn);

    struct Pair {
      bool has_short = false;
      std::pair<int, int> short_pair{};
      Coord d2 = 0;
      std::pair<int, int> best{-1, -1};
    };
    std::map<std::pair<int, int>, Pair> diff, same;
    for (int i : ls.ids) {
      for (int j : query(ls, expanded(shapes[i].rect, reach))) {
        if (j <= i || exempt(shapes[i], shapes[j])) continue;
        const int ci = cluster.find(i), cj = cluster.find(j);
        const auto key = std::minmax(ci, cj);
        const Coord d2 = distance_sq(shapes[i].rect, shapes[j].rect);
        if (shapes[i].net != shapes[j].net) {
          Pair& p = diff[key];
          if (touches(shapes[i].rect, shapes[j].rect)) {
            if (!p.has_short) p.short_pair = {i, j};
            p.has_short = true;
          } else if (d2 < s * s && (p.best.first < 0 || d2 < p.d2)) {
            p.d2 = d2;
            p.best = {i, j};
          }
        } else if (ci != cj && d2 < sn * sn && (same[key].best.first < 0 || d2 < same[key].d2)) {
          same[key].d2 = d2;
          same[key].best = {i, j};
        }
      }
    }
    for (const auto& [key, p] : diff) {
      if (p.has_short) {
        const auto [a, b] = p.short_pair;
        out.push_back(make(Rule::Short, static_cast<int>(l), gap_box(shapes[a].rect, shapes[b].rect),
                           {shapes[a].net, shapes[b].net}, layout.die));
      } else if (p.best.first >= 0) {
        const auto [a, b] = p.best;
        out.push_back(make(Rule::DiffNetSpacing, static_cast<int>(l), gap_box(shapes[a].rect, shapes[b].rect),
                           {shapes[a].net, shapes[b].net}, layout.die));
      }
    }
    for (const auto& [key, p] : same) {
      const auto [a, b] = p.best;
      out.push_back(make(Rule::SameNetSpacing, static_cast<int>(l), gap_box(shapes[a].rect, shapes[b].rect),
                         {shapes[a].net}, layout.die));
    }

    // Width.
    if (rule.min_width > 0) {
      for (int i : ls.ids) {
        const Rect& r = shapes[i].rect;
        if (r.min_dimension() >= rule.min_width) continue;
        const auto cover = query(ls, r);
        const bool covered = std::ranges::any_of(cover, [&](int j) {
          return shapes[j].net == shapes[i].net && contains(shapes[j].rect, r) &&
                 shapes[j].rect.min_dimension() >= rule.min_width;
        });
        if (!covered) out.push_back(make(Rule::MinWidth, static_cast<int>(l), r, {shapes[i].net}, layout.die));
      }
    }

    // Enclosure of cuts by the metal above and below.
    if (rule.kind == LayerKind::Cut) {
      for (int i : ls.ids) {
        const Rect& c = shapes[i].rect;
        for (int m : {static_cast<int>(l) - 1, static_cast<int>(l) + 1}) {
          if (m < 0 || m >= static_cast<int>(layers.size()) || tech.layers[m].kind != LayerKind::Routing) continue;
          bool enclosed = false;
          bool any = false;
          Coord widest = 0;
          for (int j : query(layers[m], c)) {
            const Rect& r = shapes[j].rect;
            if (shapes[j].net != shapes[i].net || !contains(r, c)) continue;
            any = true;
            widest = std::max(widest, r.min_dimension());
            const Coord ox = std::min(c.x_lo - r.x_lo, r.x_hi - c.x_hi);
            const Coord oy = std::min(c.y_lo - r.y_lo, r.y_hi - c.y_hi);
            if (ox >= rule.via_enclosure || oy >= rule.via_enclosure) enclosed = true;
          }
          if (!enclosed) out.push_back(make(Rule::ViaEnclosure, static_cast<int>(l), c, {shapes[i].net}, layout.die));
          if (any && widest < tech.layers[m].min_enclosed_width) {
            out.push_back(make(Rule::MinEnclosedWidth, m, c, {shapes[i].net}, layout.die));
          }
        }
      }
    }
  }

  // Connectivity of signal nets.
  std::map<std::string, std::vector<int>> by_net;
  for (std::size_t i = 0; i < shapes.size(); ++i) by_net[shapes[i].net].push_back(static_cast<int>(i));
  for (const auto& net : layout.signal_nets) {
    auto it = by_net.find(net);
    if (it == by_net.end()) continue;
    const auto& ids = it->second;
    Dsu dsu(ids.size());
    for (std::size_t a = 0; a < ids.size(); ++a) {
      for (std::size_t b = a + 1; b < ids.size(); ++b) {
        const Shape& x = shapes[ids[a]];
        const Shape& y = shapes[ids[b]];
        const bool same_group = x.pin_group >= 0 && x.pin_group == y.pin_group;
        const int dl = std::abs(x.layer - y.layer);
        const bool cut_link = dl == 1 && (tech.layers[x.layer].kind == LayerKind::Cut ||
                                          tech.layers[y.layer].kind == LayerKind::Cut);
        if (same_group || ((dl == 0 || cut_link) && touches(x.rect, y.rect))) {
          dsu.unite(static_cast<int>(a), static_cast<int>(b));
        }
      }
    }
    int components = 0;
    Rect box = shapes[ids[0]].rect;
    for (std::size_t a = 0; a < ids.size(); ++a) {
      if (dsu.find(static_cast<int>(a)) == static_cast<int>(a)) ++components;
      box = bbox_union(box, shapes[ids[a]].rect);
    }
    if (components > 1) out.push_back(make(Rule::Open, -1, box, {net}, layout.die));
  }

  std::ranges::sort(out, violation_less);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Violation> check_geometry(const RoutedDesign& routed, const TechRules& tech) {
  return check_geometry(build_layout(routed, tech), tech);
}

ConflictGraph build_conflict_graph(const Layout& layout, const TechRules& tech, int layer) {
  ConflictGraph g;
  g.layer = layer;
  const Coord dp = tech.layers.at(layer).dp_spacing;
  std::vector<int> ids;
  for (std::size_t i = 0; i < layout.shapes.size(); ++i) {
    if (layout.shapes[i].layer == layer) ids.push_back(static_cast<int>(i));
  }
  RectIndex index(bucket_size(tech));
  for (std::size_t k = 0; k < ids.size(); ++k) index.insert(static_cast<int>(k), layout.shapes[ids[k]].rect);
  Dsu dsu(ids.size());
  for (std::size_t k = 0; k < ids.size(); ++k) {
    for (int m : index.query(layout.shapes[ids[k]].rect)) dsu.unite(static_cast<int>(k), m);
  }
  std::vector<int> cluster_of(ids.size(), -1);
  std::map<int, int> root_to_cluster;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    const int root = dsu.find(static_cast<int>(k));
    auto [it, fresh] = root_to_cluster.emplace(root, static_cast<int>(g.shapes.size()));
    if (fresh) {
      g.shapes.emplace_back();
      g.bbox.push_back(layout.shapes[ids[k]].rect);
      g.mask.push_back(0);
    }
    const int c = it->second;
    cluster_of[k] = c;
    g.shapes[c].push_back(ids[k]);
    g.bbox[c] = bbox_union(g.bbox[c], layout.shapes[ids[k]].rect);
    const int m = layout.shapes[ids[k]].mask;
    if (m != 0) g.mask[c] = g.mask[c] == 0 || g.mask[c] == m ? m : -1;
  }
  g.adj.assign(g.shapes.size(), {});
  if (dp > 0) {
    for (std::size_t k = 0; k < ids.size(); ++k) {
      const Rect& r = layout.shapes[ids[k]].rect;
      for (int m : index.query(expanded(r, dp))) {
        const int a = cluster_of[k], b = cluster_of[m];
        if (a == b) continue;
        if (distance_sq(r, layout.shapes[ids[m]].rect) < dp * dp) {
          g.adj[a].push_back(b);
          g.adj[b].push_back(a);
        }
      }
    }
  }
  for (auto& a : g.adj) {
    std::ranges::sort(a);
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  return g;
}

std::optional<std::vector<int>> find_odd_cycle(const ConflictGraph& g, int start) {
  const int n = static_cast<int>(g.adj.size());
  std::vector<int> parity(n, -1), parent(n, -1), depth(n, 0);
  std::deque<int> queue{start};
  parity[start] = 0;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (int v : g.adj[u]) {
      if (parity[v] < 0) {
        parity[v] = parity[u] ^ 1;
        parent[v] = u;
        depth[v] = depth[u] + 1;
        queue.push_back(v);
      } else if (parity[v] == parity[u]) {
        std::vector<int> left{u}, right{v};
        int a = u, b = v;
        while (a != b) {
          if (depth[a] >= depth[b]) {
            a = parent[a];
            left.push_back(a);
          } else {
            b = parent[b];
            right.push_back(b);
          }
        }
        right.pop_back();
        left.insert(left.end(), right.rbegin(), right.rend());
        return left;
      }
    }
  }
  return std::nullopt;
}

std::string_view to_string(DpOption o) {
  switch (o) {
    case DpOption::Precolored: return "precolored";
    case DpOption::Recolor: return "recolor";
    case DpOption::Off: return "off";
  }
  return "off";
}

DpOption dp_option_from_string(std::string_view s) {
  for (DpOption o : {DpOption::Precolored, DpOption::Recolor, DpOption::Off}) {
    if (to_string(o) == s) return o;
  }
  throw std::invalid_argument("unknown double-patterning option '" + std::string(s) + "'");
}

std::vector<Violation> check_dp(const Layout& layout, const TechRules& tech, DpOption option, Coord local_radius,
                                std::vector<std::string>* diagnostics) {
  std::vector<Violation> out;
  if (option == DpOption::Off) return out;
  for (int l = 0; l < static_cast<int>(tech.layers.size()); ++l) {
    if (tech.layers[l].kind != LayerKind::Routing || tech.layers[l].dp_spacing <= 0) continue;
    const ConflictGraph g = build_conflict_graph(layout, tech, l);
    const int n = static_cast<int>(g.adj.size());
    auto nets_of = [&](const std::vector<int>& clusters) {
      std::vector<std::string> nets;
      for (int c : clusters) {
        for (int s : g.shapes[c]) nets.push_back(layout.shapes[s].net);
      }
      return nets;
    };

    std::vector<int> component(n, -1);
    std::vector<std::vector<int>> members;
    for (int s = 0; s < n; ++s) {
      if (component[s] >= 0) continue;
      members.emplace_back();
      std::deque<int> q{s};
      component[s] = static_cast<int>(members.size()) - 1;
      while (!q.empty()) {
        const int u = q.front();
        q.pop_front();
        members.back().push_back(u);
        for (int v : g.adj[u]) {
          if (component[v] < 0) {
            component[v] = component[s];
            q.push_back(v);
          }
        }
      }
    }

    if (option == DpOption::Precolored) {
      for (int c = 0; c < n; ++c) {
        if (g.mask[c] < 0) {
          out.push_back(make(Rule::DpPrecolorConflict, l, g.bbox[c], nets_of({c}), layout.die));
        }
        for (int d : g.adj[c]) {
          if (d <= c || g.mask[c] <= 0 || g.mask[c] != g.mask[d]) continue;
          // Closest shape pair between the two clusters.
          std::pair<int, int> best{g.shapes[c][0], g.shapes[d][0]};
          Coord bd = distance_sq(layout.shapes[best.first].rect, layout.shapes[best.second].rect);
          for (int a : g.shapes[c]) {
            for (int b : g.shapes[d]) {
              const Coord dd = distance_sq(layout.shapes[a].rect, layout.shapes[b].rect);
              if (dd < bd) {
                bd = dd;
                best = {a, b};
              }
            }
          }
          out.push_back(make(Rule::DpPrecolorConflict, l,
                             gap_box(layout.shapes[best.first].rect, layout.shapes[best.second].rect),
                             nets_of({c, d}), layout.die));
        }
      }
    }

    for (const auto& comp : members) {
      if (comp.size() < 2) continue;
      if (option == DpOption::Precolored) {
        const bool uncolored = std::ranges::any_of(comp, [&](int c) { return g.mask[c] == 0; });
        if (!uncolored) continue;
        if (diagnostics) {
          const Rect& b = g.bbox[comp.front()];
          diagnostics->push_back(tech.layers[l].name + ": uncolored shapes near (" + std::to_string(b.x_lo) + " " +
                                 std::to_string(b.y_lo) + ") checked by recoloring");
        }
      }
      const auto cycle = find_odd_cycle(g, comp.front());
      if (!cycle) continue;
      Rect box = g.bbox[cycle->front()];
      for (int c : *cycle) box = bbox_union(box, g.bbox[c]);
      if (local_radius > 0 && std::max(box.width(), box.height()) > 2 * local_radius) continue;
      out.push_back(make(Rule::DpOddCycle, l, box, nets_of(*cycle), layout.die));
    }
  }
  std::ranges::sort(out, violation_less);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Violation> filter_boundary(std::vector<Violation> violations, const Testcell& tc, Coord margin) {
  std::vector<Coord> edges{tc.die.x_lo, tc.die.x_hi};
  for (const auto& a : tc.instances) {
    for (const auto& b : tc.instances) {
      const Rect ra = a.bbox(), rb = b.bbox();
      if (ra.x_hi == rb.x_lo && ra.y_lo < rb.y_hi && rb.y_lo < ra.y_hi) edges.push_back(ra.x_hi);
    }
  }
  std::ranges::sort(edges);
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  for (auto& v : violations) {
    v.at_boundary = std::ranges::any_of(edges, [&](Coord x) {
      return v.location.x_lo <= x + margin && v.location.x_hi >= x - margin;
    });
  }
  return violations;
}

TechRules inflate_rules(const TechRules& tech, double factor) {
  if (!(factor >= 1.0)) throw std::invalid_argument("rule inflation factor must be at least 1.0");
  auto up = [factor](Coord v) { return static_cast<Coord>(std::ceil(static_cast<double>(v) * factor - 1e-9)); };
  TechRules out = tech;
  for (auto& l : out.layers) {
    l.min_spacing = up(l.min_spacing);
    l.min_width = up(l.min_width);
    l.min_enclosed_width = up(l.min_enclosed_width);
  }
  return out;
}

void attribute(std::vector<Violation>& violations, const Testcell& tc) {
  for (auto& v : violations) {
    std::vector<std::string> masters;
    for (const auto& inst : tc.instances) {
      if (touches(inst.bbox(), v.location)) masters.push_back(inst.cell_name);
    }
    v.masters = sorted_nets(std::move(masters));
    v.shared = v.masters.size() > 1;
  }
}

DrcResult run_drc(const RoutedDesign& routed, const Testcell& tc, const TechRules& tech, const DrcOptions& options) {
  DrcResult out;
  out.testcell = tc.name;
  out.deck = inflate_rules(tech, options.rule_inflation);
  const Layout layout = build_layout(routed, tech);
  out.violations = check_geometry(layout, out.deck);
  auto dp = check_dp(layout, out.deck, options.dp, options.dp_local_radius, &out.diagnostics);
  out.violations.insert(out.violations.end(), dp.begin(), dp.end());
  const Coord margin = options.boundary_margin >= 0
                           ? options.boundary_margin
                           : 2 * tech.layers[tech.layer_index(options.min_layer)].min_spacing;
  out.violations = filter_boundary(std::move(out.violations), tc, margin);
  attribute(out.violations, tc);
  std::ranges::sort(out.violations, violation_less);
  return out;
}

}  // namespace abutcheck

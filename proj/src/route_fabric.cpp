#include "abutcheck/route_fabric.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "abutcheck/random.hpp"

namespace abutcheck {

namespace {

std::map<std::string, const Cell*, std::less<>> index_cells(std::span<const Cell> cells) {
  std::map<std::string, const Cell*, std::less<>> out;
  for (const auto& c : cells) out.emplace(c.name, &c);
  return out;
}

const Cell& lookup(const std::map<std::string, const Cell*, std::less<>>& by_name, const InstancePlacement& inst) {
  auto it = by_name.find(inst.cell_name);
  if (it == by_name.end()) {
    throw std::invalid_argument("instance " + inst.instance_name + " uses unknown cell " + inst.cell_name);
  }
  return *it->second;
}

void warn(std::vector<std::string>* warnings, std::string message) {
  if (warnings) warnings->push_back(std::move(message));
}

Rect place_rect(const Rect& r, const InstancePlacement& inst) {
  const Rect local = apply_orientation(r, inst.orientation, inst.width, inst.height);
  return {local.x_lo + inst.origin.x, local.y_lo + inst.origin.y, local.x_hi + inst.origin.x,
          local.y_hi + inst.origin.y};
}

}  // namespace

std::string_view to_string(PinPairing p) { return p == PinPairing::Random ? "random" : "aligned"; }

PinPairing pin_pairing_from_string(std::string_view s) {
  if (s == "random") return PinPairing::Random;
  if (s == "aligned") return PinPairing::Aligned;
  throw std::invalid_argument("unknown pin pairing '" + std::string(s) + "'");
}

std::string_view to_string(UnroutedReason r) { return r == UnroutedReason::PinBlocked ? "PIN_BLOCKED" : "NO_PATH"; }

std::vector<Net> assign_pin_nets(const Testcell& tc, std::span<const Cell> cells, std::uint64_t seed, int net_degree,
                                 PinPairing pairing, std::vector<std::string>* warnings) {
  if (net_degree < 2) throw std::invalid_argument("net degree must be at least 2");
  const auto by_name = index_cells(cells);
  Net vdd{"VDD", PinKind::Power, {}};
  Net vss{"VSS", PinKind::Ground, {}};
  std::vector<Terminal> signals;
  std::vector<std::string> signal_masters;
  for (const auto& inst : tc.instances) {
    const Cell& cell = lookup(by_name, inst);
    for (const auto& pin : cell.pins) {
      Terminal t{inst.instance_name, pin.name};
      switch (pin.kind) {
        case PinKind::Power: vdd.terminals.push_back(std::move(t)); break;
        case PinKind::Ground: vss.terminals.push_back(std::move(t)); break;
        case PinKind::Signal:
          signals.push_back(std::move(t));
          signal_masters.push_back(cell.name);
          break;
      }
    }
  }

  std::vector<Net> out;
  if (pairing == PinPairing::Random) {
    if (signals.size() < 2) {
      warn(warnings, tc.name + ": fewer than 2 signal pins, no signal nets");
    } else {
      auto rng = Xorshift64Star::stream(seed, "pins/" + tc.name);
      rng.shuffle(std::span<Terminal>(signals));
      const std::size_t d = static_cast<std::size_t>(net_degree);
      const std::size_t count = std::max<std::size_t>(1, signals.size() / d);
      for (std::size_t k = 0; k < count; ++k) {
        Net n{"n" + std::to_string(k + 1), PinKind::Signal, {}};
        const std::size_t end = k + 1 == count ? signals.size() : (k + 1) * d;
        for (std::size_t i = k * d; i < end; ++i) n.terminals.push_back(signals[i]);
        out.push_back(std::move(n));
      }
    }
  } else {
    std::vector<std::pair<std::string, Net>> groups;
    for (std::size_t i = 0; i < signals.size(); ++i) {
      const std::string key = signal_masters[i] + "/" + signals[i].pin;
      auto it = std::ranges::find(groups, key, &std::pair<std::string, Net>::first);
      if (it == groups.end()) {
        groups.emplace_back(key, Net{key, PinKind::Signal, {}});
        it = std::prev(groups.end());
      }
      it->second.terminals.push_back(signals[i]);
    }
    for (auto& [key, net] : groups) {
      if (net.terminals.size() < 2) {
        warn(warnings, tc.name + ": pin " + key + " has no aligned partner");
        continue;
      }
      out.push_back(std::move(net));
    }
  }
  if (!vdd.terminals.empty()) out.push_back(std::move(vdd));
  if (!vss.terminals.empty()) out.push_back(std::move(vss));
  return out;
}

std::vector<PlacedShape> place_cell_shapes(const Testcell& tc, std::span<const Cell> cells, const TechRules& tech,
                                           std::span<const Net> nets, std::vector<std::string>* warnings) {
  const auto by_name = index_cells(cells);
  std::map<Terminal, std::string> net_of;
  for (const auto& n : nets) {
    for (const auto& t : n.terminals) net_of.emplace(t, n.name);
  }
  std::set<std::pair<std::string, std::string>> unknown;
  auto layer_of = [&](const Cell& cell, const std::string& layer) -> int {
    if (auto l = tech.find_layer(layer)) return *l;
    if (unknown.emplace(cell.name, layer).second) {
      warn(warnings, "cell " + cell.name + ": layer " + layer + " is not in the rules deck, shapes ignored");
    }
    return -1;
  };

  std::vector<PlacedShape> out;
  for (std::size_t i = 0; i < tc.instances.size(); ++i) {
    const auto& inst = tc.instances[i];
    const Cell& cell = lookup(by_name, inst);
    for (const auto& pin : cell.pins) {
      auto it = net_of.find(Terminal{inst.instance_name, pin.name});
      const std::string net = it != net_of.end() ? it->second : inst.instance_name + "/" + pin.name;
      for (const auto& s : pin.shapes) {
        const int l = layer_of(cell, s.layer);
        if (l < 0) continue;
        out.push_back({l, place_rect(s.rect, inst), s.mask, static_cast<int>(i), pin.name, net});
      }
    }
    for (const auto& s : cell.obstructions) {
      const int l = layer_of(cell, s.layer);
      if (l < 0) continue;
      out.push_back({l, place_rect(s.rect, inst), s.mask, static_cast<int>(i), "", inst.instance_name + "/_OBS_"});
    }
  }
  return out;
}

std::vector<std::pair<int, Rect>> via_geometry(const TechRules& tech, int cut_layer, Point center) {
  const LayerRule& cut = tech.layers.at(cut_layer);
  const Coord c = cut.min_width;
  std::vector<std::pair<int, Rect>> out;
  out.emplace_back(cut_layer, centered_rect(center, c, c));
  for (int m : {cut_layer - 1, cut_layer + 1}) {
    if (m < 0 || m >= static_cast<int>(tech.layers.size())) continue;
    const LayerRule& metal = tech.layers[m];
    if (metal.kind != LayerKind::Routing) continue;
    const Coord along = c / 2 + cut.via_enclosure;
    const Coord across = std::max(c, metal.min_width) / 2;
    Rect pad;
    switch (metal.direction) {
      case Direction::Horizontal: pad = {center.x - along, center.y - across, center.x + along, center.y + across}; break;
      case Direction::Vertical: pad = {center.x - across, center.y - along, center.x + across, center.y + along}; break;
      case Direction::None: pad = expanded({center.x, center.y, center.x, center.y}, along); break;
    }
    out.emplace_back(m, pad);
  }
  return out;
}

RouteGrid::RouteGrid(const TechRules& tech, const Rect& die, std::string_view min_layer, std::string_view max_layer)
    : tech_(&tech), die_(die) {
  const int lo = tech.layer_index(min_layer);
  const int hi = tech.layer_index(max_layer);
  if (lo > hi) {
    throw std::invalid_argument("min layer " + std::string(min_layer) + " is above max layer " + std::string(max_layer));
  }
  for (int l = lo; l <= hi; ++l) {
    if (tech.layers[l].kind == LayerKind::Routing) window_.push_back(l);
  }
  if (tech.layers[lo].kind != LayerKind::Routing || tech.layers[hi].kind != LayerKind::Routing) {
    throw std::invalid_argument("layer window must start and end on routing layers");
  }
  for (std::size_t i = 0; i + 1 < window_.size(); ++i) {
    if (window_[i + 1] - window_[i] != 2 || tech.layers[window_[i] + 1].kind != LayerKind::Cut) {
      throw std::invalid_argument("routing layers " + tech.layers[window_[i]].name + " and " +
                                  tech.layers[window_[i + 1]].name + " are not joined by one cut layer");
    }
  }
  for (int l : window_) {
    const LayerRule& r = tech.layers[l];
    if (r.pitch <= 0) throw std::invalid_argument("layer " + r.name + " has no pitch");
    if (r.direction == Direction::Vertical && x_pitch_ == 0) x_pitch_ = r.pitch;
    if (r.direction == Direction::Horizontal && y_pitch_ == 0) y_pitch_ = r.pitch;
  }
  if (x_pitch_ == 0 || y_pitch_ == 0) {
    throw std::invalid_argument("layer window " + std::string(min_layer) + ".." + std::string(max_layer) +
                                " needs both a horizontal and a vertical layer");
  }
  auto lattice = [](Coord lo_edge, Coord hi_edge, Coord pitch) {
    std::vector<Coord> out;
    Coord i = lo_edge - pitch / 2;
    i = i >= 0 ? (i + pitch - 1) / pitch : -((-i) / pitch);
    for (Coord v = pitch / 2 + i * pitch; v <= hi_edge; v += pitch) {
      if (v >= lo_edge) out.push_back(v);
    }
    return out;
  };
  xs_ = lattice(die.x_lo, die.x_hi, x_pitch_);
  ys_ = lattice(die.y_lo, die.y_hi, y_pitch_);
  fixed_.assign(window_.size() * xs_.size() * ys_.size(), kFree);
  used_.assign(fixed_.size(), kFree);
}

int RouteGrid::window_index(int tech_layer) const {
  auto it = std::ranges::find(window_, tech_layer);
  return it == window_.end() ? -1 : static_cast<int>(it - window_.begin());
}

Direction RouteGrid::direction(int l) const { return tech_->layers[window_[l]].direction; }

Rect RouteGrid::footprint(int n) const {
  const Point p = point(n);
  const Coord w = tech_->layers[window_[layer_of(n)]].min_width;
  if (direction(layer_of(n)) == Direction::Horizontal) {
    return {p.x - x_pitch_ / 2, p.y - w / 2, p.x - x_pitch_ / 2 + x_pitch_, p.y - w / 2 + w};
  }
  return {p.x - w / 2, p.y - y_pitch_ / 2, p.x - w / 2 + w, p.y - y_pitch_ / 2 + y_pitch_};
}

void RouteGrid::block(int tech_layer, const Rect& r, Coord clearance, int owner) {
  const int l = window_index(tech_layer);
  if (l < 0 || xs_.empty() || ys_.empty()) return;
  const Coord reach = std::max(x_pitch_, y_pitch_) + clearance;
  const auto x0 = std::ranges::lower_bound(xs_, r.x_lo - reach) - xs_.begin();
  const auto x1 = std::ranges::upper_bound(xs_, r.x_hi + reach) - xs_.begin();
  const auto y0 = std::ranges::lower_bound(ys_, r.y_lo - reach) - ys_.begin();
  const auto y1 = std::ranges::upper_bound(ys_, r.y_hi + reach) - ys_.begin();
  const Coord limit = std::max<Coord>(clearance, 1);
  for (auto iy = y0; iy < y1; ++iy) {
    for (auto ix = x0; ix < x1; ++ix) {
      const int n = node(l, static_cast<int>(ix), static_cast<int>(iy));
      if (distance_sq(footprint(n), r) >= limit * limit) continue;
      int& f = fixed_[n];
      if (owner == kBlocked || (f != kFree && f != owner)) {
        f = kBlocked;
      } else {
        f = owner;
      }
    }
  }
}

std::vector<int> RouteGrid::neighbours(int n) const {
  std::vector<int> out;
  const int l = layer_of(n), ix = ix_of(n), iy = iy_of(n);
  const int nx = static_cast<int>(xs_.size()), ny = static_cast<int>(ys_.size());
  if (direction(l) == Direction::Horizontal) {
    if (ix > 0) out.push_back(node(l, ix - 1, iy));
    if (ix + 1 < nx) out.push_back(node(l, ix + 1, iy));
  } else {
    if (iy > 0) out.push_back(node(l, ix, iy - 1));
    if (iy + 1 < ny) out.push_back(node(l, ix, iy + 1));
  }
  if (l > 0) out.push_back(node(l - 1, ix, iy));
  if (l + 1 < layers()) out.push_back(node(l + 1, ix, iy));
  return out;
}

std::vector<Strap> preroute_power(const Testcell& tc, std::span<const Cell> cells, const RouteGrid& grid,
                                  std::vector<std::string>* warnings) {
  const auto by_name = index_cells(cells);
  const TechRules& tech = grid.tech();
  const int layer = grid.tech_layer(0);
  Coord band = 0;
  std::set<std::string> reported;
  for (const auto& inst : tc.instances) {
    const Cell& cell = lookup(by_name, inst);
    bool has_supply = false;
    for (const auto& pin : cell.pins) {
      if (pin.kind == PinKind::Signal) continue;
      has_supply = true;
      for (const auto& s : pin.shapes) band = std::max(band, s.rect.height());
    }
    if (!has_supply && reported.insert(cell.name).second) {
      warn(warnings, "cell " + cell.name + " has no power or ground pins");
    }
  }
  const Coord min_width = tech.layers[layer].min_width;
  const Coord width = band > 0 ? std::max(2 * band, min_width) : 2 * min_width;
  std::vector<Strap> out;
  const Rect& die = tc.die;
  for (int r = 0; r <= tc.rows; ++r) {
    const Coord y = die.y_lo + r * tc.row_height;
    out.push_back({r % 2 == 0 ? "VSS" : "VDD", layer, {die.x_lo, y - width / 2, die.x_hi, y - width / 2 + width}});
  }
  return out;
}

std::vector<Strap> generate_straps(const RouteGrid& grid, std::uint64_t seed, std::string_view testcell,
                                   std::span<const Strap> fixed, std::span<const PlacedShape> cell_shapes,
                                   const StrapDensity& density, std::vector<std::string>* warnings) {
  const TechRules& tech = grid.tech();
  const Rect& die = grid.die();
  auto rng = Xorshift64Star::stream(seed, "straps/" + std::string(testcell));
  std::vector<Strap> out;
  const Coord upm = tech.units_per_micron;
  for (int l = 0; l < grid.layers(); ++l) {
    if (density.range <= 0) break;
    const auto u = static_cast<Coord>(rng.uniform(static_cast<std::uint64_t>(density.range)));
    const auto u_step = static_cast<Coord>(rng.uniform(static_cast<std::uint64_t>(density.range)));
    const int t = grid.tech_layer(l);
    const LayerRule& rule = tech.layers[t];
    const Coord width = u * upm / density.width_divisor;
    Coord step = u_step * upm / density.step_divisor;
    if (width == 0) continue;
    if (width < rule.min_width) {
      warn(warnings, std::string(testcell) + ": strap width " + std::to_string(width) + " on " + rule.name +
                         " is below the layer minimum, layer skipped");
      continue;
    }
    const bool horizontal = grid.direction(l) == Direction::Horizontal;
    const auto& tracks = horizontal ? grid.ys() : grid.xs();
    const Coord track_pitch = tracks.size() > 1 ? tracks[1] - tracks[0] : rule.pitch;
    const Coord spacing = std::max(rule.min_spacing, rule.same_net_spacing);
    const Coord min_step = width + 2 * spacing + rule.min_width + std::max(density.min_free_tracks, 1) * track_pitch;
    if (step < min_step) {
      Coord k = (min_step * density.step_divisor + upm - 1) / upm;
      k = std::min<Coord>(k, density.range - 1);
      const Coord clamped = std::max(k * upm / density.step_divisor, min_step);
      warn(warnings, std::string(testcell) + ": strap step " + std::to_string(step) + " on " + rule.name +
                         " leaves fewer than " + std::to_string(density.min_free_tracks) + " free tracks, raised to " + std::to_string(clamped));
      step = clamped;
    }
    const Coord lo = horizontal ? die.y_lo : die.x_lo;
    const Coord hi = horizontal ? die.y_hi : die.x_hi;
    int k = 0;
    for (Coord c = lo; c <= hi; c += step, ++k) {
      const Rect r = horizontal ? Rect{die.x_lo, c - width / 2, die.x_hi, c - width / 2 + width}
                                : Rect{c - width / 2, die.y_lo, c - width / 2 + width, die.y_hi};
      if (!contains(die, r)) continue;
      auto too_close = [&](int layer, const Rect& other) {
        return layer == t && distance_sq(r, other) < spacing * spacing;
      };
      const bool conflict = std::ranges::any_of(fixed, [&](const Strap& s) { return too_close(s.layer, s.rect); }) ||
                            std::ranges::any_of(out, [&](const Strap& s) { return too_close(s.layer, s.rect); }) ||
                            std::ranges::any_of(cell_shapes, [&](const PlacedShape& s) { return too_close(s.layer, s.rect); });
      if (conflict) continue;
      out.push_back({k % 2 == 0 ? "VDD" : "VSS", t, r});
    }
  }
  return out;
}

namespace {

struct Access {
  int node = 0;
  int cut = -1;  // cut layer below the window, or -1 for a pin on a window layer
  auto operator<=>(const Access&) const = default;
};

struct NetRoute {
  std::vector<int> nodes;
  std::vector<std::pair<int, int>> edges;  // (a, b), a < b
  std::vector<Access> accesses;
};

class Router {
 public:
  Router(const RouteGrid& grid, int via_cost) : grid_(grid), via_cost_(via_cost), history_(grid.nodes(), 0) {}

  /// Connects all terminals with a tree. occ counts other nets on each
  /// node; with present < 0 those nodes are closed, otherwise entering one
  /// costs (base + history) * (1 + present * occ).
  std::optional<NetRoute> route(int net, const std::vector<std::vector<Access>>& terminals,
                                const std::vector<int>& occ, int present) const {
    const int n_nodes = grid_.nodes();
    std::vector<char> in_tree(n_nodes, 0);
    NetRoute out;
    std::vector<char> connected(terminals.size(), 0);
    auto passable = [&](int n) {
      const int f = grid_.fixed(n);
      if (f != RouteGrid::kFree && f != net) return false;
      return present >= 0 || occ[n] == 0;
    };
    auto add_node = [&](int n) {
      if (!in_tree[n]) {
        in_tree[n] = 1;
        out.nodes.push_back(n);
      }
    };
    auto absorb = [&]() {
      for (std::size_t t = 0; t < terminals.size(); ++t) {
        if (connected[t]) continue;
        for (const Access& a : terminals[t]) {
          if (in_tree[a.node]) {
            connected[t] = 1;
            out.accesses.push_back(a);
            break;
          }
        }
      }
    };

    std::vector<long long> dist(n_nodes);
    std::vector<int> prev(n_nodes);
    std::vector<char> target(n_nodes);
    while (true) {
      if (std::ranges::all_of(connected, [](char c) { return c != 0; })) break;
      std::ranges::fill(dist, kInf);
      std::ranges::fill(prev, -1);
      std::ranges::fill(target, 0);
      using Item = std::pair<long long, int>;
      std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
      if (out.nodes.empty()) {
        for (const Access& a : terminals[0]) {
          if (!passable(a.node) || dist[a.node] == 0) continue;
          dist[a.node] = 0;
          pq.emplace(0, a.node);
        }
      } else {
        for (int n : out.nodes) {
          dist[n] = 0;
          pq.emplace(0, n);
        }
      }
      for (std::size_t t = out.nodes.empty() ? 1 : 0; t < terminals.size(); ++t) {
        if (connected[t]) continue;
        for (const Access& a : terminals[t]) {
          if (passable(a.node)) target[a.node] = 1;
        }
      }
      int reached = -1;
      while (!pq.empty()) {
        const auto [d, n] = pq.top();
        pq.pop();
        if (d != dist[n]) continue;
        if (target[n]) {
          reached = n;
          break;
        }
        const int l = grid_.layer_of(n);
        for (int m : grid_.neighbours(n)) {
          if (!passable(m)) continue;
          long long cost = (grid_.layer_of(m) == l ? 1 : via_cost_) + history_[m];
          if (present > 0) cost *= 1 + static_cast<long long>(present) * occ[m];
          if (d + cost < dist[m]) {
            dist[m] = d + cost;
            prev[m] = n;
            pq.emplace(dist[m], m);
          }
        }
      }
      if (reached < 0) return std::nullopt;
      std::vector<int> path;
      for (int n = reached; n >= 0; n = prev[n]) path.push_back(n);
      if (out.nodes.empty()) {
        connected[0] = 1;
        for (const Access& a : terminals[0]) {
          if (a.node == path.back()) {
            out.accesses.push_back(a);
            break;
          }
        }
      }
      for (std::size_t i = 0; i < path.size(); ++i) {
        add_node(path[i]);
        if (i + 1 < path.size()) out.edges.emplace_back(std::min(path[i], path[i + 1]), std::max(path[i], path[i + 1]));
      }
      absorb();
    }
    std::ranges::sort(out.nodes);
    std::ranges::sort(out.edges);
    out.edges.erase(std::unique(out.edges.begin(), out.edges.end()), out.edges.end());
    return out;
  }

  void bump_history(int n) { ++history_[n]; }

 private:
  static constexpr long long kInf = std::numeric_limits<long long>::max() / 4;
  const RouteGrid& grid_;
  int via_cost_;
  std::vector<long long> history_;
};

Coord hpwl(const Net& net, const std::vector<PlacedShape>& shapes, const std::map<std::string, int>& inst_index) {
  bool first = true;
  Rect box{};
  for (const auto& t : net.terminals) {
    auto it = inst_index.find(t.instance);
    if (it == inst_index.end()) continue;
    for (const auto& s : shapes) {
      if (s.instance != it->second || s.pin != t.pin) continue;
      const Point c = s.rect.center();
      const Rect p{c.x, c.y, c.x, c.y};
      box = first ? p : bbox_union(box, p);
      first = false;
    }
  }
  return box.width() + box.height();
}

}  // namespace

RoutedDesign route_nets(const Testcell& tc, std::span<const Cell> cells, const TechRules& tech, std::vector<Net> nets,
                        const RouteOptions& options, std::span<const Strap> rails, std::span<const Strap> straps) {
  RoutedDesign out;
  out.testcell = tc.name;
  out.die = tc.die;
  out.cell_shapes = place_cell_shapes(tc, cells, tech, nets, &out.warnings);
  out.rails.assign(rails.begin(), rails.end());
  out.straps.assign(straps.begin(), straps.end());

  RouteGrid grid(tech, tc.die, options.min_layer, options.max_layer);
  for (const auto& s : rails) grid.block(s.layer, s.rect, tech.layers[s.layer].min_spacing);
  for (const auto& s : straps) grid.block(s.layer, s.rect, tech.layers[s.layer].min_spacing);

  std::map<std::string, int> net_id;
  std::vector<int> signal_ids;
  for (std::size_t i = 0; i < nets.size(); ++i) {
    net_id.emplace(nets[i].name, static_cast<int>(i));
    if (nets[i].kind == PinKind::Signal && nets[i].terminals.size() >= 2) signal_ids.push_back(static_cast<int>(i));
  }
  for (const auto& s : out.cell_shapes) {
    auto it = net_id.find(s.net);
    const bool routed_pin = !s.pin.empty() && it != net_id.end() && nets[it->second].kind == PinKind::Signal;
    grid.block(s.layer, s.rect, 0, routed_pin ? it->second : RouteGrid::kBlocked);
  }

  std::map<std::string, int> inst_index;
  for (std::size_t i = 0; i < tc.instances.size(); ++i) inst_index.emplace(tc.instances[i].instance_name, static_cast<int>(i));

  // Access points per terminal.
  const int bottom = grid.tech_layer(0);
  const int below_cut = bottom - 1;
  const bool has_below = below_cut >= 1 && tech.layers[below_cut].kind == LayerKind::Cut &&
                         tech.layers[below_cut - 1].kind == LayerKind::Routing;
  std::vector<std::vector<std::vector<Access>>> access(nets.size());
  std::vector<char> pin_blocked(nets.size(), 0);
  for (int id : signal_ids) {
    for (const auto& t : nets[id].terminals) {
      std::vector<Access> points;
      const int inst = inst_index.at(t.instance);
      for (const auto& s : out.cell_shapes) {
        if (s.instance != inst || s.pin != t.pin) continue;
        int l = grid.window_index(s.layer);
        int cut = -1;
        if (l < 0) {
          if (!has_below || s.layer != below_cut - 1) continue;
          l = 0;
          cut = below_cut;
        }
        const auto x0 = std::ranges::lower_bound(grid.xs(), s.rect.x_lo) - grid.xs().begin();
        const auto x1 = std::ranges::upper_bound(grid.xs(), s.rect.x_hi) - grid.xs().begin();
        const auto y0 = std::ranges::lower_bound(grid.ys(), s.rect.y_lo) - grid.ys().begin();
        const auto y1 = std::ranges::upper_bound(grid.ys(), s.rect.y_hi) - grid.ys().begin();
        for (auto iy = y0; iy < y1; ++iy) {
          for (auto ix = x0; ix < x1; ++ix) {
            const int n = grid.node(l, static_cast<int>(ix), static_cast<int>(iy));
            const int f = grid.fixed(n);
            if (f != RouteGrid::kFree && f != id) continue;
            if (cut >= 0) {
              const auto geo = via_geometry(tech, cut, grid.point(n));
              if (!std::ranges::all_of(geo, [&](const auto& g) { return contains(tc.die, g.second); })) continue;
            }
            points.push_back({n, cut});
          }
        }
      }
      std::ranges::sort(points);
      points.erase(std::unique(points.begin(), points.end()), points.end());
      if (points.empty()) pin_blocked[id] = 1;
      access[id].push_back(std::move(points));
    }
  }

  std::vector<int> order;
  for (int id : signal_ids) {
    if (!pin_blocked[id]) order.push_back(id);
  }
  std::vector<Coord> wl(nets.size(), 0);
  for (int id : order) wl[id] = hpwl(nets[id], out.cell_shapes, inst_index);
  std::ranges::sort(order, [&](int a, int b) { return std::tie(wl[a], nets[a].name) < std::tie(wl[b], nets[b].name); });
  std::vector<int> rank(nets.size(), 0);
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<int>(i);

  // Pass 0 routes nets one by one on free nodes. Later passes negotiate:
  // every net is rerouted with sharing allowed at a growing price plus
  // history on overused nodes, and each pass is legalised by keeping
  // overlap-free nets in rank order and retrying the rest on free nodes.
  // The best legal state so far is kept, so open_history never rises.
  Router router(grid, options.via_cost);
  using Routes = std::vector<std::optional<NetRoute>>;
  auto legal_pass = [&](Routes& legal, std::vector<int>& occ, const std::vector<int>& todo) {
    std::vector<int> failed;
    for (int id : todo) {
      if (auto r = router.route(id, access[id], occ, -1)) {
        for (int n : r->nodes) ++occ[n];
        legal[id] = std::move(*r);
      } else {
        failed.push_back(id);
      }
    }
    return failed;
  };

  Routes best(nets.size());
  std::vector<int> best_occ(grid.nodes(), 0);
  std::vector<int> failed = legal_pass(best, best_occ, order);
  out.open_history.push_back(static_cast<int>(failed.size()));

  Routes current = best;
  std::vector<int> occ = best_occ;
  for (int iter = 0; iter < options.max_ripup_iterations && !failed.empty(); ++iter) {
    const int present = iter + 1;
    for (int id : order) {
      if (current[id]) {
        for (int n : current[id]->nodes) --occ[n];
        current[id].reset();
      }
      if (auto r = router.route(id, access[id], occ, present)) {
        for (int n : r->nodes) ++occ[n];
        current[id] = std::move(*r);
      }
    }
    for (int n = 0; n < grid.nodes(); ++n) {
      if (occ[n] > 1) router.bump_history(n);
    }

    Routes legal(nets.size());
    std::vector<int> legal_occ(grid.nodes(), 0);
    std::vector<int> retry;
    for (int id : order) {
      const bool clean = current[id] && std::ranges::all_of(current[id]->nodes, [&](int n) {
        return legal_occ[n] == 0;
      });
      if (!clean) {
        retry.push_back(id);
        continue;
      }
      for (int n : current[id]->nodes) ++legal_occ[n];
      legal[id] = current[id];
    }
    std::vector<int> still_failed = legal_pass(legal, legal_occ, retry);
    if (still_failed.size() < failed.size()) {
      best = std::move(legal);
      failed = std::move(still_failed);
    }
    out.open_history.push_back(static_cast<int>(failed.size()));
  }
  std::ranges::sort(failed, {}, [&](int v) { return rank[v]; });
  const Routes& routes = best;
  for (std::size_t id = 0; id < nets.size(); ++id) {
    if (!routes[id]) continue;
    for (int n : routes[id]->nodes) grid.set_used(n, static_cast<int>(id));
  }

  // Geometry.
  for (std::size_t id = 0; id < nets.size(); ++id) {
    if (!routes[id]) continue;
    const NetRoute& r = *routes[id];
    const std::string& name = nets[id].name;
    std::vector<Wire> wires;
    for (const auto& [a, b] : r.edges) {
      const int la = grid.layer_of(a);
      if (la != grid.layer_of(b)) {
        out.vias.push_back({name, grid.tech_layer(std::min(la, grid.layer_of(b))) + 1, grid.point(a)});
        continue;
      }
      const int t = grid.tech_layer(la);
      const Coord w = tech.layers[t].min_width;
      const Point pa = grid.point(a), pb = grid.point(b);
      wires.push_back({name, t, {std::min(pa.x, pb.x) - w / 2, std::min(pa.y, pb.y) - w / 2,
                                 std::max(pa.x, pb.x) - w / 2 + w, std::max(pa.y, pb.y) - w / 2 + w}});
    }
    // Merge collinear runs on the same track.
    std::ranges::sort(wires, {}, [](const Wire& w) { return std::tie(w.layer, w.rect); });
    std::vector<Wire> merged;
    for (auto& w : wires) {
      if (!merged.empty()) {
        Wire& m = merged.back();
        const bool same_row = m.layer == w.layer && m.rect.y_lo == w.rect.y_lo && m.rect.y_hi == w.rect.y_hi &&
                              w.rect.x_lo <= m.rect.x_hi;
        const bool same_col = m.layer == w.layer && m.rect.x_lo == w.rect.x_lo && m.rect.x_hi == w.rect.x_hi &&
                              w.rect.y_lo <= m.rect.y_hi;
        if (same_row || same_col) {
          m.rect = bbox_union(m.rect, w.rect);
          continue;
        }
      }
      merged.push_back(std::move(w));
    }
    out.wires.insert(out.wires.end(), merged.begin(), merged.end());
    for (const Access& a : r.accesses) {
      if (a.cut >= 0) out.vias.push_back({name, a.cut, grid.point(a.node)});
    }
  }
  std::ranges::sort(out.vias, {}, [](const Via& v) { return std::tie(v.net, v.cut_layer, v.center); });
  out.vias.erase(std::unique(out.vias.begin(), out.vias.end()), out.vias.end());

  for (int id : signal_ids) {
    if (pin_blocked[id]) out.unrouted.push_back({nets[id].name, UnroutedReason::PinBlocked});
  }
  for (int id : failed) out.unrouted.push_back({nets[id].name, UnroutedReason::NoPath});
  std::ranges::sort(out.unrouted, {}, &Unrouted::net);
  out.nets = std::move(nets);
  return out;
}

RoutedDesign route(const Testcell& tc, std::span<const Cell> cells, const TechRules& tech, const RouteOptions& options) {
  std::vector<std::string> warnings;
  auto nets = assign_pin_nets(tc, cells, options.seed, options.net_degree, options.pin_pairing, &warnings);
  const RouteGrid grid(tech, tc.die, options.min_layer, options.max_layer);
  const auto rails = preroute_power(tc, cells, grid, &warnings);
  std::vector<Strap> straps;
  if (options.straps) {
    const auto shapes = place_cell_shapes(tc, cells, tech, nets);
    straps = generate_straps(grid, options.seed, tc.name, rails, shapes, options.strap_density, &warnings);
  }
  RoutedDesign out = route_nets(tc, cells, tech, std::move(nets), options, rails, straps);
  warnings.insert(warnings.end(), out.warnings.begin(), out.warnings.end());
  out.warnings = std::move(warnings);
  return out;
}

std::string dump_routes(const RoutedDesign& design, const TechRules& tech) {
  std::ostringstream out;
  auto line = [&](const std::string& net, int layer, const Rect& r) {
    out << "NEWNET " << net << ' ' << tech.layers.at(layer).name << " ( " << r.x_lo << ' ' << r.y_lo << " ) ( "
        << r.x_hi << ' ' << r.y_hi << " )\n";
  };
  out << "# " << design.testcell << '\n';
  for (const auto& s : design.rails) line(s.net, s.layer, s.rect);
  for (const auto& s : design.straps) line(s.net, s.layer, s.rect);
  for (const auto& w : design.wires) line(w.net, w.layer, w.rect);
  for (const auto& v : design.vias) {
    const auto geo = via_geometry(tech, v.cut_layer, v.center);
    line(v.net, geo.front().first, geo.front().second);
  }
  for (const auto& u : design.unrouted) out << "UNROUTED " << u.net << ' ' << to_string(u.reason) << '\n';
  return out.str();
}

}  // namespace abutcheck

#include "abutcheck/cell_library.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "tokenizer.hpp"

namespace abutcheck {

using detail::Token;
using detail::TokenStream;

std::string_view to_string(PinKind k) {
  switch (k) {
    case PinKind::Signal: return "SIGNAL";
    case PinKind::Power: return "POWER";
    case PinKind::Ground: return "GROUND";
  }
  return "SIGNAL";
}

std::string_view to_string(LayerKind k) { return k == LayerKind::Routing ? "ROUTING" : "CUT"; }

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::Horizontal: return "HORIZONTAL";
    case Direction::Vertical: return "VERTICAL";
    case Direction::None: return "NONE";
  }
  return "NONE";
}

std::optional<int> TechRules::find_layer(std::string_view name) const {
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].name == name) return static_cast<int>(i);
  }
  return std::nullopt;
}

int TechRules::layer_index(std::string_view name) const {
  if (auto i = find_layer(name)) return *i;
  throw std::invalid_argument("unknown layer '" + std::string(name) + "'");
}

namespace {

struct RawCell {
  Cell cell;
  int line = 0;
  bool have_size = false;
  std::vector<std::string> pin_errors;
};

class LefReader {
 public:
  LefReader(std::string_view text, const CellParseOptions& options)
      : ts_(detail::tokenize(text, ";", '#')), opt_(options) {}

  std::vector<RawCell> read() {
    std::vector<RawCell> cells;
    while (!ts_.done()) {
      const Token& t = ts_.next();
      if (t.text == "MACRO") {
        cells.push_back(read_macro());
      } else if (t.text == "END") {
        if (!ts_.accept("LIBRARY")) ts_.fail_at(t, "unexpected END at top level");
      } else if (t.text == "UNITS" || t.text == "PROPERTYDEFINITIONS") {
        skip_block_until_end(t.text);
      } else if (t.text == "SITE" || t.text == "LAYER" || t.text == "VIA") {
        skip_block_until_end(ts_.next().text);
      } else {
        ts_.skip_statement();
      }
    }
    return cells;
  }

 private:
  void skip_block_until_end(const std::string& name) {
    while (true) {
      const Token& t = ts_.next();
      if (t.text == "END" && ts_.peek_is(name)) {
        ts_.next();
        return;
      }
    }
  }

  Coord dbu(const Token& t) { return detail::to_dbu(detail::parse_decimal(t), opt_.units_per_micron); }

  RawCell read_macro() {
    RawCell raw;
    const Token& name = ts_.next();
    raw.cell.name = name.text;
    raw.line = name.line;
    while (true) {
      const Token& t = ts_.next();
      if (t.text == "SIZE") {
        raw.cell.width = dbu(ts_.next());
        ts_.expect("BY");
        raw.cell.height = dbu(ts_.next());
        ts_.expect(";");
        raw.have_size = true;
      } else if (t.text == "PIN") {
        raw.cell.pins.push_back(read_pin());
      } else if (t.text == "OBS") {
        read_geometry(raw.cell.obstructions, false);
      } else if (t.text == "END") {
        const Token& end_name = ts_.next();
        if (end_name.text != raw.cell.name) {
          ts_.fail_at(end_name, "expected 'END " + raw.cell.name + "', found 'END " + end_name.text + "'");
        }
        return raw;
      } else if (t.text == "MACRO" || t.text == ";") {
        ts_.fail_at(t, "unexpected '" + t.text + "' inside MACRO " + raw.cell.name);
      } else {
        ts_.skip_statement();
      }
    }
  }

  Pin read_pin() {
    Pin pin;
    pin.name = ts_.next().text;
    std::optional<PinKind> use;
    while (true) {
      const Token& t = ts_.next();
      if (t.text == "USE") {
        const Token& k = ts_.next();
        if (k.text == "POWER") {
          use = PinKind::Power;
        } else if (k.text == "GROUND") {
          use = PinKind::Ground;
        } else if (k.text == "SIGNAL" || k.text == "CLOCK" || k.text == "ANALOG" || k.text == "TIEOFF") {
          use = PinKind::Signal;
        } else {
          ts_.fail_at(k, "unknown USE '" + k.text + "'");
        }
        ts_.expect(";");
      } else if (t.text == "PORT") {
        read_geometry(pin.shapes, true);
      } else if (t.text == "END") {
        const Token& end_name = ts_.next();
        if (end_name.text != pin.name) {
          ts_.fail_at(end_name, "expected 'END " + pin.name + "', found 'END " + end_name.text + "'");
        }
        break;
      } else if (t.text == "PIN" || t.text == "MACRO" || t.text == ";") {
        ts_.fail_at(t, "unexpected '" + t.text + "' inside PIN " + pin.name);
      } else {
        ts_.skip_statement();
      }
    }
    pin.kind = use ? *use : classify_by_name(pin.name);
    return pin;
  }

  PinKind classify_by_name(const std::string& name) const {
    for (const auto& p : opt_.power_patterns) {
      if (name.starts_with(p)) return PinKind::Power;
    }
    for (const auto& p : opt_.ground_patterns) {
      if (name.starts_with(p)) return PinKind::Ground;
    }
    return PinKind::Signal;
  }

  void read_geometry(std::vector<LayerRect>& out, bool is_port) {
    std::optional<std::string> layer;
    int layer_mask = 0;
    while (true) {
      const Token& t = ts_.next();
      if (t.text == "LAYER") {
        layer = ts_.next().text;
        layer_mask = 0;
        if (ts_.accept("MASK")) layer_mask = read_mask();
        while (!ts_.accept(";")) ts_.next();  // SPACING / DESIGNRULEWIDTH qualifiers
      } else if (t.text == "RECT") {
        if (!layer) ts_.fail_at(t, "RECT before LAYER");
        int mask = layer_mask;
        if (ts_.accept("MASK")) mask = read_mask();
        const Coord x1 = dbu(ts_.next());
        const Coord y1 = dbu(ts_.next());
        const Coord x2 = dbu(ts_.next());
        const Coord y2 = dbu(ts_.next());
        ts_.expect(";");
        out.push_back({*layer, make_rect(x1, y1, x2, y2), mask});
      } else if (t.text == "END") {
        if (is_port) ts_.accept("PORT");
        return;
      } else if (t.text == "POLYGON" || t.text == "PATH" || t.text == "VIA") {
        ts_.fail_at(t, t.text + " geometry is not supported; use RECT");
      } else if (t.text == "WIDTH") {
        ts_.skip_statement();
      } else {
        ts_.fail_at(t, "unexpected '" + t.text + "' in geometry block");
      }
    }
  }

  int read_mask() {
    const Token& m = ts_.next();
    const long long v = detail::parse_integer(m);
    if (v != 1 && v != 2) ts_.fail_at(m, "MASK must be 1 or 2");
    return static_cast<int>(v);
  }

  TokenStream ts_;
  const CellParseOptions& opt_;
};

bool touches_rail_band(const Pin& pin, const Cell& cell) {
  const Coord row = cell.row_height();
  for (const auto& s : pin.shapes) {
    for (int k = 0; k <= cell.height_rows; ++k) {
      const Coord y = k * row;
      if (s.rect.y_lo <= y && y <= s.rect.y_hi) return true;
    }
  }
  return false;
}

}  // namespace

CellLibrary parse_cells(std::string_view text, const CellParseOptions& options) {
  std::vector<RawCell> raw = LefReader(text, options).read();
  CellLibrary lib;

  Coord row = options.site_row_height;
  if (row <= 0) {
    for (const auto& r : raw) {
      if (r.have_size && r.cell.height > 0 && (row <= 0 || r.cell.height < row)) row = r.cell.height;
    }
  }

  std::set<std::string> seen;
  for (auto& r : raw) {
    auto reject = [&](const std::string& why) {
      lib.diagnostics.push_back({Diagnostic::Severity::RejectedCell, r.line, r.cell.name, why});
    };
    Cell& c = r.cell;
    if (!seen.insert(c.name).second) {
      reject("duplicate MACRO name");
      continue;
    }
    if (!r.have_size) {
      reject("missing SIZE");
      continue;
    }
    if (c.width <= 0 || c.height <= 0) {
      reject("non-positive cell size");
      continue;
    }
    if (row <= 0 || c.height % row != 0) {
      reject("height " + std::to_string(c.height) + " is not an integer multiple of the site row height " +
             std::to_string(row));
      continue;
    }
    c.height_rows = static_cast<int>(c.height / row);
    std::string bad;
    for (const auto& pin : c.pins) {
      if (pin.shapes.empty()) {
        bad = "pin " + pin.name + " has no shapes";
        break;
      }
      for (const auto& s : pin.shapes) {
        if (!contains(c.bbox(), s.rect)) {
          bad = "pin " + pin.name + " shape lies outside the cell bbox";
          break;
        }
      }
      if (!bad.empty()) break;
    }
    if (!bad.empty()) {
      reject(bad);
      continue;
    }
    for (const auto& pin : c.pins) {
      if (pin.kind != PinKind::Signal && !touches_rail_band(pin, c)) {
        lib.diagnostics.push_back({Diagnostic::Severity::Warning, r.line, c.name,
                                   "supply pin " + pin.name + " does not reach a rail band"});
      }
    }
    if (!c.pins.empty() && c.obstructions.empty()) {
      lib.diagnostics.push_back({Diagnostic::Severity::Warning, r.line, c.name,
                                 "cell has pins but no obstructions; abstract-only views can hide "
                                 "boundary spacing problems"});
    }
    lib.cells.push_back(std::move(c));
  }
  return lib;
}

std::string emit_cells(std::span<const Cell> cells, int units_per_micron) {
  auto um = [&](Coord v) { return detail::format_microns(v, units_per_micron); };
  std::ostringstream out;
  auto shapes = [&](const std::vector<LayerRect>& v, const char* indent) {
    for (const auto& s : v) {
      out << indent << "LAYER " << s.layer;
      if (s.mask != 0) out << " MASK " << s.mask;
      out << " ;\n"
          << indent << "RECT " << um(s.rect.x_lo) << ' ' << um(s.rect.y_lo) << ' ' << um(s.rect.x_hi) << ' '
          << um(s.rect.y_hi) << " ;\n";
    }
  };
  for (const auto& c : cells) {
    out << "MACRO " << c.name << "\n";
    out << "  SIZE " << um(c.width) << " BY " << um(c.height) << " ;\n";
    for (const auto& p : c.pins) {
      out << "  PIN " << p.name << "\n";
      out << "    USE " << to_string(p.kind) << " ;\n";
      out << "    PORT\n";
      shapes(p.shapes, "      ");
      out << "    END\n";
      out << "  END " << p.name << "\n";
    }
    if (!c.obstructions.empty()) {
      out << "  OBS\n";
      shapes(c.obstructions, "    ");
      out << "  END\n";
    }
    out << "END " << c.name << "\n";
  }
  return out.str();
}

TechRules parse_tech_rules(std::string_view text, std::vector<Diagnostic>* warnings) {
  auto tokens = detail::tokenize(text, "", '#');
  std::vector<std::vector<Token>> lines;
  for (auto& t : tokens) {
    if (lines.empty() || lines.back().front().line != t.line) lines.emplace_back();
    lines.back().push_back(std::move(t));
  }
  auto warn = [&](int line, const std::string& subject, const std::string& msg) {
    if (warnings) warnings->push_back({Diagnostic::Severity::Warning, line, subject, msg});
  };

  TechRules tech;
  for (const auto& l : lines) {
    if (l[0].text == "UNITS") {
      if (l.size() != 2) throw ParseError("UNITS takes one integer", l[0].line);
      const long long u = detail::parse_integer(l[1]);
      if (u <= 0) throw ParseError("UNITS must be positive", l[1].line, l[1].column);
      tech.units_per_micron = static_cast<int>(u);
    }
  }
  auto dbu = [&](const Token& t) { return detail::to_dbu(detail::parse_decimal(t), tech.units_per_micron); };

  for (const auto& l : lines) {
    const Token& head = l[0];
    if (head.text == "UNITS") continue;
    if (head.text == "SITEROW") {
      if (l.size() != 2) throw ParseError("SITEROW takes one value", head.line);
      tech.site_row_height = dbu(l[1]);
      continue;
    }
    if (head.text != "LAYER") throw ParseError("unknown directive '" + head.text + "'", head.line, head.column);
    if (l.size() < 3) throw ParseError("LAYER needs a name and a kind", head.line);

    LayerRule rule;
    rule.name = l[1].text;
    if (tech.find_layer(rule.name)) throw ParseError("duplicate layer '" + rule.name + "'", l[1].line, l[1].column);
    if (l[2].text == "ROUTING") {
      rule.kind = LayerKind::Routing;
    } else if (l[2].text == "CUT") {
      rule.kind = LayerKind::Cut;
    } else {
      throw ParseError("unknown layer kind '" + l[2].text + "'", l[2].line, l[2].column);
    }
    std::size_t i = 3;
    if (i < l.size() && (l[i].text == "HORIZONTAL" || l[i].text == "VERTICAL")) {
      rule.direction = l[i].text == "HORIZONTAL" ? Direction::Horizontal : Direction::Vertical;
      ++i;
    }
    if (rule.kind == LayerKind::Routing && rule.direction == Direction::None) {
      throw ParseError("routing layer '" + rule.name + "' needs HORIZONTAL or VERTICAL", head.line);
    }
    std::optional<Coord> same_net, enclosed;
    bool have_pitch = false, have_width = false, have_spacing = false;
    for (; i < l.size(); i += 2) {
      if (i + 1 >= l.size()) throw ParseError("missing value for '" + l[i].text + "'", l[i].line, l[i].column);
      const std::string& key = l[i].text;
      const Coord v = dbu(l[i + 1]);
      if (v < 0) throw ParseError("negative value for " + key, l[i + 1].line, l[i + 1].column);
      if (key == "PITCH") {
        rule.pitch = v;
        have_pitch = true;
      } else if (key == "WIDTH") {
        rule.min_width = v;
        have_width = true;
      } else if (key == "SPACING") {
        rule.min_spacing = v;
        have_spacing = true;
      } else if (key == "SAMENETSPACING") {
        same_net = v;
      } else if (key == "DPSPACING") {
        rule.dp_spacing = v;
      } else if (key == "ENCLOSURE") {
        rule.via_enclosure = v;
      } else if (key == "MINENCLOSEDWIDTH") {
        enclosed = v;
      } else {
        throw ParseError("unknown layer keyword '" + key + "'", l[i].line, l[i].column);
      }
    }
    if (!have_pitch || !have_width || !have_spacing) {
      throw ParseError("layer '" + rule.name + "' needs PITCH, WIDTH and SPACING", head.line);
    }
    rule.same_net_spacing = same_net.value_or(rule.min_spacing);
    rule.min_enclosed_width = enclosed.value_or(rule.min_width);
    if (rule.kind == LayerKind::Routing && rule.pitch < rule.min_width + rule.min_spacing) {
      warn(head.line, rule.name, "pitch is smaller than width + spacing");
    }
    if (!tech.layers.empty() && tech.layers.back().kind == rule.kind) {
      warn(head.line, rule.name, "layer stack does not alternate routing and cut layers");
    }
    tech.layers.push_back(std::move(rule));
  }
  return tech;
}

std::string emit_tech_rules(const TechRules& tech) {
  auto um = [&](Coord v) { return detail::format_microns(v, tech.units_per_micron); };
  std::ostringstream out;
  out << "UNITS " << tech.units_per_micron << "\n";
  out << "SITEROW " << um(tech.site_row_height) << "\n";
  for (const auto& l : tech.layers) {
    out << "LAYER " << l.name << ' ' << to_string(l.kind);
    if (l.direction != Direction::None) out << ' ' << to_string(l.direction);
    out << " PITCH " << um(l.pitch) << " WIDTH " << um(l.min_width) << " SPACING " << um(l.min_spacing)
        << " SAMENETSPACING " << um(l.same_net_spacing) << " DPSPACING " << um(l.dp_spacing) << " ENCLOSURE "
        << um(l.via_enclosure) << " MINENCLOSEDWIDTH " << um(l.min_enclosed_width) << "\n";
  }
  return out.str();
}

LibraryProfile profile_library(std::span<const Cell> cells) {
  if (cells.empty()) throw std::invalid_argument("cannot profile an empty library");
  LibraryProfile profile;
  profile.min_width = std::ranges::min(cells, {}, &Cell::width).width;
  if (profile.min_width <= 0) throw std::invalid_argument("cell widths must be positive");
  std::map<long long, long long> counts;
  for (const auto& c : cells) {
    ProfileEntry e{c.width, c.height, c.height_rows, {}};
    for (const auto& p : c.pins) e.pin_names.push_back(p.name);
    profile.entries[c.name] = std::move(e);
    ++counts[c.width / profile.min_width];
  }
  for (auto [bucket, n] : counts) {
    profile.width_histogram[bucket] = static_cast<double>(n) / static_cast<double>(cells.size());
  }
  return profile;
}

}  // namespace abutcheck

#include "abutcheck/design_io.hpp"

#include <set>
#include <sstream>
#include <stdexcept>

#include "tokenizer.hpp"

namespace abutcheck {

using detail::Token;
using detail::TokenStream;

std::vector<NetlistModule> netlist_modules(std::span<const Testcell> testcells, std::string_view top_name) {
  std::vector<NetlistModule> out;
  NetlistModule top{std::string(top_name), {}, {}};
  int index = 1;
  for (const auto& tc : testcells) {
    NetlistModule m{tc.name, {}, {}};
    for (const auto& inst : tc.instances) m.instances.emplace_back(inst.instance_name, inst.cell_name);
    out.push_back(std::move(m));
    top.submodule_instances.emplace_back("U" + std::to_string(index++), tc.name);
  }
  out.push_back(std::move(top));
  return out;
}

std::string emit_verilog(std::span<const NetlistModule> modules) {
  std::ostringstream out;
  bool first = true;
  for (const auto& m : modules) {
    if (!first) out << "\n";
    first = false;
    out << "module " << m.name << " ();\n";
    for (const auto& [inst, cell] : m.instances) out << "  " << cell << ' ' << inst << " (.*);\n";
    for (const auto& [inst, mod] : m.submodule_instances) out << "  " << mod << ' ' << inst << " ();\n";
    out << "endmodule\n";
  }
  return out.str();
}

std::string emit_verilog(std::span<const Testcell> testcells, std::string_view top_name) {
  return emit_verilog(netlist_modules(testcells, top_name));
}

std::vector<NetlistModule> parse_verilog(std::string_view text) {
  TokenStream ts(detail::tokenize(text, "();.*", '\0'));
  std::vector<NetlistModule> out;
  std::set<std::string> names;
  // Placeholder names such as <typeA> are accepted as identifiers.
  auto identifier = [&](const Token& t) {
    if (t.text.size() == 1 && std::string_view("();.*").find(t.text[0]) != std::string_view::npos) {
      ts.fail_at(t, "expected identifier, found '" + t.text + "'");
    }
    if (t.text == "module" || t.text == "endmodule") ts.fail_at(t, "unexpected '" + t.text + "'");
    return t.text;
  };
  while (!ts.done()) {
    const Token& kw = ts.next();
    if (kw.text == "endmodule") ts.fail_at(kw, "endmodule without module");
    if (kw.text != "module") ts.fail_at(kw, "expected 'module', found '" + kw.text + "'");
    NetlistModule m;
    m.name = identifier(ts.next());
    ts.expect("(");
    ts.expect(")");
    ts.expect(";");
    while (true) {
      if (ts.done()) ts.fail("module " + m.name + " is missing endmodule");
      const Token& t = ts.next();
      if (t.text == "endmodule") break;
      if (t.text == "module") ts.fail_at(t, "nested module inside " + m.name + " (missing endmodule)");
      const std::string type = identifier(t);
      const std::string inst = identifier(ts.next());
      ts.expect("(");
      if (ts.accept(")")) {
        m.submodule_instances.emplace_back(inst, type);
      } else {
        ts.expect(".");
        ts.expect("*");
        ts.expect(")");
        m.instances.emplace_back(inst, type);
      }
      ts.expect(";");
    }
    if (!names.insert(m.name).second) ts.fail("duplicate module '" + m.name + "'");
    out.push_back(std::move(m));
  }
  return out;
}

DefDesign to_def_design(const Testcell& tc, Coord die_margin) {
  DefDesign d;
  d.design_name = tc.name;
  d.die = expanded(tc.die, die_margin);
  for (const auto& inst : tc.instances) {
    d.components.push_back({inst.instance_name, inst.cell_name, inst.origin.x, inst.origin.y, inst.orientation});
  }
  return d;
}

DefDesign combined_def_design(std::span<const Testcell> testcells, std::string_view top_name, Coord die_margin) {
  DefDesign d;
  d.design_name = std::string(top_name);
  Coord y = 0;
  Rect die{0, 0, 0, 0};
  int index = 1;
  for (const auto& tc : testcells) {
    const std::string prefix = "U" + std::to_string(index++) + "/";
    for (const auto& inst : tc.instances) {
      d.components.push_back(
          {prefix + inst.instance_name, inst.cell_name, inst.origin.x, inst.origin.y + y, inst.orientation});
    }
    die = bbox_union(die, Rect{tc.die.x_lo, tc.die.y_lo + y, tc.die.x_hi, tc.die.y_hi + y});
    const int rows = tc.rows + tc.rows % 2;
    y += rows * tc.row_height;
  }
  d.die = expanded(die, die_margin);
  return d;
}

std::string emit_def(const DefDesign& d) {
  std::ostringstream out;
  out << "VERSION 5.6 ;\n";
  out << "DESIGN " << d.design_name << " ;\n";
  out << "UNITS DISTANCE MICRONS " << d.units_per_micron << " ;\n";
  out << "COMPONENTS " << d.components.size() << " ;\n";
  for (const auto& c : d.components) {
    out << "- " << c.name << ' ' << c.cell << " + PLACED ( " << c.x << ' ' << c.y << " ) " << to_def(c.orientation)
        << " ;\n";
  }
  out << "END COMPONENTS\n";
  out << "DIEAREA ( " << d.die.x_lo << ' ' << d.die.y_lo << " ) ( " << d.die.x_hi << ' ' << d.die.y_hi << " ) ;\n";
  out << "END DESIGN\n";
  return out.str();
}

DefDesign parse_def(std::string_view text) {
  TokenStream ts(detail::tokenize(text, ";()", '#'));
  DefDesign d;
  bool have_design = false;
  auto coord = [&]() { return static_cast<Coord>(detail::parse_integer(ts.next())); };
  auto point = [&]() {
    ts.expect("(");
    const Coord x = coord();
    const Coord y = coord();
    ts.expect(")");
    return Point{x, y};
  };
  while (!ts.done()) {
    const Token& t = ts.next();
    if (t.text == "DESIGN") {
      d.design_name = ts.next().text;
      ts.expect(";");
      have_design = true;
    } else if (t.text == "UNITS") {
      ts.expect("DISTANCE");
      ts.expect("MICRONS");
      d.units_per_micron = static_cast<int>(detail::parse_integer(ts.next()));
      ts.expect(";");
    } else if (t.text == "DIEAREA") {
      const Point a = point();
      const Point b = point();
      ts.expect(";");
      d.die = make_rect(a.x, a.y, b.x, b.y);
    } else if (t.text == "COMPONENTS") {
      const Token& count_tok = ts.next();
      const long long expected = detail::parse_integer(count_tok);
      ts.expect(";");
      while (ts.accept("-")) {
        DefComponent c;
        c.name = ts.next().text;
        c.cell = ts.next().text;
        while (!ts.peek_is(";")) {
          const Token& opt = ts.next();
          if (opt.text != "+") ts.fail_at(opt, "expected '+', found '" + opt.text + "'");
          const Token& kind = ts.next();
          if (kind.text == "PLACED" || kind.text == "FIXED") {
            const Point p = point();
            c.x = p.x;
            c.y = p.y;
            const Token& o = ts.next();
            try {
              c.orientation = orientation_from_def(o.text);
            } catch (const std::invalid_argument&) {
              ts.fail_at(o, "unknown orientation '" + o.text + "'");
            }
          } else {
            ts.fail_at(kind, "unsupported component attribute '" + kind.text + "'");
          }
        }
        ts.expect(";");
        d.components.push_back(std::move(c));
      }
      const Token& end = ts.expect("END");
      ts.expect("COMPONENTS");
      if (static_cast<long long>(d.components.size()) != expected) {
        ts.fail_at(end, "COMPONENTS header declares " + std::to_string(expected) + " but " +
                            std::to_string(d.components.size()) + " are listed");
      }
    } else if (t.text == "END") {
      ts.expect("DESIGN");
      break;
    } else {
      ts.skip_statement();  // VERSION, TECHNOLOGY, DIVIDERCHAR, ...
    }
  }
  if (!have_design) throw ParseError("missing DESIGN statement", ts.line());
  return d;
}

}  // namespace abutcheck

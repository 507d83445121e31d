#include "abutcheck/abutment.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace abutcheck {

namespace {

// Bit 0 mirrors x (MY), bit 1 mirrors y (MX).
constexpr unsigned bits(Orientation o) {
  switch (o) {
    case Orientation::R0: return 0;
    case Orientation::MY: return 1;
    case Orientation::MX: return 2;
    case Orientation::R180: return 3;
  }
  return 0;
}

constexpr Orientation from_bits(unsigned b) {
  constexpr Orientation table[] = {Orientation::R0, Orientation::MY, Orientation::MX, Orientation::R180};
  return table[b & 3];
}

InstancePlacement place(const Cell& c, int index, Coord x, int row, Coord row_height, Orientation o) {
  return {"U" + std::to_string(index), c.name, {x, row * row_height}, o, row, c.width, c.height, c.height_rows};
}

void finish(Testcell& tc) {
  Rect die{0, 0, 0, 0};
  for (const auto& inst : tc.instances) die = bbox_union(die, inst.bbox());
  tc.die = die;
}

}  // namespace

Orientation compose(Orientation a, Orientation b) { return from_bits(bits(a) ^ bits(b)); }

std::string_view to_string(Orientation o) {
  switch (o) {
    case Orientation::R0: return "R0";
    case Orientation::R180: return "R180";
    case Orientation::MX: return "MX";
    case Orientation::MY: return "MY";
  }
  return "R0";
}

std::string_view to_def(Orientation o) {
  switch (o) {
    case Orientation::R0: return "N";
    case Orientation::R180: return "S";
    case Orientation::MX: return "FS";
    case Orientation::MY: return "FN";
  }
  return "N";
}

Orientation orientation_from_def(std::string_view code) {
  if (code == "N") return Orientation::R0;
  if (code == "S") return Orientation::R180;
  if (code == "FS") return Orientation::MX;
  if (code == "FN") return Orientation::MY;
  throw std::invalid_argument("unknown orientation '" + std::string(code) + "'");
}

Rect apply_orientation(const Rect& r, Orientation o, Coord cell_w, Coord cell_h) {
  Rect out = r;
  const unsigned b = bits(o);
  if (b & 1) {
    out.x_lo = cell_w - r.x_hi;
    out.x_hi = cell_w - r.x_lo;
  }
  if (b & 2) {
    out.y_lo = cell_h - r.y_hi;
    out.y_hi = cell_h - r.y_lo;
  }
  return out;
}

std::string_view to_string(TestcellKind k) {
  switch (k) {
    case TestcellKind::TypeAA: return "TYPE_AA";
    case TestcellKind::TypeAB: return "TYPE_AB";
    case TestcellKind::TypeMulti: return "TYPE_MULTI";
  }
  return "TYPE_AA";
}

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::SingleCellOnly: return "single_cell_only";
    case Mode::CellByCellOnly: return "cell_by_cell_only";
    case Mode::AllComboInOneCellOnly: return "all_combo_in_one_cell_only";
    case Mode::All: return "all";
  }
  return "all";
}

Mode mode_from_string(std::string_view s) {
  for (Mode m : {Mode::SingleCellOnly, Mode::CellByCellOnly, Mode::AllComboInOneCellOnly, Mode::All}) {
    if (to_string(m) == s) return m;
  }
  throw std::invalid_argument("unknown mode '" + std::string(s) + "'");
}

Testcell make_type_aa(const Cell& cell) {
  Testcell tc;
  tc.name = "scell_" + cell.name;
  tc.kind = TestcellKind::TypeAA;
  tc.rows = cell.height_rows;
  tc.row_height = cell.row_height();
  const Orientation seq[] = {Orientation::R0, Orientation::MY, Orientation::MY, Orientation::R0};
  for (int i = 0; i < 4; ++i) {
    tc.instances.push_back(place(cell, i + 1, i * cell.width, 0, tc.row_height, seq[i]));
  }
  finish(tc);
  return tc;
}

Testcell make_type_ab(const Cell& a, const Cell& b) {
  if (a.height_rows != 1 || b.height_rows != 1) {
    throw std::invalid_argument("type A-B testcells need single-height cells");
  }
  if (a.height != b.height) throw std::invalid_argument("cells " + a.name + " and " + b.name + " differ in height");
  Testcell tc;
  tc.name = "scell_" + a.name + "_" + b.name;
  tc.kind = TestcellKind::TypeAB;
  tc.rows = 1;
  tc.row_height = a.height;
  const std::pair<const Cell*, Orientation> seq[] = {{&b, Orientation::R0},
                                                     {&a, Orientation::R0},
                                                     {&b, Orientation::MY},
                                                     {&a, Orientation::MY},
                                                     {&b, Orientation::R0}};
  Coord x = 0;
  int index = 1;
  for (const auto& [cell, o] : seq) {
    tc.instances.push_back(place(*cell, index++, x, 0, tc.row_height, o));
    x += cell->width;
  }
  finish(tc);
  return tc;
}

Testcell make_multi(const Cell& multi, const Cell& single) {
  const int k = multi.height_rows;
  if (k < 2) throw std::invalid_argument("cell " + multi.name + " is single-height; use a type A-B testcell");
  if (single.height_rows != 1) throw std::invalid_argument("cell " + single.name + " is not single-height");
  if (multi.height != k * single.height) {
    throw std::invalid_argument("row heights of " + multi.name + " and " + single.name + " disagree");
  }
  Testcell tc;
  tc.name = "mcell_" + multi.name + "_" + single.name;
  tc.kind = TestcellKind::TypeMulti;
  tc.rows = k;
  tc.row_height = single.height;

  Coord x = 0;
  int index = 1;
  auto stack = [&](Orientation base) {
    for (int r = 0; r < k; ++r) {
      const Orientation o = r % 2 == 0 ? base : compose(base, Orientation::MX);
      tc.instances.push_back(place(single, index++, x, r, tc.row_height, o));
    }
    x += single.width;
  };
  auto tall = [&](Orientation o) {
    tc.instances.push_back(place(multi, index++, x, 0, tc.row_height, o));
    x += multi.width;
  };
  stack(Orientation::R0);
  tall(Orientation::R0);
  stack(Orientation::MY);
  tall(Orientation::MY);
  stack(Orientation::R0);
  finish(tc);
  return tc;
}

std::vector<Testcell> enumerate_library(std::span<const Cell> cells, Mode mode) {
  if (cells.empty()) throw std::invalid_argument("cannot enumerate an empty library");
  std::vector<const Cell*> sorted;
  for (const auto& c : cells) sorted.push_back(&c);
  std::ranges::sort(sorted, {}, &Cell::name);
  std::vector<const Cell*> singles, multis;
  for (const Cell* c : sorted) (c->height_rows == 1 ? singles : multis).push_back(c);

  const bool want_aa = mode != Mode::CellByCellOnly;
  const bool want_pairs = mode != Mode::SingleCellOnly;
  std::vector<Testcell> out;
  if (want_aa) {
    for (const Cell* c : sorted) out.push_back(make_type_aa(*c));
  }
  if (want_pairs) {
    for (std::size_t i = 0; i < singles.size(); ++i) {
      for (std::size_t j = i + 1; j < singles.size(); ++j) out.push_back(make_type_ab(*singles[i], *singles[j]));
    }
    for (const Cell* m : multis) {
      for (const Cell* s : singles) {
        if (m->height == m->height_rows * s->height) out.push_back(make_multi(*m, *s));
      }
    }
  }
  if (mode == Mode::AllComboInOneCellOnly) {
    for (auto& tc : out) tc.in_combined_top = true;
  }
  return out;
}

std::int64_t predicted_cell_count(std::int64_t n, CountMethod method) {
  switch (method) {
    case CountMethod::Conventional: return 8 * n + 8 * (n - 1) * n;
    case CountMethod::Synopsys: return 6 * n + 6 * (n - 1) * n;
    case CountMethod::Ours: return 4 * n + 5 * (n - 1) * n / 2;
  }
  return 0;
}

AdjacencyClass mirror(const AdjacencyClass& p) {
  return {{p.right.cell, p.right.slice, compose(Orientation::MY, p.right.orientation)},
          {p.left.cell, p.left.slice, compose(Orientation::MY, p.left.orientation)}};
}

AdjacencyClass canonicalize(const AdjacencyClass& p) { return std::min(p, mirror(p)); }

std::set<AdjacencyClass> coverage_classes(std::span<const Cell> cells) {
  std::set<AdjacencyClass> out;
  // Same-row pairs on an even row; odd rows are the vertical flip of these.
  auto even_row_pairs = [&](const std::string& l, int ls, const std::string& r, int rs) {
    for (Orientation ol : {Orientation::R0, Orientation::MY}) {
      for (Orientation orr : {Orientation::R0, Orientation::MY}) out.insert(canonicalize({{l, ls, ol}, {r, rs, orr}}));
    }
  };
  std::vector<const Cell*> singles, multis;
  for (const auto& c : cells) (c.height_rows == 1 ? singles : multis).push_back(&c);
  for (const Cell* c : singles) even_row_pairs(c->name, 0, c->name, 0);
  for (const Cell* m : multis) {
    for (int s = 0; s < m->height_rows; ++s) even_row_pairs(m->name, s, m->name, s);
  }
  for (const Cell* a : singles) {
    for (const Cell* b : singles) {
      if (a->name != b->name) even_row_pairs(a->name, 0, b->name, 0);
    }
  }
  for (const Cell* m : multis) {
    for (const Cell* s : singles) {
      if (m->height != m->height_rows * s->height) continue;
      for (int r = 0; r < m->height_rows; ++r) {
        for (Orientation om : {Orientation::R0, Orientation::MY}) {
          for (Orientation os : kAllOrientations) {
            if (!legal_in_row(os, r)) continue;
            out.insert(canonicalize({{m->name, r, om}, {s->name, 0, os}}));
            out.insert(canonicalize({{s->name, 0, os}, {m->name, r, om}}));
          }
        }
      }
    }
  }
  return out;
}

std::set<AdjacencyClass> realized_classes(const Testcell& tc) {
  std::set<AdjacencyClass> out;
  for (int r = 0; r < tc.rows; ++r) {
    std::vector<const InstancePlacement*> row;
    for (const auto& inst : tc.instances) {
      if (inst.row_index <= r && r < inst.row_index + inst.height_rows) row.push_back(&inst);
    }
    std::ranges::sort(row, {}, [](const InstancePlacement* p) { return p->origin.x; });
    for (std::size_t i = 0; i + 1 < row.size(); ++i) {
      const auto* l = row[i];
      const auto* rr = row[i + 1];
      if (l->origin.x + l->width != rr->origin.x) continue;
      const int ls = l->height_rows == 1 ? 0 : r - l->row_index;
      const int rs = rr->height_rows == 1 ? 0 : r - rr->row_index;
      out.insert(canonicalize({{l->cell_name, ls, l->orientation}, {rr->cell_name, rs, rr->orientation}}));
    }
  }
  return out;
}

}  // namespace abutcheck

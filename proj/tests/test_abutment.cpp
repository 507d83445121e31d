#include <gtest/gtest.h>

#include <random>

#include "abutcheck/abutment.hpp"

using namespace abutcheck;

namespace {

Cell single(const std::string& name, Coord w, int rows = 1) {
  Cell c;
  c.name = name;
  c.width = w;
  c.height = 1000 * rows;
  c.height_rows = rows;
  return c;
}

std::vector<Cell> library(int n, Coord w = 200) {
  std::vector<Cell> cells;
  for (int i = 0; i < n; ++i) cells.push_back(single("C" + std::to_string(i), w + 100 * (i % 3)));
  return cells;
}

std::int64_t instance_total(const std::vector<Testcell>& tcs) {
  std::int64_t total = 0;
  for (const auto& tc : tcs) total += static_cast<std::int64_t>(tc.instances.size());
  return total;
}

// Independent oracle: every ordered pair of single-height cells in the two
// even-row orientations, reduced by the mirror relation written out here.
std::set<AdjacencyClass> brute_force_classes(const std::vector<Cell>& cells) {
  const Orientation even[] = {Orientation::R0, Orientation::MY};
  auto flip = [](Orientation o) { return o == Orientation::R0 ? Orientation::MY : Orientation::R0; };
  std::set<AdjacencyClass> out;
  for (const auto& l : cells) {
    for (const auto& r : cells) {
      for (Orientation ol : even) {
        for (Orientation orr : even) {
          AdjacencyClass p{{l.name, 0, ol}, {r.name, 0, orr}};
          AdjacencyClass m{{r.name, 0, flip(orr)}, {l.name, 0, flip(ol)}};
          out.insert(std::min(p, m));
        }
      }
    }
  }
  return out;
}

void expect_gap_free_rows(const Testcell& tc) {
  for (std::size_t i = 0; i < tc.instances.size(); ++i) {
    const auto& a = tc.instances[i];
    EXPECT_TRUE(contains(tc.die, a.bbox())) << tc.name;
    for (std::size_t j = i + 1; j < tc.instances.size(); ++j) {
      EXPECT_FALSE(overlaps_interior(a.bbox(), tc.instances[j].bbox())) << tc.name;
    }
    if (a.height_rows == 1) {
      EXPECT_TRUE(legal_in_row(a.orientation, a.row_index)) << tc.name << " " << a.instance_name;
    }
  }
  for (int row = 0; row < tc.rows; ++row) {
    std::vector<std::pair<Coord, Coord>> spans;
    const Coord y = tc.die.y_lo + row * tc.row_height + tc.row_height / 2;
    for (const auto& inst : tc.instances) {
      if (inst.bbox().y_lo <= y && y <= inst.bbox().y_hi) spans.emplace_back(inst.bbox().x_lo, inst.bbox().x_hi);
    }
    std::ranges::sort(spans);
    ASSERT_FALSE(spans.empty());
    EXPECT_EQ(spans.front().first, tc.die.x_lo);
    EXPECT_EQ(spans.back().second, tc.die.x_hi);
    for (std::size_t k = 1; k < spans.size(); ++k) EXPECT_EQ(spans[k].first, spans[k - 1].second) << tc.name;
  }
}

}  // namespace

TEST(Abutment, ApplyOrientationExamples) {
  EXPECT_EQ(apply_orientation({0, 0, 2, 1}, Orientation::MY, 10, 10), (Rect{8, 0, 10, 1}));
  EXPECT_EQ(apply_orientation({1, 2, 3, 4}, Orientation::R180, 10, 10), (Rect{7, 6, 9, 8}));
  EXPECT_EQ(apply_orientation({1, 2, 3, 4}, Orientation::R0, 10, 10), (Rect{1, 2, 3, 4}));
}

TEST(Abutment, TypeAAMatchesPlacementListing) {
  const Testcell tc = make_type_aa(single("INV", 200));
  ASSERT_EQ(tc.instances.size(), 4u);
  const Coord xs[] = {0, 200, 400, 600};
  const char* codes[] = {"N", "FN", "FN", "N"};
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(tc.instances[i].origin, (Point{xs[i], 0}));
    EXPECT_EQ(to_def(tc.instances[i].orientation), codes[i]);
  }
  EXPECT_EQ(tc.kind, TestcellKind::TypeAA);
  expect_gap_free_rows(tc);
}

TEST(Abutment, TypeAACoversAllSelfClasses) {
  const std::vector<Cell> one{single("A", 300)};
  const auto realized = realized_classes(make_type_aa(one[0]));
  EXPECT_EQ(realized.size(), 3u);
  EXPECT_EQ(realized, brute_force_classes(one));
  EXPECT_EQ(coverage_classes(one), realized);
}

TEST(Abutment, TypeABPattern) {
  const Testcell tc = make_type_ab(single("A", 200), single("B", 500));
  ASSERT_EQ(tc.instances.size(), 5u);
  const char* cells[] = {"B", "A", "B", "A", "B"};
  const Orientation o[] = {Orientation::R0, Orientation::R0, Orientation::MY, Orientation::MY, Orientation::R0};
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(tc.instances[i].cell_name, cells[i]);
    EXPECT_EQ(tc.instances[i].orientation, o[i]);
  }
  expect_gap_free_rows(tc);
  const auto realized = realized_classes(tc);
  EXPECT_EQ(realized.size(), 4u);
  EXPECT_EQ(realized, realized_classes(make_type_ab(single("B", 500), single("A", 200))));
}

TEST(Abutment, ReductionRatios) {
  const double aa = 8.0 / static_cast<double>(make_type_aa(single("A", 200)).instances.size());
  const double ab = 16.0 / static_cast<double>(make_type_ab(single("A", 200), single("B", 300)).instances.size());
  EXPECT_EQ(aa, 2.0);
  EXPECT_EQ(ab, 3.2);
}

TEST(Abutment, MultiHeight) {
  const Cell tall = single("T", 300, 2);
  const Cell s = single("S", 200);
  const Testcell tc = make_multi(tall, s);
  EXPECT_EQ(tc.instances.size(), 8u);
  EXPECT_EQ(std::ranges::count(tc.instances, std::string("T"), &InstancePlacement::cell_name), 2);
  expect_gap_free_rows(tc);
  EXPECT_EQ(make_multi(single("T3", 300, 3), s).instances.size(), 11u);
  EXPECT_THROW(make_multi(s, s), std::invalid_argument);
  EXPECT_THROW(make_type_ab(tall, s), std::invalid_argument);

  const std::vector<Cell> cells{s, tall};
  std::set<AdjacencyClass> realized;
  for (const auto& t : enumerate_library(cells, Mode::All)) {
    const auto r = realized_classes(t);
    realized.insert(r.begin(), r.end());
  }
  EXPECT_EQ(realized, coverage_classes(cells));
}

TEST(Abutment, MirrorIsInvolution) {
  const Orientation even[] = {Orientation::R0, Orientation::MY};
  for (Orientation a : kAllOrientations) {
    for (Orientation b : even) {
      const AdjacencyClass p{{"X", 0, a}, {"Y", 1, b}};
      EXPECT_EQ(mirror(mirror(p)), p);
      EXPECT_EQ(canonicalize(p), canonicalize(mirror(p)));
    }
  }
}

TEST(Abutment, CoverageClassCounts) {
  EXPECT_TRUE(coverage_classes(std::span<const Cell>{}).empty());
  EXPECT_EQ(coverage_classes(library(1)).size(), 3u);
  EXPECT_EQ(coverage_classes(library(2)).size(), 10u);
}

TEST(Abutment, EnumerateModes) {
  const auto cells = library(3);
  const auto all = enumerate_library(cells, Mode::All);
  EXPECT_EQ(all.size(), 6u);
  EXPECT_EQ(std::ranges::count(all, TestcellKind::TypeAA, &Testcell::kind), 3);
  EXPECT_EQ(enumerate_library(cells, Mode::SingleCellOnly).size(), 3u);
  EXPECT_EQ(enumerate_library(cells, Mode::CellByCellOnly).size(), 3u);
  const auto combo = enumerate_library(cells, Mode::AllComboInOneCellOnly);
  EXPECT_EQ(combo.size(), 6u);
  for (const auto& tc : combo) EXPECT_TRUE(tc.in_combined_top);
  EXPECT_EQ(enumerate_library(library(1), Mode::All).size(), 1u);
  EXPECT_EQ(instance_total(enumerate_library(library(10), Mode::All)), 265);
  EXPECT_THROW(enumerate_library(std::span<const Cell>{}, Mode::All), std::invalid_argument);
  EXPECT_EQ(enumerate_library(cells, Mode::All), all);
}

TEST(Abutment, ModeNames) {
  for (Mode m : {Mode::SingleCellOnly, Mode::CellByCellOnly, Mode::AllComboInOneCellOnly, Mode::All}) {
    EXPECT_EQ(mode_from_string(to_string(m)), m);
  }
  EXPECT_THROW(mode_from_string("everything"), std::invalid_argument);
}

TEST(Abutment, CountFormulas) {
  EXPECT_EQ(predicted_cell_count(1000, CountMethod::Conventional), 8'000'000);
  EXPECT_EQ(predicted_cell_count(1000, CountMethod::Synopsys), 6'000'000);
  EXPECT_EQ(predicted_cell_count(1000, CountMethod::Ours), 2'501'500);
  for (int n = 1; n <= 12; ++n) {
    EXPECT_EQ(instance_total(enumerate_library(library(n), Mode::All)), predicted_cell_count(n, CountMethod::Ours))
        << n;
  }
}

TEST(Abutment, RandomLibrariesAreFullyCovered) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 5)(rng);
    std::vector<Cell> cells;
    for (int i = 0; i < n; ++i) {
      cells.push_back(single("K" + std::to_string(trial) + "_" + std::to_string(i),
                             110 * std::uniform_int_distribution<int>(2, 12)(rng)));
    }
    std::set<AdjacencyClass> realized;
    for (const auto& tc : enumerate_library(cells, Mode::All)) {
      expect_gap_free_rows(tc);
      const auto r = realized_classes(tc);
      realized.insert(r.begin(), r.end());
    }
    const auto oracle = brute_force_classes(cells);
    EXPECT_EQ(realized, oracle) << "trial " << trial;
    EXPECT_EQ(coverage_classes(cells), oracle) << "trial " << trial;
  }
}

#include <bit>
#include <sstream>

#include "doctest.h"
#include "pdcsq/errors.hpp"
#include "pdcsq/grid.hpp"
#include "support/paperdata.hpp"

using namespace pdcsq;

TEST_CASE("reference sudoku satisfies all conditions") {
  Grid g = fixtures::referenceSudoku();
  ValidityReport report = validate(g);
  CHECK(report.valid);
  CHECK(report.kind == ViolationKind::None);
}

TEST_CASE("single cell grid is valid") {
  Grid g = Grid::empty(1);
  g.rows.push_back({1});
  CHECK(validate(g).valid);
}

TEST_CASE("column duplicate is reported with coordinates") {
  Grid g = Grid::empty(3);
  g.rows.push_back({1, 2, 3});
  g.rows.push_back({1, 3, 2});
  ValidityReport report = validate(g);
  CHECK_FALSE(report.valid);
  CHECK(report.kind == ViolationKind::ColumnDuplicate);
  CHECK(report.row == 1);
  CHECK(report.col == 0);
}

TEST_CASE("row and block duplicates are distinguished") {
  Grid g = Grid::empty(3);
  g.rows.push_back({1, 1, 2});
  CHECK(validate(g).kind == ViolationKind::RowDuplicate);

  Grid s = Grid::empty(4, BlockShape{2, 2});
  s.rows.push_back({1, 2, 3, 4});
  s.rows.push_back({2, 1, 4, 3});
  ValidityReport report = validate(s);
  CHECK(report.kind == ViolationKind::BlockDuplicate);
  CHECK(report.row == 1);
  CHECK(report.col == 0);
}

TEST_CASE("structural problems are not constraint violations") {
  Grid g = Grid::empty(3);
  g.rows.push_back({1, 2});
  CHECK(validate(g).kind == ViolationKind::Structural);

  Grid h = Grid::empty(3);
  h.rows.push_back({1, 2, 4});
  CHECK(validate(h).kind == ViolationKind::Structural);

  Grid badShape = Grid::empty(4, BlockShape{2, 3});
  CHECK(validate(badShape).kind == ViolationKind::Structural);
}

TEST_CASE("availability masks") {
  SUBCASE("empty grid has everything available") {
    ColumnAvailability a = availability(Grid::empty(3));
    for (int c = 0; c < 3; ++c) CHECK(a.columns[c] == 0b111);
  }
  SUBCASE("forced singletons after two rows") {
    Grid g = Grid::empty(3);
    g.rows.push_back({1, 2, 3});
    g.rows.push_back({2, 3, 1});
    ColumnAvailability a = availability(g);
    CHECK(a.columns[0] == 0b100);  // value 3
    CHECK(a.columns[1] == 0b001);  // value 1
    CHECK(a.columns[2] == 0b010);  // value 2
  }
  SUBCASE("three sudoku rows leave six values per column") {
    ColumnAvailability a = availability(fixtures::referenceSudoku(3));
    for (int c = 0; c < 9; ++c) CHECK(std::popcount(a.columns[c]) == 6);
    for (int b = 0; b < 3; ++b) CHECK(a.blocks[b] == 0);
  }
  SUBCASE("invalid grid is rejected") {
    Grid g = Grid::empty(3);
    g.rows.push_back({1, 2, 3});
    g.rows.push_back({1, 3, 2});
    CHECK_THROWS_AS(availability(g), std::invalid_argument);
  }
}

TEST_CASE("placing a valid row removes exactly one value per column") {
  Grid g = fixtures::referenceSudoku(5);
  ColumnAvailability before = availability(g);
  Grid extended = fixtures::referenceSudoku(6);
  ColumnAvailability after = availability(extended);
  for (int c = 0; c < 9; ++c) {
    std::uint32_t removed = before.columns[c] & ~after.columns[c];
    CHECK(std::popcount(removed) == 1);
    CHECK(removed == (1u << (extended.rows[5][c] - 1)));
  }
}

TEST_CASE("full grid columns read as permutations") {
  Grid g = fixtures::referenceSudoku();
  for (int c = 0; c < 9; ++c) {
    std::uint32_t seen = 0;
    for (int r = 0; r < 9; ++r) seen |= 1u << (g.rows[r][c] - 1);
    CHECK(seen == 0x1FF);
  }
}

TEST_CASE("grid text round trip") {
  SUBCASE("digit form with shape header") {
    Grid g = fixtures::referenceSudoku();
    std::ostringstream out;
    writeGrids(out, {g});
    std::istringstream in(out.str());
    std::vector<Grid> back = readGrids(in);
    REQUIRE(back.size() == 1);
    CHECK(back[0] == g);
  }
  SUBCASE("wide orders use space-separated cells") {
    Grid g = Grid::empty(12);
    for (int r = 0; r < 12; ++r) {
      Row row(12);
      for (int c = 0; c < 12; ++c) row[c] = (r + c) % 12 + 1;
      g.rows.push_back(row);
    }
    REQUIRE(validate(g).valid);
    std::ostringstream out;
    writeGrids(out, {g});
    std::istringstream in(out.str());
    std::vector<Grid> back = readGrids(in);
    REQUIRE(back.size() == 1);
    CHECK(back[0] == g);
  }
  SUBCASE("headerless digit line infers the order") {
    std::istringstream in("123231312\n");
    std::vector<Grid> grids = readGrids(in);
    REQUIRE(grids.size() == 1);
    CHECK(grids[0].n == 3);
    CHECK(grids[0].rows[1] == Row{2, 3, 1});
  }
  SUBCASE("malformed input carries a line number") {
    std::istringstream in("12323\n");
    CHECK_THROWS_AS(readGrids(in), ParseError);
  }
  SUBCASE("partial prefixes survive the round trip") {
    Grid g = fixtures::referenceSudoku(3);
    std::ostringstream out;
    writeGrids(out, {g});
    std::istringstream in(out.str());
    std::vector<Grid> back = readGrids(in);
    REQUIRE(back.size() == 1);
    CHECK(back[0].filled() == 3);
    CHECK(back[0] == g);
  }
}

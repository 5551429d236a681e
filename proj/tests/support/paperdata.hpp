#pragma once
// Shared fixtures: a reference Sudoku grid whose first seven rows admit
// the maximal sixteen completions, and catalog entries with known counts.

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pdcsq/grid.hpp"

namespace fixtures {

inline pdcsq::Grid referenceSudoku(int rows = 9) {
  static const int cells[9][9] = {
      {1, 2, 3, 4, 5, 9, 6, 7, 8},
      {4, 5, 6, 7, 8, 2, 3, 1, 9},
      {7, 8, 9, 1, 6, 3, 2, 5, 4},
      {9, 4, 8, 2, 1, 7, 5, 6, 3},
      {5, 7, 2, 3, 4, 6, 8, 9, 1},
      {6, 3, 1, 5, 9, 8, 4, 2, 7},
      {3, 6, 7, 9, 2, 4, 1, 8, 5},
      {8, 9, 5, 6, 3, 1, 7, 4, 2},
      {2, 1, 4, 8, 7, 5, 9, 3, 6},
  };
  pdcsq::Grid g = pdcsq::Grid::empty(9, pdcsq::BlockShape{3, 3});
  for (int r = 0; r < rows; ++r)
    g.rows.emplace_back(std::begin(cells[r]), std::end(cells[r]));
  return g;
}

// Catalog entries with independently known counts (completions / 72).
inline const std::vector<std::pair<std::string, std::uint64_t>>& knownBandCounts() {
  static const std::vector<std::pair<std::string, std::uint64_t>> entries = {
      {"[456789,789123,123456]", 108374976ull},
      {"[456789,789123,123465]", 102543168ull},
      {"[456789,789123,123546]", 102543168ull},
      {"[456789,789123,123564]", 100231616ull},
      {"[456789,789123,123645]", 100231616ull},
  };
  return entries;
}

}  // namespace fixtures

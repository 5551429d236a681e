#pragma once
// Sequential importance-sampling estimator for the number of Latin squares
// or (R,C)-Sudoku matrices: rows are filled left to right from the legal
// value sets, each draw weighted by the product of |R_ij|/(n+1-j)
// likelihood ratios, and E[weight] * (n!)^n is the target count.

#include <gmpxx.h>

#include <cstdint>
#include <optional>

#include "pdcsq/grid.hpp"
#include "pdcsq/rng.hpp"

namespace pdcsq {

struct ImportanceDraw {
  std::optional<Grid> grid;  // absent when the draw halted
  long double weight = 0.0L; // in [0,1]; 0 iff halted
  int haltedRow = -1;        // 0-based halt coordinates, -1/-1 if completed
  int haltedCol = -1;
};

ImportanceDraw importanceDraw(int n, std::optional<BlockShape> shape, RngStream& rng);

struct CountEstimate {
  mpf_class estimate;
  mpf_class standardError;
  std::uint64_t draws = 0;
  std::uint64_t completed = 0;  // draws that produced a full grid
  long double meanWeight = 0.0L;
};

CountEstimate estimateCount(int n, std::optional<BlockShape> shape,
                            std::uint64_t draws, RngStream& rng);

}  // namespace pdcsq

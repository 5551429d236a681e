#pragma once
// Exact enumeration and counting of completions of a filled-prefix grid:
// depth-first backtracking over rows with bitmask column/block sets, a
// cycle-structure shortcut for the final two rows, uniform selection of a
// completion, and the permanent-based upper bound on completion counts.

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pdcsq/grid.hpp"
#include "pdcsq/rng.hpp"

namespace pdcsq {

struct CompletionResult {
  std::uint64_t count = 0;
  bool overflowed = false;  // a cap was given and the true count exceeds it
};

// All permutations admissible as the next row of the prefix, in
// lexicographic order.
struct CandidateRowSet {
  std::string prefixKey;  // text form of the prefix rows
  std::vector<Row> rows;
};

// Throws std::invalid_argument on an invalid or full grid.
CandidateRowSet candidateRows(const Grid& grid);

// Exact number of full valid completions. When `cap` is given and the
// count exceeds it, counting stops and the result carries overflowed=true
// (count is then a lower bound > cap); it is never silently truncated.
CompletionResult countCompletions(const Grid& grid,
                                  std::optional<std::uint64_t> cap = std::nullopt);

// Same contract as countCompletions but restricted to grids with exactly
// n-2 filled rows, via the per-column pair / cycle enumeration.
CompletionResult lastTwoRowsCompletions(const Grid& grid);

// Completions in lexicographic order (by row, then by value), up to
// `maxCount`; throws VerifyError if more exist.
std::vector<Grid> materializeCompletions(const Grid& grid, std::uint64_t maxCount);

// The index-th completion in lexicographic order.
Grid kthCompletion(const Grid& grid, std::uint64_t index);

// One completion with probability exactly 1/d each. Throws
// std::invalid_argument when no completion exists.
Grid uniformCompletion(const Grid& grid, RngStream& rng);

// Floor of prod_{l=1}^{n-k} (l!)^(n/l), the upper bound on the number of
// completions of a k x n Latin rectangle. Exact: evaluated as an integer
// L-th root of an integer power product, never through floating point.
mpz_class completionUpperBound(int n, int k);

// completionUpperBound clamped for use as a sampling denominator; throws
// std::invalid_argument when it does not fit in 63 bits (such
// configurations are unsampleable in practice anyway).
std::uint64_t completionUpperBound64(int n, int k);

}  // namespace pdcsq

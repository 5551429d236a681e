#pragma once
// Test-only oracles, deliberately independent of the library's counting
// and validation paths: direct constraint scans over row products, and an
// exact-rational expectation of the importance-sampling estimator.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "pdcsq/grid.hpp"

namespace oracle {

inline std::vector<pdcsq::Row> allPermutations(int n) {
  pdcsq::Row base(n);
  std::iota(base.begin(), base.end(), 1);
  std::vector<pdcsq::Row> out;
  do {
    out.push_back(base);
  } while (std::next_permutation(base.begin(), base.end()));
  return out;
}

// Direct constraint scan, written without bitmasks on purpose.
inline bool gridSatisfiesConditions(const std::vector<pdcsq::Row>& rows, int n,
                                    std::optional<pdcsq::BlockShape> shape) {
  for (int c = 0; c < n; ++c)
    for (int r1 = 0; r1 < static_cast<int>(rows.size()); ++r1)
      for (int r2 = r1 + 1; r2 < static_cast<int>(rows.size()); ++r2)
        if (rows[r1][c] == rows[r2][c]) return false;
  if (shape) {
    for (int br = 0; br * shape->r < n; ++br)
      for (int bc = 0; bc * shape->c < n; ++bc) {
        std::vector<int> seen;
        for (int r = br * shape->r; r < (br + 1) * shape->r; ++r) {
          if (r >= static_cast<int>(rows.size())) continue;
          for (int c = bc * shape->c; c < (bc + 1) * shape->c; ++c)
            seen.push_back(rows[r][c]);
        }
        std::sort(seen.begin(), seen.end());
        if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) return false;
      }
  }
  return true;
}

// Every full grid of the instance, by filtering all n!^n row products.
// Exponential: intended for n <= 4.
inline std::vector<pdcsq::Grid> allGridsByRowProduct(
    int n, std::optional<pdcsq::BlockShape> shape,
    std::optional<pdcsq::Row> fixedFirstRow = std::nullopt) {
  std::vector<pdcsq::Row> perms = allPermutations(n);
  std::vector<pdcsq::Grid> out;
  std::vector<pdcsq::Row> rows;
  auto recurse = [&](auto&& self, int depth) -> void {
    if (!gridSatisfiesConditions(rows, n, shape)) return;
    if (depth == n) {
      pdcsq::Grid g = pdcsq::Grid::empty(n, shape);
      g.rows = rows;
      out.push_back(std::move(g));
      return;
    }
    if (depth == 0 && fixedFirstRow) {
      rows.push_back(*fixedFirstRow);
      self(self, 1);
      rows.pop_back();
      return;
    }
    for (const pdcsq::Row& p : perms) {
      rows.push_back(p);
      self(self, depth + 1);
      rows.pop_back();
    }
  };
  recurse(recurse, 0);
  return out;
}

// Exact E[(n!)^n * W] of the importance sampler, by exhaustive recursion
// over the proposal tree with rational weights. Equals the number of full
// grids when the estimator is unbiased.
inline mpq_class importanceExactExpectation(int n,
                                            std::optional<pdcsq::BlockShape> shape) {
  std::vector<pdcsq::Row> perms = allPermutations(n);
  mpz_class factorial = 1;
  for (int i = 2; i <= n; ++i) factorial *= i;
  mpz_class normalizer;
  mpz_pow_ui(normalizer.get_mpz_t(), factorial.get_mpz_t(), n);

  std::vector<pdcsq::Row> rows;
  auto legalValues = [&](int r, int c) {
    std::vector<int> legal;
    for (int v = 1; v <= n; ++v) {
      bool ok = true;
      for (int cc = 0; cc < c && ok; ++cc)
        if (rows[r][cc] == v) ok = false;
      for (int rr = 0; rr < r && ok; ++rr)
        if (rows[rr][c] == v) ok = false;
      if (ok && shape) {
        int br = r / shape->r, bc = c / shape->c;
        for (int rr = br * shape->r; rr <= r && ok; ++rr)
          for (int cc = bc * shape->c; cc < (bc + 1) * shape->c && ok; ++cc) {
            if (rr == r && cc >= c) break;
            if (rows[rr][cc] == v) ok = false;
          }
      }
      if (ok) legal.push_back(v);
    }
    return legal;
  };

  // contribution = P(path) * W(path), accumulated over the whole tree
  auto recurse = [&](auto&& self, int r, int c, mpq_class acc) -> mpq_class {
    if (c == n) {
      ++r;
      c = 0;
    }
    if (r == n) return acc;
    std::vector<int> legal = legalValues(r, c);
    if (legal.empty()) return mpq_class(0);  // halted draw, weight 0
    // choose uniformly (1/|R|), weight ratio |R|/(n-c): the product is
    // 1/(n-c) per cell
    mpq_class cell(1, n - c);
    mpq_class total = 0;
    for (int v : legal) {
      rows[r][c] = v;
      total += self(self, r, c + 1, acc * cell);
      rows[r][c] = 0;
    }
    return total;
  };

  mpq_class expectation = 0;
  rows.assign(n, pdcsq::Row(n, 0));
  for (const pdcsq::Row& first : perms) {
    rows[0] = first;
    expectation += recurse(recurse, 1, 0, mpq_class(1, 1)) / mpq_class(factorial);
  }
  expectation *= mpq_class(normalizer);
  expectation.canonicalize();
  return expectation;
}

}  // namespace oracle

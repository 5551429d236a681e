#pragma once
// Uniform generation and exact counting of the permutation classes the
// samplers draw from: all permutations, derangements, and derangements
// with a prescribed first entry.

#include <gmpxx.h>

#include "pdcsq/grid.hpp"
#include "pdcsq/rng.hpp"

namespace pdcsq {

// Unbiased Fisher-Yates shuffle of (1..n).
Row uniformPermutation(int n, RngStream& rng);

// Uniform over fixed-point-free permutations, by rejection from uniform
// permutations (expected e trials per draw).
Row uniformDerangement(int n, RngStream& rng);

// Uniform over derangements whose first entry is i, 2 <= i <= n.
Row uniformDerangementStartingWith(int n, int i, RngStream& rng);

// Exact derangement number D_n (D_0 = 1) via the recurrence
// D_n = (n-1)(D_{n-1} + D_{n-2}).
mpz_class derangementCount(int n);

// |{derangements of n with first entry i}| for any fixed i in 2..n;
// equal to D_n / (n-1) by symmetry.
mpz_class derangementCountStartingWith(int n);

bool isDerangement(const Row& perm);

}  // namespace pdcsq

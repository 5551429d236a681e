#include "pdcsq/importance.hpp"

#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace pdcsq {

namespace {

// mantissa/exponent conversion keeps tiny weight sums exact enough for
// the high-precision final assembly
mpf_class mpfFromLongDouble(long double x, mp_bitcnt_t precision) {
  mpf_class out(0, precision);
  if (x == 0.0L) return out;
  int exponent = 0;
  long double mantissa = std::frexpl(x, &exponent);  // in [0.5, 1)
  long double scaled = std::ldexpl(mantissa, 62);    // integral part now exact
  mpz_class integral(std::to_string(static_cast<long long>(scaled)));
  out = mpf_class(integral, precision);
  mpf_class pow2(0, precision);
  mpf_set_ui(pow2.get_mpf_t(), 1);
  if (exponent - 62 >= 0)
    mpf_mul_2exp(pow2.get_mpf_t(), pow2.get_mpf_t(), exponent - 62);
  else
    mpf_div_2exp(pow2.get_mpf_t(), pow2.get_mpf_t(), 62 - exponent);
  return out * pow2;
}

}  // namespace

ImportanceDraw importanceDraw(int n, std::optional<BlockShape> shape, RngStream& rng) {
  if (n < 1 || n > kMaxOrder) throw std::invalid_argument("order out of range");
  if (shape && shape->order() != n)
    throw std::invalid_argument("block shape does not match order");
  ImportanceDraw out;
  Grid g = Grid::empty(n, shape);
  Row first(n);
  std::iota(first.begin(), first.end(), 1);
  rng.shuffle(first);
  g.rows.push_back(std::move(first));

  std::vector<std::uint32_t> colUsed(n, 0), blockUsed(shape ? n : 0, 0);
  const std::uint32_t all = (1u << n) - 1;
  for (int c = 0; c < n; ++c) {
    std::uint32_t bit = 1u << (g.rows[0][c] - 1);
    colUsed[c] |= bit;
    if (shape) blockUsed[g.blockIndex(0, c)] |= bit;
  }

  long double weight = 1.0L;
  for (int r = 1; r < n; ++r) {
    Row row(n, 0);
    std::uint32_t rowUsed = 0;
    for (int c = 0; c < n; ++c) {
      std::uint32_t legal = all & ~(colUsed[c] | rowUsed);
      if (shape) legal &= ~blockUsed[g.blockIndex(r, c)];
      int choices = std::popcount(legal);
      if (choices == 0) {
        out.weight = 0.0L;
        out.haltedRow = r;
        out.haltedCol = c;
        return out;
      }
      weight *= static_cast<long double>(choices) / static_cast<long double>(n - c);
      int pick = static_cast<int>(rng.below(choices));
      std::uint32_t bit = legal;
      for (int i = 0; i < pick; ++i) bit &= bit - 1;
      bit &= ~bit + 1;  // isolate the pick-th lowest legal bit
      row[c] = std::countr_zero(bit) + 1;
      rowUsed |= bit;
      colUsed[c] |= bit;
      if (shape) blockUsed[g.blockIndex(r, c)] |= bit;
    }
    g.rows.push_back(std::move(row));
  }
  out.grid = std::move(g);
  out.weight = weight;
  return out;
}

CountEstimate estimateCount(int n, std::optional<BlockShape> shape,
                            std::uint64_t draws, RngStream& rng) {
  if (draws < 1) throw std::invalid_argument("estimateCount: draws must be >= 1");
  long double sumW = 0.0L, sumW2 = 0.0L;
  CountEstimate out;
  out.draws = draws;
  for (std::uint64_t i = 0; i < draws; ++i) {
    ImportanceDraw d = importanceDraw(n, shape, rng);
    sumW += d.weight;
    sumW2 += d.weight * d.weight;
    if (d.grid) ++out.completed;
  }
  const long double mean = sumW / static_cast<long double>(draws);
  const long double variance =
      std::max(0.0L, sumW2 / static_cast<long double>(draws) - mean * mean);
  const long double meanStdError =
      std::sqrt(variance / static_cast<long double>(draws));
  out.meanWeight = mean;

  const mp_bitcnt_t precision = 256;
  mpz_class factorial = 1;
  for (int i = 2; i <= n; ++i) factorial *= i;
  mpz_class normalizer;
  mpz_pow_ui(normalizer.get_mpz_t(), factorial.get_mpz_t(), n);
  mpf_class normalizerF(normalizer, precision);
  out.estimate = normalizerF * mpfFromLongDouble(mean, precision);
  out.standardError = normalizerF * mpfFromLongDouble(meanStdError, precision);
  return out;
}

}  // namespace pdcsq

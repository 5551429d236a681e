#pragma once
// Exact and asymptotic cost calculators: known Latin-square counts, the
// permanent-based bracket on |LS_n|, expected row-stage trial formulas
// with their exact constituents, the printed asymptotic regimes, and the
// Sudoku trial brackets as exact rationals.

#include <gmpxx.h>

#include <optional>
#include <string>

#include "pdcsq/pdc.hpp"

namespace pdcsq {

// Exact |LS_n| for n = 1..11 (survey values; the rounded three-figure
// forms are used as checksums in the tests) and the exact Sudoku count.
bool hasKnownLatinCount(int n);
mpz_class knownLatinCount(int n);
mpz_class knownSudokuCount();

struct LatinBounds {
  mpq_class lower;  // (n!)^(2n) / n^(n^2), exact
  mpz_class upper;  // ceil of prod_k (k!)^(n/k), rounded upward
};
LatinBounds latinBounds(int n);

// log of the upper bound, for asymptotic ratio checks at large n
double logLatinUpperBound(int n);

struct TrialFormula {
  mpq_class value;           // U_{n,k} * D_n^(k-1) / (L_n / n!)
  mpz_class upperBound;      // floor U_{n,k}
  mpz_class derangements;    // D_n
  int derangementExponent;   // k - 1 rows are sampled as derangements
  mpz_class latinCount;      // L_n
  mpz_class reducedCount;    // L_n / n!
  double approx() const { return value.get_d(); }
};

// Expected row-stage trials of the Latin sampler with prefix length k.
// Throws std::invalid_argument when |LS_n| is unknown and no override is
// supplied.
TrialFormula expectedTrialsLatin(int n, int k,
                                 std::optional<mpz_class> latinCountOverride = {});

// Same quantity through Stirling surrogates (D_n ~ n!/e and
// |LS_n| ~ (e^-2 n)^(n^2)), usable at any n; returns log E.
double logExpectedTrialsSurrogate(int n, int k);

enum class AsymptoticRegime {
  SublinearK,      // k = o(n): log E ~ n^2 log n
  LinearFraction,  // k = (1-t) n: log E ~ (2t-1) n^2 log n
  PowerLawGap,     // k = n - r n^a
};

struct AsymptoticParams {
  double t = 0.0;
  double r = 0.0;
  double alpha = 0.0;
};

// Leading-order value of log E_{n,k} for the regime at the given n.
double asymptoticLogTrials(int n, AsymptoticRegime regime,
                           const AsymptoticParams& params = {});

struct TrialBracket {
  mpq_class low;
  mpq_class high;
};

// Exact interval for the expected row-stage trials of each Sudoku
// strategy, from the candidate-set bracket [12000,12096], the strategy
// denominator, and the band-count extremes. These are catalog-unit
// predictions: measured trials of the honest sampler are 72x lower (see
// the band-table documentation).
TrialBracket sudokuTrialBrackets(SudokuStrategy strategy);

// Scientific-notation rendering of big values for reports.
std::string toScientific(const mpq_class& value, int digits = 6);
std::string toScientific(const mpf_class& value, int digits = 6);

}  // namespace pdcsq

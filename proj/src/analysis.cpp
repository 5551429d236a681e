#include "pdcsq/analysis.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "pdcsq/completion.hpp"
#include "pdcsq/permgen.hpp"

namespace pdcsq {

namespace {

// McKay & Wanless survey values.
const char* kLatinCounts[] = {
    "1",
    "1",
    "2",
    "12",
    "576",
    "161280",
    "812851200",
    "61479419904000",
    "108776032459082956800",
    "5524751496156892842531225600",
    "9982437658213039871725064756920320000",
    "776966836171770144107444346734230682311065600000",
};

mpz_class factorial(int n) {
  mpz_class f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

bool hasKnownLatinCount(int n) { return n >= 1 && n <= 11; }

mpz_class knownLatinCount(int n) {
  if (!hasKnownLatinCount(n))
    throw std::invalid_argument("|LS_n| is tabulated only for n <= 11");
  return mpz_class(kLatinCounts[n]);
}

mpz_class knownSudokuCount() { return mpz_class("6670903752021072936960"); }

LatinBounds latinBounds(int n) {
  if (n < 1) throw std::invalid_argument("latinBounds: n must be >= 1");
  LatinBounds b;
  mpz_class nf = factorial(n);
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), nf.get_mpz_t(), 2 * static_cast<unsigned long>(n));
  mpz_class base = n;
  mpz_pow_ui(den.get_mpz_t(), base.get_mpz_t(),
             static_cast<unsigned long>(n) * static_cast<unsigned long>(n));
  b.lower = mpq_class(num, den);
  b.lower.canonicalize();

  // ceil of the k=0 completion bound: floor + 1 unless the product is an
  // exact integer (floor() here is exact by construction)
  unsigned long lcm = 1;
  for (int l = 1; l <= n; ++l) lcm = std::lcm<unsigned long>(lcm, l);
  mpz_class power = 1, fact = 1;
  for (int l = 1; l <= n; ++l) {
    fact *= l;
    mpz_class term;
    mpz_pow_ui(term.get_mpz_t(), fact.get_mpz_t(),
               static_cast<unsigned long>(n) * (lcm / l));
    power *= term;
  }
  mpz_class root;
  int exact = mpz_root(root.get_mpz_t(), power.get_mpz_t(), lcm);
  b.upper = exact ? root : root + 1;
  return b;
}

double logLatinUpperBound(int n) {
  double sum = 0.0;
  for (int k = 1; k <= n; ++k)
    sum += static_cast<double>(n) / k * std::lgamma(static_cast<double>(k) + 1.0);
  return sum;
}

TrialFormula expectedTrialsLatin(int n, int k,
                                 std::optional<mpz_class> latinCountOverride) {
  if (n < 2 || k < 1 || k > n - 1)
    throw std::invalid_argument("expectedTrialsLatin: need n >= 2 and 1 <= k <= n-1");
  TrialFormula f;
  if (latinCountOverride) {
    f.latinCount = *latinCountOverride;
  } else {
    if (!hasKnownLatinCount(n))
      throw std::invalid_argument("expectedTrialsLatin: |LS_n| unknown for n = " +
                                  std::to_string(n) + "; supply a count");
    f.latinCount = knownLatinCount(n);
  }
  f.upperBound = completionUpperBound(n, k);
  f.derangements = derangementCount(n);
  f.derangementExponent = k - 1;
  mpz_class nf = factorial(n);
  mpz_class q, r;
  mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), f.latinCount.get_mpz_t(), nf.get_mpz_t());
  if (r != 0) throw std::invalid_argument("latin count not divisible by n!");
  f.reducedCount = q;

  mpz_class dPow;
  mpz_pow_ui(dPow.get_mpz_t(), f.derangements.get_mpz_t(),
             static_cast<unsigned long>(f.derangementExponent));
  f.value = mpq_class(f.upperBound * dPow, f.reducedCount);
  f.value.canonicalize();
  return f;
}

double logExpectedTrialsSurrogate(int n, int k) {
  if (n < 2 || k < 1 || k > n - 1)
    throw std::invalid_argument("logExpectedTrialsSurrogate: bad n or k");
  double logNf = std::lgamma(static_cast<double>(n) + 1.0);
  double logU = 0.0;
  for (int l = 1; l <= n - k; ++l)
    logU += static_cast<double>(n) / l * std::lgamma(static_cast<double>(l) + 1.0);
  double logD = logNf - 1.0;                                      // D_n ~ n!/e
  double logL = static_cast<double>(n) * n * (std::log(n) - 2.0); // |LS_n| ~ (e^-2 n)^(n^2)
  return logU + (k - 1) * logD - (logL - logNf);
}

double asymptoticLogTrials(int n, AsymptoticRegime regime,
                           const AsymptoticParams& params) {
  if (n < 2) throw std::invalid_argument("asymptoticLogTrials: n must be >= 2");
  const double n2logn = static_cast<double>(n) * n * std::log(n);
  switch (regime) {
    case AsymptoticRegime::SublinearK:
      return n2logn;
    case AsymptoticRegime::LinearFraction:
      if (params.t <= 0.0 || params.t >= 1.0)
        throw std::invalid_argument("LinearFraction regime needs 0 < t < 1");
      return (2.0 * params.t - 1.0) * n2logn;
    case AsymptoticRegime::PowerLawGap:
      if (params.r <= 0.0 || params.r >= 1.0 || params.alpha <= 0.0 || params.alpha >= 1.0)
        throw std::invalid_argument("PowerLawGap regime needs 0 < r < 1 and 0 < alpha < 1");
      return params.r * (1.0 + params.alpha) *
                 std::pow(static_cast<double>(n), 1.0 + params.alpha) * std::log(n) -
             n2logn;
  }
  throw std::invalid_argument("unknown regime");
}

TrialBracket sudokuTrialBrackets(SudokuStrategy strategy) {
  const mpz_class poolLow = 12000, poolHigh = 12096;
  const mpz_class bandHigh = 108374976, bandLow = 94888576;
  const mpz_class denom = strategyDenominator(strategy);
  const unsigned long rows = static_cast<unsigned long>(strategyRowCount(strategy));
  mpz_class lowNum, highNum;
  mpz_pow_ui(lowNum.get_mpz_t(), poolLow.get_mpz_t(), rows);
  mpz_pow_ui(highNum.get_mpz_t(), poolHigh.get_mpz_t(), rows);
  TrialBracket b;
  b.low = mpq_class(lowNum * denom, bandHigh);
  b.high = mpq_class(highNum * denom, bandLow);
  b.low.canonicalize();
  b.high.canonicalize();
  return b;
}

namespace {

std::string scientificFromParts(const std::string& digits, long exponent10, int digitCount) {
  std::string mantissa = digits.substr(0, 1);
  std::string rest = digits.substr(1, std::max(0, digitCount - 1));
  while (!rest.empty() && rest.back() == '0') rest.pop_back();
  std::string out = mantissa;
  if (!rest.empty()) out += "." + rest;
  out += "e" + std::to_string(exponent10 - 1);
  return out;
}

}  // namespace

std::string toScientific(const mpf_class& value, int digits) {
  if (value == 0) return "0";
  mp_exp_t exp10 = 0;
  std::string s = value.get_str(exp10, 10, static_cast<std::size_t>(digits));
  bool negative = !s.empty() && s[0] == '-';
  if (negative) s.erase(s.begin());
  if (s.empty()) return "0";
  return (negative ? "-" : "") + scientificFromParts(s, exp10, digits);
}

std::string toScientific(const mpq_class& value, int digits) {
  mpf_class f(value, 256);
  return toScientific(f, digits);
}

}  // namespace pdcsq

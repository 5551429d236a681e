#include "pdcsq/statsverify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "pdcsq/completion.hpp"
#include "pdcsq/errors.hpp"

namespace pdcsq {

int ExhaustiveSupport::indexOf(const Grid& grid) const {
  auto it = indexByText.find(formatGridLine(grid));
  return it == indexByText.end() ? -1 : it->second;
}

ExhaustiveSupport enumerateSupport(int n, std::optional<BlockShape> shape,
                                   std::optional<Row> fixedFirstRow,
                                   std::uint64_t cap) {
  ExhaustiveSupport support;
  support.n = n;
  support.shape = shape;
  support.fixedFirstRow = fixedFirstRow;
  Grid prefix = Grid::empty(n, shape);
  if (fixedFirstRow) prefix.rows.push_back(*fixedFirstRow);
  CompletionResult count = countCompletions(prefix, cap);
  if (count.overflowed)
    throw VerifyError("support size exceeds the cap of " + std::to_string(cap) +
                      " (at least " + std::to_string(count.count) + ")");
  support.grids = materializeCompletions(prefix, count.count);
  for (int i = 0; i < static_cast<int>(support.grids.size()); ++i)
    support.indexByText.emplace(formatGridLine(support.grids[i]), i);
  return support;
}

// Lentz continued fraction for Q, power series for P; standard scheme.
namespace {

double gammaSeriesP(double a, double x) {
  double sum = 1.0 / a, term = sum, ap = a;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gammaContinuedQ(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-15) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularizedGammaQ(double a, double x) {
  if (a <= 0.0 || x < 0.0) throw std::invalid_argument("regularizedGammaQ domain");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gammaSeriesP(a, x);
  return gammaContinuedQ(a, x);
}

ChiSquareReport chiSquareExpected(const std::vector<std::uint64_t>& observed,
                                  const std::vector<double>& probabilities) {
  if (observed.size() != probabilities.size() || observed.empty())
    throw std::invalid_argument("chiSquareExpected: size mismatch");
  std::uint64_t total = std::accumulate(observed.begin(), observed.end(), std::uint64_t{0});
  ChiSquareReport report;
  report.cells = observed.size();
  report.degreesOfFreedom = observed.size() - 1;
  report.minExpected = 1e300;
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    double expected = probabilities[i] * static_cast<double>(total);
    report.minExpected = std::min(report.minExpected, expected);
    if (expected <= 0.0) throw std::invalid_argument("chiSquareExpected: zero expectation");
    double diff = static_cast<double>(observed[i]) - expected;
    stat += diff * diff / expected;
  }
  report.statistic = stat;
  report.pValue = regularizedGammaQ(static_cast<double>(report.degreesOfFreedom) / 2.0,
                                    stat / 2.0);
  report.valid = report.minExpected >= 5.0;
  return report;
}

ChiSquareReport chiSquareUniform(const std::vector<std::uint64_t>& observed) {
  std::vector<double> probabilities(observed.size(),
                                    1.0 / static_cast<double>(observed.size()));
  return chiSquareExpected(observed, probabilities);
}

ChiSquareReport uniformityTest(const std::function<Grid(RngStream&)>& sampler,
                               const ExhaustiveSupport& support,
                               std::uint64_t samples, RngStream& rng) {
  if (samples < 5 * support.size())
    throw std::invalid_argument("uniformityTest: need at least 5 samples per cell");
  std::vector<std::uint64_t> counts(support.size(), 0);
  for (std::uint64_t i = 0; i < samples; ++i) {
    Grid g = sampler(rng);
    int idx = support.indexOf(g);
    if (idx < 0)
      throw VerifyError("sampler emitted a grid outside the enumerated support: " +
                        formatGridLine(g));
    ++counts[static_cast<std::size_t>(idx)];
  }
  return chiSquareUniform(counts);
}

MultiSeedOutcome multiSeedUniformity(
    const std::function<Grid(RngStream&)>& sampler, const ExhaustiveSupport& support,
    std::uint64_t samplesPerSeed, const std::vector<std::uint64_t>& seeds,
    int minInBand, double pLow, double pHigh) {
  MultiSeedOutcome outcome;
  for (std::uint64_t seed : seeds) {
    RngStream rng(seed, 0);
    ChiSquareReport report = uniformityTest(sampler, support, samplesPerSeed, rng);
    outcome.pValues.push_back(report.pValue);
    if (report.pValue >= pLow && report.pValue <= pHigh) ++outcome.inBand;
  }
  outcome.pass = outcome.inBand >= minInBand;
  return outcome;
}

GeometricFit fitGeometric(const std::vector<std::uint64_t>& trials) {
  GeometricFit fit;
  if (trials.empty()) return fit;
  long double sum = 0.0L;
  for (std::uint64_t t : trials) {
    if (t < 1) throw std::invalid_argument("fitGeometric: trial counts start at 1");
    sum += static_cast<long double>(t);
  }
  const double n = static_cast<double>(trials.size());
  fit.mean = static_cast<double>(sum / trials.size());
  fit.pHat = 1.0 / fit.mean;

  // bin by trial count, aggregate the geometric tail, merge cells with
  // expected counts under 5
  std::uint64_t maxT = *std::max_element(trials.begin(), trials.end());
  std::uint64_t bins = std::min<std::uint64_t>(maxT, 200);
  std::vector<std::uint64_t> observed(bins + 1, 0);
  for (std::uint64_t t : trials) ++observed[std::min(t - 1, bins)];
  std::vector<double> expected(bins + 1, 0.0);
  double tail = 1.0;
  for (std::uint64_t b = 0; b < bins; ++b) {
    double pmf = fit.pHat * std::pow(1.0 - fit.pHat, static_cast<double>(b));
    expected[b] = pmf * n;
    tail -= pmf;
  }
  expected[bins] = std::max(tail, 0.0) * n;

  std::vector<double> mergedExp;
  std::vector<std::uint64_t> mergedObs;
  double accExp = 0.0;
  std::uint64_t accObs = 0;
  for (std::size_t b = 0; b < expected.size(); ++b) {
    accExp += expected[b];
    accObs += observed[b];
    if (accExp >= 5.0) {
      mergedExp.push_back(accExp);
      mergedObs.push_back(accObs);
      accExp = 0.0;
      accObs = 0;
    }
  }
  if (accExp > 0.0 && !mergedExp.empty()) {
    mergedExp.back() += accExp;
    mergedObs.back() += accObs;
  }
  if (mergedExp.size() < 3) return fit;  // not enough resolution to test

  double stat = 0.0;
  for (std::size_t b = 0; b < mergedExp.size(); ++b) {
    double diff = static_cast<double>(mergedObs[b]) - mergedExp[b];
    stat += diff * diff / mergedExp[b];
  }
  // one parameter estimated from the data
  double dof = static_cast<double>(mergedExp.size()) - 2.0;
  fit.gofPValue = regularizedGammaQ(dof / 2.0, stat / 2.0);
  fit.valid = true;
  return fit;
}

void writeCountsCsv(std::ostream& out, const std::vector<std::uint64_t>& counts) {
  out << "cell,count\n";
  for (std::size_t i = 0; i < counts.size(); ++i) out << i << ',' << counts[i] << '\n';
}

}  // namespace pdcsq

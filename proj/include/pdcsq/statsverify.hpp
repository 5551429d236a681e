#pragma once
// Statistical verification harness: exhaustive supports with canonical
// indexing, chi-square uniformity tests (p-values via the regularized
// incomplete gamma function), a multi-seed pass protocol, and geometric
// goodness-of-fit for rejection trial counts.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

#include "pdcsq/grid.hpp"
#include "pdcsq/rng.hpp"

namespace pdcsq {

struct ExhaustiveSupport {
  int n = 0;
  std::optional<BlockShape> shape;
  std::optional<Row> fixedFirstRow;
  std::vector<Grid> grids;  // lexicographic enumeration order
  std::map<std::string, int> indexByText;

  std::size_t size() const { return grids.size(); }
  // -1 when the grid is not a member.
  int indexOf(const Grid& grid) const;
};

// Enumerates every full valid grid of the instance (optionally with a
// fixed first row). Throws VerifyError when the support exceeds `cap`.
ExhaustiveSupport enumerateSupport(int n, std::optional<BlockShape> shape,
                                   std::optional<Row> fixedFirstRow = std::nullopt,
                                   std::uint64_t cap = 200000);

struct ChiSquareReport {
  std::uint64_t cells = 0;
  double statistic = 0.0;
  std::uint64_t degreesOfFreedom = 0;
  double pValue = 0.0;
  double minExpected = 0.0;
  bool valid = false;  // false when an expected cell count is below 5
};

// Upper regularized incomplete gamma Q(a, x), relative error ~1e-10.
double regularizedGammaQ(double a, double x);

// Chi-square of observed counts against the uniform expectation.
ChiSquareReport chiSquareUniform(const std::vector<std::uint64_t>& observed);

// Chi-square against arbitrary expected probabilities (must sum to ~1).
ChiSquareReport chiSquareExpected(const std::vector<std::uint64_t>& observed,
                                  const std::vector<double>& probabilities);

// Draws `samples` grids and tests uniformity over the support. A sampled
// grid outside the support is a hard failure (VerifyError), not a
// statistic. Requires samples >= 5 * support size.
ChiSquareReport uniformityTest(const std::function<Grid(RngStream&)>& sampler,
                               const ExhaustiveSupport& support,
                               std::uint64_t samples, RngStream& rng);

struct MultiSeedOutcome {
  std::vector<double> pValues;
  int inBand = 0;
  bool pass = false;
};

// Runs the uniformity test once per seed; a seed passes when its p-value
// lies in [pLow, pHigh]; the protocol passes when at least minInBand do.
MultiSeedOutcome multiSeedUniformity(
    const std::function<Grid(RngStream&)>& sampler, const ExhaustiveSupport& support,
    std::uint64_t samplesPerSeed, const std::vector<std::uint64_t>& seeds,
    int minInBand, double pLow = 1e-3, double pHigh = 1.0 - 1e-3);

struct GeometricFit {
  double pHat = 0.0;        // max-likelihood success probability
  double mean = 0.0;        // observed mean trial count
  double gofPValue = 0.0;   // chi-square goodness of fit
  bool valid = false;
};

// Fits trial counts (values >= 1) to a geometric distribution.
GeometricFit fitGeometric(const std::vector<std::uint64_t>& trials);

void writeCountsCsv(std::ostream& out, const std::vector<std::uint64_t>& counts);

}  // namespace pdcsq

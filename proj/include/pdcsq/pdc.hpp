#pragma once
// Probabilistic divide-and-conquer samplers: the generic two-piece scheme
// with von Neumann acceptance, the Sudoku sampler (band stage from the
// table, then i.i.d. candidate rows accepted in proportion to their exact
// completion count), the Latin-square / (R,C)-Sudoku sampler built on
// derangement rows, and the naive rejection baselines.
//
// Every acceptance decision is an exact integer Bernoulli draw.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pdcsq/bandtable.hpp"
#include "pdcsq/completion.hpp"
#include "pdcsq/grid.hpp"
#include "pdcsq/rng.hpp"

namespace pdcsq {

struct TrialLedger {
  std::uint64_t bandTrials = 0;
  std::uint64_t rowTrials = 0;
  std::uint64_t acceptances = 0;
  double bandElapsedMs = 0.0;
  double rowElapsedMs = 0.0;
  // Running maximum completion count seen over accepted-band 6-row
  // prefixes (the denominator stays at the proven bound regardless).
  std::uint64_t maxSixRowCount = 0;

  void mergeFrom(const TrialLedger& other) {
    bandTrials += other.bandTrials;
    rowTrials += other.rowTrials;
    acceptances += other.acceptances;
    bandElapsedMs += other.bandElapsedMs;
    rowElapsedMs += other.rowElapsedMs;
    maxSixRowCount = std::max(maxSixRowCount, other.maxSixRowCount);
  }
};

// --- generic PDC ----------------------------------------------------------

// Division of a sample space into a first piece A and a conditional second
// piece. acceptanceWeight(a) returns (w, W) meaning accept a with
// probability w/W; W must dominate w for every reachable a.
template <typename A>
struct DivisionSpec {
  std::function<A(RngStream&)> sampleFirst;
  std::function<std::pair<std::uint64_t, std::uint64_t>(const A&)> acceptanceWeight;
  std::function<Grid(const A&, RngStream&)> sampleSecond;
};

template <typename A>
struct PdcOutcome {
  A first;
  Grid second;
  TrialLedger ledger;
};

template <typename A>
PdcOutcome<A> pdcSample(const DivisionSpec<A>& division, RngStream& rng,
                        std::uint64_t trialCeiling = 0);

// --- Sudoku ----------------------------------------------------------------

enum class SudokuStrategy {
  Rows4to7,  // accept with d/16, finish the last two rows
  Rows4to8,  // accept iff the last row is completable (d = 1)
  Rows4to6,  // accept with d/4887, finish the last three rows
};

const char* strategyName(SudokuStrategy s);
std::optional<SudokuStrategy> strategyFromName(const std::string& name);
std::uint64_t strategyDenominator(SudokuStrategy s);
int strategyRowCount(SudokuStrategy s);  // rows drawn per trial

struct SampleOptions {
  std::uint64_t trialCeiling = 0;  // 0 = unlimited; throws TrialCeilingError
  int workers = 1;
  // Worker w > 0 runs trials on RngStream(seed, workerStreamBase + w);
  // single-worker runs are bitwise deterministic on the caller's stream.
  std::uint64_t seed = 0;
  std::uint64_t workerStreamBase = 1u << 20;
};

struct SampleResult {
  Grid grid;
  TrialLedger ledger;
};

SampleResult sampleSudoku(SudokuStrategy strategy, const BandTable& table,
                          RngStream& rng, const SampleOptions& options = {});

// --- Latin squares and (R,C)-Sudoku ----------------------------------------

struct LatinOptions {
  int k = 0;  // prefix length; 0 selects the default n-3 clamped to [1, n-1]
  bool reducedFirstColumn = false;
  std::uint64_t trialCeiling = 0;
  // Verification hook: skips the d/denominator acceptance so the
  // statistical harness can confirm it detects the resulting bias.
  bool skipAcceptanceBiasCheck = false;
};

SampleResult sampleLatin(int n, RngStream& rng, const LatinOptions& options = {});
SampleResult sampleRCSudoku(BlockShape shape, int k, RngStream& rng,
                            const LatinOptions& options = {});

// --- naive rejection baselines ---------------------------------------------

enum class NaiveKind {
  IidCells = 1,        // i.i.d. uniform cells
  IidRows = 2,         // i.i.d. uniform row permutations
  FixedRowDerangements = 3,  // identity first row, derangement rows, forced last row
};

struct NaiveResult {
  std::optional<Grid> grid;  // absent when the budget ran out
  TrialLedger ledger;
};

NaiveResult sampleNaiveRejection(NaiveKind kind, int n,
                                 std::optional<BlockShape> shape, RngStream& rng,
                                 std::uint64_t trialBudget);

// --- finishers --------------------------------------------------------------

// Column permutations within stacks 2 and 3, optional swap of those
// stacks, then a value relabel. Exactly the symmetrization that spreads a
// canonical-band sample uniformly over the full space.
Grid applySudokuFinishers(const Grid& grid, RngStream& rng);
// Row permutation plus value relabel (Latin squares only).
Grid applyLatinFinishers(const Grid& grid, RngStream& rng);
// Value relabel alone (valid for any shape).
Grid applyRelabelFinisher(const Grid& grid, RngStream& rng);

// --- stats records ------------------------------------------------------

std::string formatStatsRecord(
    const std::vector<std::pair<std::string, std::string>>& keyValues);

// --- implementation of the template ----------------------------------------

template <typename A>
PdcOutcome<A> pdcSample(const DivisionSpec<A>& division, RngStream& rng,
                        std::uint64_t trialCeiling) {
  PdcOutcome<A> out;
  for (;;) {
    ++out.ledger.rowTrials;
    if (trialCeiling && out.ledger.rowTrials > trialCeiling)
      throw TrialCeilingError("pdcSample: trial ceiling reached");
    A a = division.sampleFirst(rng);
    auto [w, W] = division.acceptanceWeight(a);
    if (w > W)
      throw ContractError("pdcSample: acceptance weight exceeds its normalizer");
    if (w == 0 || !rng.bernoulli(w, W)) continue;
    ++out.ledger.acceptances;
    out.first = std::move(a);
    out.second = division.sampleSecond(out.first, rng);
    return out;
  }
}

}  // namespace pdcsq

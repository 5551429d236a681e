#pragma once
// The 36288-entry first-band table: ingestion with a pinned-constant gate,
// PDC-weighted band sampling, per-entry brute-force verification, and
// regeneration of the whole table from scratch.
//
// Table values are catalog counts: the number of completions of the band
// divided by 72, the order of the symmetry group that permutes the rows of
// the two lower bands and swaps them (it acts freely on completions). The
// total number of Sudoku matrices is 9! * 72^2 * (sum of all entries).

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "pdcsq/grid.hpp"
#include "pdcsq/rng.hpp"

namespace pdcsq {

// Pinned aggregates of the authentic table; any parsed table failing them
// is rejected outright.
inline constexpr int kBandTableEntries = 36288;
inline constexpr std::uint64_t kBandTableSum = 3546146300288ull;
inline constexpr std::uint64_t kBandTableMin = 94888576ull;
inline constexpr std::uint64_t kBandTableMax = 108374976ull;

struct BandEntry {
  // tuples[i] holds columns 4..9 of band row i+1; columns 1..3 are fixed
  // to (1,2,3),(4,5,6),(7,8,9).
  std::array<std::array<int, 6>, 3> tuples{};
  std::uint64_t count = 0;  // catalog count x_i

  Grid band() const;              // reconstructed 3-row prefix, shape (3,3)
  std::string tupleText() const;  // "[dddddd,dddddd,dddddd]"
};

struct BandTable {
  std::vector<BandEntry> entries;  // file order preserved
  std::uint64_t sum = 0;
  std::uint64_t min = 0;
  std::uint64_t max = 0;
};

// Grammar: `[DDDDDD,DDDDDD,DDDDDD] => INTEGER`, digits 1..9. Throws
// ParseError with the line number.
BandEntry parseBandLine(const std::string& line, int lineNo = 0);

// Parses and fully validates a table: grammar, entry count, duplicate
// bands, per-entry band validity and count range, and the pinned
// aggregates. Blank lines are ignored. Throws ParseError / VerifyError.
BandTable parseBandTable(std::istream& in);
BandTable loadBandTable(const std::string& path);

// Assembles a table without the pinned-aggregate gate (synthetic tables in
// tests, freshly generated tables before they are checked).
BandTable makeTableUnchecked(std::vector<BandEntry> entries);

struct BandDraw {
  int index = -1;
  Grid band;
  std::uint64_t trials = 0;
};

// Draws entry i with probability exactly x_i / sum x_j: uniform index,
// then an exact integer Bernoulli accept with probability x_i / max x_j.
BandDraw sampleBand(const BandTable& table, RngStream& rng);

// Catalog completion count of an arbitrary valid 3-row band (shape (3,3)).
// total completions = 72 * catalog.
struct BandCompletionCount {
  std::uint64_t catalog = 0;
  std::uint64_t total() const { return catalog * 72ull; }
};
BandCompletionCount countBandCompletions(const Grid& band);

// Recomputes the entry's catalog count by brute force and compares it with
// the stored one. Returns the recomputed count; throws VerifyError carrying
// both numbers on mismatch.
std::uint64_t verifyBandEntry(const BandEntry& entry);

// Parses "[dddddd,dddddd,dddddd]" into a band grid.
Grid bandFromTupleText(const std::string& text);

// --- regeneration --------------------------------------------------------

// Enumerates the 36288 canonical bands: block 1 in standard form and the
// first row sorted within stacks 2 and 3 with the stacks ordered.
std::vector<BandEntry> enumerateCanonicalBands();

struct BandGenOptions {
  int workers = 1;
  bool perBand = false;  // count every band directly instead of one per
                         // symmetry class (hours instead of minutes)
  std::function<void(int done, int total)> progress;
};

// Fills in the counts for every canonical band and returns the entries
// sorted by tuple text. Deterministic.
std::vector<BandEntry> generateBandTable(const BandGenOptions& options = {});

void writeBandTable(std::ostream& out, const std::vector<BandEntry>& entries);

}  // namespace pdcsq

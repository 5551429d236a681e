#include "pdcsq/pdc.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <numeric>
#include <sstream>
#include <thread>

#include "pdcsq/errors.hpp"
#include "pdcsq/permgen.hpp"

namespace pdcsq {

namespace {

using Clock = std::chrono::steady_clock;

double msSince(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

constexpr std::uint32_t kAll9 = 0x1FF;
constexpr std::uint64_t kNibbleOnes = 0x111111111ull;
constexpr std::uint64_t kNibbleHighs = 0x888888888ull;

inline int ctz(std::uint32_t x) { return std::countr_zero(x); }

// A candidate row packed for the trial loop: per-column values as nibbles
// (equal-nibble detection finds column clashes) and per-stack value masks.
struct PackedRow {
  std::uint64_t nibbles = 0;
  std::uint32_t stack[3] = {0, 0, 0};
  std::array<std::int8_t, 9> vals{};
};

PackedRow packRow(const Row& row) {
  PackedRow p;
  for (int c = 0; c < 9; ++c) {
    int v = row[c] - 1;
    p.vals[c] = static_cast<std::int8_t>(v);
    p.nibbles |= static_cast<std::uint64_t>(v) << (4 * c);
    p.stack[c / 3] |= 1u << v;
  }
  return p;
}

inline bool columnsCompatible(const PackedRow& a, const PackedRow& b) {
  std::uint64_t x = a.nibbles ^ b.nibbles;
  return ((x - kNibbleOnes) & ~x & kNibbleHighs) == 0;
}

inline bool stacksDisjoint(const PackedRow& a, const PackedRow& b) {
  return ((a.stack[0] & b.stack[0]) | (a.stack[1] & b.stack[1]) |
          (a.stack[2] & b.stack[2])) == 0;
}

// Remaining two values per column after seven rows, walked into
// column/value cycles: rem[cols[i]] = {vals[i-1], vals[i]} along each
// cycle, so one orientation bit per cycle decides which value lands in
// row 8. Valid iff, per stack, the pair union is the complement of the
// seventh row's stack values.
struct TailCycles {
  bool valid = false;
  int count = 0;
  int start[5] = {};
  int length[5] = {};
  int cols[9] = {};
  int vals[9] = {};

  std::uint64_t completions() const { return valid ? (1ull << count) : 0; }
};

TailCycles buildTail(const std::uint32_t rem[9], const std::uint32_t row7Stack[3]) {
  TailCycles tail;
  for (int s = 0; s < 3; ++s) {
    std::uint32_t u = rem[3 * s] | rem[3 * s + 1] | rem[3 * s + 2];
    if (u != (kAll9 & ~row7Stack[s])) return tail;
  }
  int firstCol[9], secondCol[9];
  for (int v = 0; v < 9; ++v) firstCol[v] = -1;
  for (int c = 0; c < 9; ++c) {
    std::uint32_t m = rem[c];
    while (m) {
      int v = ctz(m);
      m &= m - 1;
      (firstCol[v] < 0 ? firstCol[v] : secondCol[v]) = c;
    }
  }
  std::uint32_t seen = 0;
  int pos = 0;
  for (int c0 = 0; c0 < 9; ++c0) {
    if (seen & (1u << c0)) continue;
    tail.start[tail.count] = pos;
    int len = 0;
    int c = c0;
    int v = ctz(rem[c]);
    for (;;) {
      seen |= 1u << c;
      tail.cols[pos] = c;
      tail.vals[pos] = v;
      ++pos;
      ++len;
      int nxt = firstCol[v] == c ? secondCol[v] : firstCol[v];
      if (seen & (1u << nxt)) break;
      c = nxt;
      v = ctz(rem[c] & ~(1u << v));
    }
    tail.length[tail.count] = len;
    ++tail.count;
  }
  tail.valid = true;
  return tail;
}

// Rows 8 and 9 for orientation index `bits` (one bit per cycle).
void fillTailRows(const TailCycles& tail, std::uint64_t bits, Row& row8, Row& row9) {
  for (int k = 0; k < tail.count; ++k) {
    bool flip = (bits >> k) & 1;
    int s = tail.start[k], len = tail.length[k];
    for (int i = 0; i < len; ++i) {
      int c = tail.cols[s + i];
      int vOut = tail.vals[s + i];
      int vIn = tail.vals[s + (i + len - 1) % len];
      row8[c] = (flip ? vIn : vOut) + 1;
      row9[c] = (flip ? vOut : vIn) + 1;
    }
  }
}

struct BandContext {
  Grid band;
  std::array<std::uint32_t, 9> bandCols{};
  std::vector<PackedRow> pool;  // candidate fourth rows, lexicographic
};

BandContext makeBandContext(Grid band) {
  BandContext ctx;
  ctx.band = std::move(band);
  for (int c = 0; c < 9; ++c) {
    ctx.bandCols[c] = 0;
    for (int r = 0; r < 3; ++r) ctx.bandCols[c] |= 1u << (ctx.band.rows[r][c] - 1);
  }
  CandidateRowSet set = candidateRows(ctx.band);
  ctx.pool.reserve(set.rows.size());
  for (const Row& r : set.rows) ctx.pool.push_back(packRow(r));
  return ctx;
}

// Count completions of band+r4+r5+r6 by scanning candidate seventh rows.
// Also used to select the seventh row and tail uniformly.
std::uint64_t sixRowCompletionCount(const BandContext& ctx, const PackedRow& a,
                                    const PackedRow& b, const PackedRow& c) {
  std::uint64_t total = 0;
  std::uint32_t rem[9];
  for (const PackedRow& r : ctx.pool) {
    if (!columnsCompatible(r, a) || !columnsCompatible(r, b) || !columnsCompatible(r, c))
      continue;
    for (int col = 0; col < 9; ++col)
      rem[col] = kAll9 & ~(ctx.bandCols[col] | (1u << a.vals[col]) | (1u << b.vals[col]) |
                           (1u << c.vals[col]) | (1u << r.vals[col]));
    total += buildTail(rem, r.stack).completions();
  }
  return total;
}

struct RowStageDraw {
  std::vector<Row> rows;  // rows 4..9, complete
};

// One row-stage trial; returns true and fills `draw` on acceptance.
bool sudokuTrial(SudokuStrategy strategy, const BandContext& ctx, RngStream& rng,
                 TrialLedger& ledger, RowStageDraw& draw) {
  const std::uint64_t poolSize = ctx.pool.size();
  const PackedRow& a = ctx.pool[rng.below(poolSize)];
  const PackedRow& b = ctx.pool[rng.below(poolSize)];
  if (!columnsCompatible(a, b) || !stacksDisjoint(a, b)) return false;
  const PackedRow& c = ctx.pool[rng.below(poolSize)];
  if (!columnsCompatible(a, c) || !columnsCompatible(b, c) || !stacksDisjoint(a, c) ||
      !stacksDisjoint(b, c))
    return false;

  auto unpack = [](const PackedRow& p) {
    Row r(9);
    for (int col = 0; col < 9; ++col) r[col] = p.vals[col] + 1;
    return r;
  };
  std::uint32_t rem[9];
  auto remainingAfter = [&](const PackedRow* extra) {
    for (int col = 0; col < 9; ++col) {
      std::uint32_t used = ctx.bandCols[col] | (1u << a.vals[col]) |
                           (1u << b.vals[col]) | (1u << c.vals[col]);
      if (extra) used |= 1u << extra->vals[col];
      rem[col] = kAll9 & ~used;
    }
  };

  if (strategy == SudokuStrategy::Rows4to6) {
    std::uint64_t d = sixRowCompletionCount(ctx, a, b, c);
    ledger.maxSixRowCount = std::max(ledger.maxSixRowCount, d);
    if (d > strategyDenominator(strategy))
      throw ContractError("six-row completion count exceeds the acceptance bound");
    if (d == 0 || !rng.bernoulli(d, strategyDenominator(strategy))) return false;
    // re-scan to locate the u-th completion (seventh row, then orientation)
    std::uint64_t u = rng.below(d);
    for (const PackedRow& r : ctx.pool) {
      if (!columnsCompatible(r, a) || !columnsCompatible(r, b) || !columnsCompatible(r, c))
        continue;
      remainingAfter(&r);
      TailCycles tail = buildTail(rem, r.stack);
      std::uint64_t here = tail.completions();
      if (u >= here) {
        u -= here;
        continue;
      }
      draw.rows = {unpack(a), unpack(b), unpack(c), unpack(r), Row(9), Row(9)};
      fillTailRows(tail, u, draw.rows[4], draw.rows[5]);
      return true;
    }
    throw ContractError("six-row completion selection ran past the counted total");
  }

  const PackedRow& r7 = ctx.pool[rng.below(poolSize)];
  if (!columnsCompatible(r7, a) || !columnsCompatible(r7, b) || !columnsCompatible(r7, c))
    return false;

  if (strategy == SudokuStrategy::Rows4to7) {
    remainingAfter(&r7);
    TailCycles tail = buildTail(rem, r7.stack);
    std::uint64_t d = tail.completions();
    if (d > 16) throw ContractError("seven-row completion count exceeds 16");
    if (d == 0 || !rng.bernoulli(d, 16)) return false;
    draw.rows = {unpack(a), unpack(b), unpack(c), unpack(r7), Row(9), Row(9)};
    fillTailRows(tail, rng.below(d), draw.rows[4], draw.rows[5]);
    return true;
  }

  // Rows4to8: the eighth row shares the third band with the seventh.
  const PackedRow& r8 = ctx.pool[rng.below(poolSize)];
  if (!columnsCompatible(r8, a) || !columnsCompatible(r8, b) || !columnsCompatible(r8, c) ||
      !columnsCompatible(r8, r7) || !stacksDisjoint(r8, r7))
    return false;
  std::uint32_t single[9];
  for (int col = 0; col < 9; ++col) {
    std::uint32_t used = ctx.bandCols[col] | (1u << a.vals[col]) | (1u << b.vals[col]) |
                         (1u << c.vals[col]) | (1u << r7.vals[col]) | (1u << r8.vals[col]);
    single[col] = kAll9 & ~used;
  }
  for (int s = 0; s < 3; ++s) {
    std::uint32_t u = single[3 * s] | single[3 * s + 1] | single[3 * s + 2];
    if (u != (kAll9 & ~(r7.stack[s] | r8.stack[s]))) return false;  // d = 0
  }
  // d = 1: the last row is uniquely determined
  Row row9(9);
  for (int col = 0; col < 9; ++col) row9[col] = ctz(single[col]) + 1;
  draw.rows = {unpack(a), unpack(b), unpack(c), unpack(r7), unpack(r8), row9};
  return true;
}

Grid assembleSudoku(const BandContext& ctx, const RowStageDraw& draw) {
  Grid g = ctx.band;
  for (const Row& r : draw.rows) g.rows.push_back(r);
  return g;
}

void requireValid(const Grid& g, const char* who) {
  ValidityReport report = validate(g);
  if (!report.valid)
    throw ContractError(std::string(who) + " produced an invalid grid: " + report.message);
}

}  // namespace

const char* strategyName(SudokuStrategy s) {
  switch (s) {
    case SudokuStrategy::Rows4to7: return "r4r7";
    case SudokuStrategy::Rows4to8: return "r4r8";
    case SudokuStrategy::Rows4to6: return "r4r6";
  }
  return "?";
}

std::optional<SudokuStrategy> strategyFromName(const std::string& name) {
  if (name == "r4r7") return SudokuStrategy::Rows4to7;
  if (name == "r4r8") return SudokuStrategy::Rows4to8;
  if (name == "r4r6") return SudokuStrategy::Rows4to6;
  return std::nullopt;
}

std::uint64_t strategyDenominator(SudokuStrategy s) {
  switch (s) {
    case SudokuStrategy::Rows4to7: return 16;    // tight seven-row bound
    case SudokuStrategy::Rows4to8: return 1;     // unique-completion acceptance
    case SudokuStrategy::Rows4to6: return 4887;  // floor(2^4.5 * 6^3)
  }
  return 0;
}

int strategyRowCount(SudokuStrategy s) {
  switch (s) {
    case SudokuStrategy::Rows4to7: return 4;
    case SudokuStrategy::Rows4to8: return 5;
    case SudokuStrategy::Rows4to6: return 3;
  }
  return 0;
}

SampleResult sampleSudoku(SudokuStrategy strategy, const BandTable& table,
                          RngStream& rng, const SampleOptions& options) {
  SampleResult out;
  auto bandStart = Clock::now();
  BandDraw bandDraw = sampleBand(table, rng);
  out.ledger.bandTrials = bandDraw.trials;
  BandContext ctx = makeBandContext(std::move(bandDraw.band));
  out.ledger.bandElapsedMs = msSince(bandStart);

  auto rowStart = Clock::now();
  RowStageDraw draw;
  if (options.workers <= 1) {
    for (;;) {
      ++out.ledger.rowTrials;
      if (options.trialCeiling && out.ledger.rowTrials > options.trialCeiling)
        throw TrialCeilingError("sampleSudoku: row-stage trial ceiling reached");
      if (sudokuTrial(strategy, ctx, rng, out.ledger, draw)) break;
    }
  } else {
    std::atomic<bool> won{false};
    std::atomic<int> winner{-1};
    std::vector<TrialLedger> ledgers(options.workers);
    std::vector<RowStageDraw> draws(options.workers);
    std::vector<std::thread> pool;
    for (int w = 0; w < options.workers; ++w) {
      pool.emplace_back([&, w] {
        RngStream local(options.seed, options.workerStreamBase + w);
        while (!won.load(std::memory_order_relaxed)) {
          ++ledgers[w].rowTrials;
          if (options.trialCeiling && ledgers[w].rowTrials > options.trialCeiling) return;
          if (sudokuTrial(strategy, ctx, local, ledgers[w], draws[w])) {
            bool expected = false;
            if (won.compare_exchange_strong(expected, true)) winner.store(w);
            return;
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& l : ledgers) out.ledger.mergeFrom(l);
    if (winner.load() < 0)
      throw TrialCeilingError("sampleSudoku: row-stage trial ceiling reached");
    draw = draws[winner.load()];
  }
  out.ledger.rowElapsedMs = msSince(rowStart);
  ++out.ledger.acceptances;

  out.grid = applySudokuFinishers(assembleSudoku(ctx, draw), rng);
  requireValid(out.grid, "sampleSudoku");
  return out;
}

namespace {

SampleResult samplePrefixRejection(int n, std::optional<BlockShape> shape, RngStream& rng,
                                   const LatinOptions& options) {
  if (n < 1 || n > kMaxOrder)
    throw std::invalid_argument("order must be in 1.." + std::to_string(kMaxOrder));
  if (shape && shape->order() != n)
    throw std::invalid_argument("block shape does not match order");
  if (shape && options.reducedFirstColumn)
    throw std::invalid_argument("the reduced variant needs the row-permutation "
                                "finisher, which block constraints forbid");
  SampleResult out;
  if (n == 1) {
    out.grid = Grid::empty(1, shape);
    out.grid.rows.push_back({1});
    out.ledger.rowTrials = 1;
    out.ledger.acceptances = 1;
    return out;
  }
  int k = options.k;
  if (k == 0) k = std::clamp(n - 3, 1, n - 1);
  if (k < 1 || k > n - 1)
    throw std::invalid_argument("prefix length k must be in 1..n-1");
  if (options.reducedFirstColumn && k >= 2 && n < 3)
    throw std::invalid_argument("reduced variant needs n >= 3");

  const std::uint64_t denominator = completionUpperBound64(n, k);
  Grid prefix = Grid::empty(n, shape);
  Row identity(n);
  std::iota(identity.begin(), identity.end(), 1);

  auto rowStart = Clock::now();
  for (;;) {
    ++out.ledger.rowTrials;
    if (options.trialCeiling && out.ledger.rowTrials > options.trialCeiling)
      throw TrialCeilingError("sampleLatin: trial ceiling reached");

    prefix.rows.clear();
    prefix.rows.push_back(identity);
    bool clash = false;
    std::vector<std::uint32_t> colUsed(n), blockUsed(shape ? n : 0);
    for (int c = 0; c < n; ++c) {
      colUsed[c] = 1u << c;
      if (shape) blockUsed[prefix.blockIndex(0, c)] |= 1u << c;
    }
    for (int r = 1; r < k && !clash; ++r) {
      Row row = options.reducedFirstColumn
                    ? uniformDerangementStartingWith(n, r + 1, rng)
                    : uniformDerangement(n, rng);
      for (int c = 0; c < n; ++c) {
        std::uint32_t bit = 1u << (row[c] - 1);
        if (colUsed[c] & bit) { clash = true; break; }
        if (shape) {
          std::uint32_t& blk = blockUsed[prefix.blockIndex(r, c)];
          if (blk & bit) { clash = true; break; }
          blk |= bit;
        }
        colUsed[c] |= bit;
      }
      if (!clash) prefix.rows.push_back(std::move(row));
    }
    if (clash) continue;  // d = 0

    CompletionResult d = countCompletions(prefix, denominator);
    if (d.overflowed)
      throw ContractError("completion count exceeds the acceptance denominator");
    if (d.count == 0) continue;
    if (!options.skipAcceptanceBiasCheck && !rng.bernoulli(d.count, denominator))
      continue;

    out.ledger.rowElapsedMs = msSince(rowStart);
    ++out.ledger.acceptances;
    Grid full = uniformCompletion(prefix, rng);
    out.grid = shape ? applyRelabelFinisher(full, rng) : applyLatinFinishers(full, rng);
    requireValid(out.grid, shape ? "sampleRCSudoku" : "sampleLatin");
    return out;
  }
}

}  // namespace

SampleResult sampleLatin(int n, RngStream& rng, const LatinOptions& options) {
  return samplePrefixRejection(n, std::nullopt, rng, options);
}

SampleResult sampleRCSudoku(BlockShape shape, int k, RngStream& rng,
                            const LatinOptions& options) {
  LatinOptions opts = options;
  opts.k = k;
  return samplePrefixRejection(shape.order(), shape, rng, opts);
}

NaiveResult sampleNaiveRejection(NaiveKind kind, int n, std::optional<BlockShape> shape,
                                 RngStream& rng, std::uint64_t trialBudget) {
  if (trialBudget < 1) throw std::invalid_argument("trial budget must be >= 1");
  if (n < 1 || n > kMaxOrder) throw std::invalid_argument("order out of range");
  if (shape && shape->order() != n)
    throw std::invalid_argument("block shape does not match order");
  NaiveResult out;
  for (std::uint64_t t = 0; t < trialBudget; ++t) {
    ++out.ledger.rowTrials;
    Grid g = Grid::empty(n, shape);
    switch (kind) {
      case NaiveKind::IidCells: {
        for (int r = 0; r < n; ++r) {
          Row row(n);
          for (int c = 0; c < n; ++c) row[c] = static_cast<int>(rng.below(n)) + 1;
          g.rows.push_back(std::move(row));
        }
        break;
      }
      case NaiveKind::IidRows: {
        for (int r = 0; r < n; ++r) g.rows.push_back(uniformPermutation(n, rng));
        break;
      }
      case NaiveKind::FixedRowDerangements: {
        Row identity(n);
        std::iota(identity.begin(), identity.end(), 1);
        g.rows.push_back(identity);
        for (int r = 1; r < n - 1; ++r) g.rows.push_back(uniformDerangement(n, rng));
        // the last row is forced column-wise when each column misses
        // exactly one value
        Row last(n, 0);
        std::vector<std::uint32_t> colUsed(n, 0);
        bool broken = false;
        for (int r = 0; r < n - 1 && !broken; ++r)
          for (int c = 0; c < n; ++c) {
            std::uint32_t bit = 1u << (g.rows[r][c] - 1);
            if (colUsed[c] & bit) { broken = true; break; }
            colUsed[c] |= bit;
          }
        if (broken) continue;
        for (int c = 0; c < n; ++c) {
          std::uint32_t missing = ((1u << n) - 1) & ~colUsed[c];
          last[c] = ctz(missing) + 1;
        }
        g.rows.push_back(std::move(last));
        break;
      }
    }
    if (!validate(g).valid) continue;
    ++out.ledger.acceptances;
    if (kind == NaiveKind::FixedRowDerangements) g = applyRelabelFinisher(g, rng);
    out.grid = std::move(g);
    return out;
  }
  return out;  // budget exhausted
}

Grid applyRelabelFinisher(const Grid& grid, RngStream& rng) {
  Row relabel = uniformPermutation(grid.n, rng);
  Grid out = grid;
  for (Row& row : out.rows)
    for (int& v : row) v = relabel[v - 1];
  return out;
}

Grid applyLatinFinishers(const Grid& grid, RngStream& rng) {
  Grid out = grid;
  rng.shuffle(out.rows);
  return applyRelabelFinisher(out, rng);
}

Grid applySudokuFinishers(const Grid& grid, RngStream& rng) {
  if (grid.n != 9 || !grid.shape || !(*grid.shape == BlockShape{3, 3}))
    throw std::invalid_argument("Sudoku finishers need a full (3,3) grid");
  Grid out = grid;
  auto permuteColumns = [&](int base) {
    Row perm = uniformPermutation(3, rng);
    for (Row& row : out.rows) {
      int tmp[3];
      for (int i = 0; i < 3; ++i) tmp[i] = row[base + perm[i] - 1];
      for (int i = 0; i < 3; ++i) row[base + i] = tmp[i];
    }
  };
  permuteColumns(3);
  permuteColumns(6);
  if (rng.bernoulli(1, 2))
    for (Row& row : out.rows)
      for (int c = 0; c < 3; ++c) std::swap(row[3 + c], row[6 + c]);
  return applyRelabelFinisher(out, rng);
}

std::string formatStatsRecord(
    const std::vector<std::pair<std::string, std::string>>& keyValues) {
  std::ostringstream os;
  for (const auto& [k, v] : keyValues) os << k << '=' << v << '\n';
  return os.str();
}

}  // namespace pdcsq

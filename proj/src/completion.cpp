#include "pdcsq/completion.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <numeric>
#include <sstream>

#include "pdcsq/errors.hpp"

namespace pdcsq {

namespace {

inline int popcount(std::uint32_t x) { return std::popcount(x); }
inline int lowestBitIndex(std::uint32_t x) { return std::countr_zero(x); }

// Backtracking state over the unfilled rows of a prefix. Blocks with a
// single row or column impose nothing beyond the Latin conditions and are
// treated as absent.
class Engine {
 public:
  explicit Engine(const Grid& grid, bool requireNotFull = true) {
    ValidityReport report = validate(grid);
    if (!report.valid)
      throw std::invalid_argument("invalid grid: " + report.message);
    if (requireNotFull && grid.full())
      throw std::invalid_argument("grid is already full");
    n_ = grid.n;
    k_ = grid.filled();
    full_ = (1u << n_) - 1;
    blocks_ = grid.shape && grid.shape->r >= 2 && grid.shape->c >= 2;
    if (blocks_) {
      blockRows_ = grid.shape->r;
      blockCols_ = grid.shape->c;
    }
    colAvail_.assign(n_, full_);
    blockAvail_.assign(blocks_ ? n_ : 0, full_);
    for (int r = 0; r < k_; ++r)
      for (int c = 0; c < n_; ++c) {
        std::uint32_t bit = 1u << (grid.rows[r][c] - 1);
        colAvail_[c] &= ~bit;
        if (blocks_) blockAvail_[blockIndex(r, c)] &= ~bit;
      }
  }

  // --- counting ----------------------------------------------------------

  CompletionResult count(std::optional<std::uint64_t> cap) {
    cap_ = cap;
    result_ = {};
    currentRow_ = k_;
    countRows();
    return result_;
  }

  std::uint64_t pairStageCount() const { return pairCount(); }

  // --- lexicographic enumeration ----------------------------------------

  // Visits completions in lexicographic order until the visitor returns
  // false. The visitor receives the rows k..n-1.
  template <typename Visitor>
  void enumerate(Visitor&& visit) {
    visitor_ = [&](const std::vector<Row>& rows) { return visit(rows); };
    done_ = false;
    pendingRows_.clear();
    currentRow_ = k_;
    enumerateRows();
  }

  std::vector<Row> candidateNextRows() {
    std::vector<Row> out;
    Row row(n_);
    lexRowDfs(0, 0, row, [&](const Row& r) {
      out.push_back(r);
      return true;
    });
    return out;
  }

 private:
  int blockIndex(int r, int c) const {
    return (r / blockRows_) * blockRows_ + c / blockCols_;
  }

  std::uint32_t cellCandidates(int col, std::uint32_t rowUsed) const {
    std::uint32_t cand = colAvail_[col] & ~rowUsed;
    if (blocks_) cand &= blockAvail_[blockIndexCache_[col]];
    return cand;
  }

  void place(int col, std::uint32_t bit) {
    colAvail_[col] &= ~bit;
    if (blocks_) blockAvail_[blockIndexCache_[col]] &= ~bit;
  }
  void unplace(int col, std::uint32_t bit) {
    colAvail_[col] |= bit;
    if (blocks_) blockAvail_[blockIndexCache_[col]] |= bit;
  }

  void refreshBlockCache() {
    if (!blocks_) return;
    blockIndexCache_.resize(n_);
    for (int c = 0; c < n_; ++c) blockIndexCache_[c] = blockIndex(currentRow_, c);
  }

  // Counting DFS over whole rows; cells within a row are filled in
  // minimum-remaining-values order.
  void countRows() {
    int left = n_ - currentRow_;
    if (result_.overflowed) return;
    if (left == 0) {
      bump(1);
      return;
    }
    if (left == 1) {
      bump(forcedRowCount());
      return;
    }
    if (left == 2) {
      bump(pairCount());
      return;
    }
    refreshBlockCache();
    countCellDfs(0, 0);
  }

  void countCellDfs(std::uint32_t filledCols, std::uint32_t rowUsed) {
    if (result_.overflowed) return;
    if (filledCols == full_) {
      ++currentRow_;
      countRows();
      --currentRow_;
      refreshBlockCache();
      return;
    }
    // pick the unfilled column with fewest candidates
    int bestCol = -1, bestCount = 1 << 30;
    std::uint32_t open = full_ & ~filledCols;
    for (std::uint32_t m = open; m;) {
      int c = lowestBitIndex(m);
      m &= m - 1;
      int cnt = popcount(cellCandidates(c, rowUsed));
      if (cnt < bestCount) {
        bestCount = cnt;
        bestCol = c;
        if (cnt <= 1) break;
      }
    }
    if (bestCount == 0) return;
    std::uint32_t cand = cellCandidates(bestCol, rowUsed);
    while (cand) {
      std::uint32_t bit = cand & (~cand + 1);
      cand ^= bit;
      place(bestCol, bit);
      countCellDfs(filledCols | (1u << bestCol), rowUsed | bit);
      unplace(bestCol, bit);
    }
  }

  // Exactly one row remains: it is forced cell-wise; only block clashes
  // can rule it out.
  std::uint64_t forcedRowCount() const {
    if (!blocks_) return 1;
    std::vector<std::uint32_t> blockNew(n_, 0);
    for (int c = 0; c < n_; ++c) {
      std::uint32_t v = colAvail_[c];
      int b = blockIndex(n_ - 1, c);
      if ((blockAvail_[b] & v) == 0 || (blockNew[b] & v)) return 0;
      blockNew[b] |= v;
    }
    return 1;
  }

  // Exactly two rows remain: each column contributes an ordered pair and
  // valid completions correspond to orientations of the column/value
  // cycles, 2 per cycle. Block feasibility does not depend on the
  // orientation because both pair members land in the same block.
  std::uint64_t pairCount() const {
    if (blocks_) {
      std::vector<std::uint32_t> blockNew(n_, 0);
      for (int c = 0; c < n_; ++c) {
        std::uint32_t pair = colAvail_[c];
        int b = blockIndex(n_ - 1, c);
        if ((blockAvail_[b] & pair) != pair || (blockNew[b] & pair)) return 0;
        blockNew[b] |= pair;
      }
    }
    // columns holding each value: exactly two per value for a valid prefix
    int firstCol[32], secondCol[32];
    for (int v = 0; v < n_; ++v) firstCol[v] = secondCol[v] = -1;
    for (int c = 0; c < n_; ++c) {
      std::uint32_t m = colAvail_[c];
      while (m) {
        int v = lowestBitIndex(m);
        m &= m - 1;
        (firstCol[v] < 0 ? firstCol[v] : secondCol[v]) = c;
      }
    }
    std::uint32_t seen = 0;
    int cycles = 0;
    for (int c0 = 0; c0 < n_; ++c0) {
      if (seen & (1u << c0)) continue;
      ++cycles;
      int c = c0;
      int v = lowestBitIndex(colAvail_[c]);
      for (;;) {
        seen |= 1u << c;
        int nxt = firstCol[v] == c ? secondCol[v] : firstCol[v];
        if (seen & (1u << nxt)) break;
        c = nxt;
        v = lowestBitIndex(colAvail_[c] & ~(1u << v));
      }
    }
    return 1ull << cycles;
  }

  void bump(std::uint64_t by) {
    result_.count += by;
    if (cap_ && result_.count > *cap_) result_.overflowed = true;
  }

  // Lexicographic DFS used for materialization and k-th selection; plain
  // left-to-right cell order, ascending values.
  void enumerateRows() {
    if (done_) return;
    if (currentRow_ == n_) {
      done_ = !visitor_(pendingRows_);
      return;
    }
    refreshBlockCache();
    Row row(n_);
    lexRowDfs(0, 0, row, [&](const Row& complete) {
      pendingRows_.push_back(complete);
      ++currentRow_;
      enumerateRows();
      --currentRow_;
      refreshBlockCache();
      pendingRows_.pop_back();
      return !done_;
    });
  }

  template <typename OnRow>
  bool lexRowDfs(int col, std::uint32_t rowUsed, Row& row, OnRow&& onRow) {
    if (col == n_) return onRow(static_cast<const Row&>(row));
    std::uint32_t cand = cellCandidates(col, rowUsed);
    while (cand) {
      std::uint32_t bit = cand & (~cand + 1);
      cand ^= bit;
      row[col] = lowestBitIndex(bit) + 1;
      place(col, bit);
      bool keepGoing = lexRowDfs(col + 1, rowUsed | bit, row, onRow);
      unplace(col, bit);
      if (!keepGoing) return false;
    }
    return true;
  }

  int n_ = 0, k_ = 0;
  std::uint32_t full_ = 0;
  bool blocks_ = false;
  int blockRows_ = 0, blockCols_ = 0;
  std::vector<std::uint32_t> colAvail_, blockAvail_;
  std::vector<int> blockIndexCache_;
  int currentRow_ = 0;
  std::optional<std::uint64_t> cap_;
  CompletionResult result_;
  std::function<bool(const std::vector<Row>&)> visitor_;
  std::vector<Row> pendingRows_;
  bool done_ = false;
};

Grid withRows(const Grid& prefix, const std::vector<Row>& tail) {
  Grid g = prefix;
  for (const Row& r : tail) g.rows.push_back(r);
  return g;
}

}  // namespace

CandidateRowSet candidateRows(const Grid& grid) {
  Engine engine(grid);
  CandidateRowSet set;
  set.prefixKey = formatGridLine(grid);
  set.rows = engine.candidateNextRows();
  return set;
}

CompletionResult countCompletions(const Grid& grid, std::optional<std::uint64_t> cap) {
  if (grid.full()) {
    Engine check(grid, /*requireNotFull=*/false);  // validates
    return {1, false};
  }
  Engine engine(grid);
  return engine.count(cap);
}

CompletionResult lastTwoRowsCompletions(const Grid& grid) {
  if (grid.filled() != grid.n - 2)
    throw std::invalid_argument("lastTwoRowsCompletions needs exactly n-2 filled rows");
  Engine engine(grid);
  return {engine.pairStageCount(), false};
}

std::vector<Grid> materializeCompletions(const Grid& grid, std::uint64_t maxCount) {
  std::vector<Grid> out;
  Engine engine(grid);
  bool exceeded = false;
  engine.enumerate([&](const std::vector<Row>& tail) {
    if (out.size() == maxCount) {
      exceeded = true;
      return false;
    }
    out.push_back(withRows(grid, tail));
    return true;
  });
  if (exceeded)
    throw VerifyError("materializeCompletions: more completions than the cap of " +
                      std::to_string(maxCount));
  return out;
}

Grid kthCompletion(const Grid& grid, std::uint64_t index) {
  Engine engine(grid);
  std::optional<Grid> hit;
  std::uint64_t remaining = index;
  engine.enumerate([&](const std::vector<Row>& tail) {
    if (remaining == 0) {
      hit = withRows(grid, tail);
      return false;
    }
    --remaining;
    return true;
  });
  if (!hit) throw std::invalid_argument("kthCompletion: index out of range");
  return *hit;
}

Grid uniformCompletion(const Grid& grid, RngStream& rng) {
  if (grid.full()) {
    Engine check(grid, /*requireNotFull=*/false);
    return grid;
  }
  CompletionResult d = countCompletions(grid);
  if (d.count == 0)
    throw std::invalid_argument("uniformCompletion: prefix has no completion");
  return kthCompletion(grid, rng.below(d.count));
}

mpz_class completionUpperBound(int n, int k) {
  if (n < 1 || k < 0 || k >= n)
    throw std::invalid_argument("completionUpperBound: need 0 <= k < n");
  const int m = n - k;
  unsigned long lcm = 1;
  for (int l = 1; l <= m; ++l) lcm = std::lcm<unsigned long>(lcm, l);
  // product of (l!)^(n*lcm/l) is the lcm-th power of the real bound
  mpz_class power = 1, factorial = 1;
  for (int l = 1; l <= m; ++l) {
    factorial *= l;
    mpz_class term;
    unsigned long exponent = static_cast<unsigned long>(n) * (lcm / l);
    mpz_pow_ui(term.get_mpz_t(), factorial.get_mpz_t(), exponent);
    power *= term;
  }
  mpz_class root;
  mpz_root(root.get_mpz_t(), power.get_mpz_t(), lcm);
  return root;
}

std::uint64_t completionUpperBound64(int n, int k) {
  mpz_class bound = completionUpperBound(n, k);
  if (!bound.fits_ulong_p() || bound > mpz_class("9223372036854775807"))
    throw std::invalid_argument("completion upper bound does not fit in 63 bits");
  return static_cast<std::uint64_t>(bound.get_ui());
}

}  // namespace pdcsq

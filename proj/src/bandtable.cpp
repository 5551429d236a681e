#include "pdcsq/bandtable.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "pdcsq/errors.hpp"

namespace pdcsq {

namespace {

constexpr std::uint32_t kAll = 0x1FF;

inline int ctz(std::uint32_t x) { return std::countr_zero(x); }

// --- catalog completion counter -----------------------------------------
//
// Counts completions of a fixed band with rows 4-6 and rows 7-9 each in
// ascending order and row 4 before row 7 (one representative per 72-orbit).
// Rows sharing a column never share its value, so the lexicographic
// constraints collapse to the column-0 values: row 4 takes the smallest
// remaining value of column 0, rows 5 and 6 ascend there, row 7 takes the
// smallest value left after the middle band, and of the 2^cycles
// orientations of the final two rows exactly half keep row 8 below row 9.
class BandCounter {
 public:
  explicit BandCounter(const Grid& band) {
    for (int c = 0; c < 9; ++c) {
      colUsed_[c] = 0;
      for (int r = 0; r < 3; ++r) colUsed_[c] |= 1u << (band.rows[r][c] - 1);
    }
  }

  std::uint64_t count() {
    total_ = 0;
    middleRow(0, 0, 0, 0);
    return total_;
  }

 private:
  void middleRow(int ridx, int col, std::uint32_t rowUsed, std::uint32_t gate) {
    if (col == 9) {
      if (ridx == 2) {
        if (stacksCoverable()) seventhRow(0, 0);
      } else {
        middleRow(ridx + 1, 0, 0, col0Value_);
      }
      return;
    }
    std::uint32_t cand = ~(colUsed_[col] | stackUsed_[col / 3] | rowUsed) & kAll;
    if (col == 0) {
      if (ridx == 0)
        cand = cand ? (1u << ctz(cand)) : 0;  // global minimum
      else
        cand &= ~(gate | (gate - 1));  // strictly above the previous row
    }
    while (cand) {
      std::uint32_t bit = cand & (~cand + 1);
      cand ^= bit;
      colUsed_[col] |= bit;
      stackUsed_[col / 3] |= bit;
      if (col == 0) col0Value_ = bit;
      middleRow(ridx, col + 1, rowUsed | bit, gate);
      colUsed_[col] ^= bit;
      stackUsed_[col / 3] ^= bit;
    }
  }

  bool stacksCoverable() const {
    for (int s = 0; s < 3; ++s) {
      std::uint32_t u = 0;
      for (int c = 3 * s; c < 3 * s + 3; ++c) u |= ~colUsed_[c] & kAll;
      if (u != kAll) return false;
    }
    return true;
  }

  void seventhRow(int col, std::uint32_t rowUsed) {
    if (col == 9) {
      total_ += tailOrientations();
      return;
    }
    std::uint32_t cand = ~(colUsed_[col] | rowUsed) & kAll;
    if (col == 0) cand = 1u << ctz(~colUsed_[0] & kAll);  // forced minimum
    while (cand) {
      std::uint32_t bit = cand & (~cand + 1);
      cand ^= bit;
      colUsed_[col] |= bit;
      seventhRow(col + 1, rowUsed | bit);
      colUsed_[col] ^= bit;
    }
  }

  // Two values left per column; count the column/value cycles.
  std::uint64_t tailOrientations() const {
    int firstCol[9], secondCol[9];
    std::uint32_t rem[9];
    for (int v = 0; v < 9; ++v) firstCol[v] = -1;
    for (int c = 0; c < 9; ++c) {
      rem[c] = ~colUsed_[c] & kAll;
      std::uint32_t m = rem[c];
      while (m) {
        int v = ctz(m);
        m &= m - 1;
        (firstCol[v] < 0 ? firstCol[v] : secondCol[v]) = c;
      }
    }
    std::uint32_t seen = 0;
    int cycles = 0;
    for (int c0 = 0; c0 < 9; ++c0) {
      if (seen & (1u << c0)) continue;
      ++cycles;
      int c = c0;
      int v = ctz(rem[c]);
      for (;;) {
        seen |= 1u << c;
        int nxt = firstCol[v] == c ? secondCol[v] : firstCol[v];
        if (seen & (1u << nxt)) break;
        c = nxt;
        v = ctz(rem[c] & ~(1u << v));
      }
    }
    return 1ull << (cycles - 1);
  }

  std::uint32_t colUsed_[9];
  std::uint32_t stackUsed_[3] = {0, 0, 0};
  std::uint32_t col0Value_ = 0;
  std::uint64_t total_ = 0;
};

Grid bandFromRows(const std::array<std::array<int, 9>, 3>& rows) {
  Grid g = Grid::empty(9, BlockShape{3, 3});
  for (const auto& r : rows) g.rows.emplace_back(r.begin(), r.end());
  return g;
}

std::array<std::array<int, 9>, 3> rowsOf(const BandEntry& e) {
  std::array<std::array<int, 9>, 3> rows{};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) rows[r][c] = 3 * r + c + 1;
    for (int c = 0; c < 6; ++c) rows[r][c + 3] = e.tuples[r][c];
  }
  return rows;
}

}  // namespace

Grid BandEntry::band() const { return bandFromRows(rowsOf(*this)); }

std::string BandEntry::tupleText() const {
  std::string s = "[";
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 6; ++c) s += static_cast<char>('0' + tuples[r][c]);
    s += r < 2 ? "," : "]";
  }
  return s;
}

BandEntry parseBandLine(const std::string& line, int lineNo) {
  BandEntry e;
  std::size_t pos = 0;
  auto fail = [&](const char* what) -> ParseError {
    return ParseError(std::string("band table: ") + what, lineNo);
  };
  auto skipSpace = [&] {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
  };
  skipSpace();
  if (pos >= line.size() || line[pos] != '[') throw fail("expected '['");
  ++pos;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 6; ++c) {
      if (pos >= line.size() || line[pos] < '1' || line[pos] > '9')
        throw fail("expected a digit 1..9");
      e.tuples[r][c] = line[pos++] - '0';
    }
    char want = r < 2 ? ',' : ']';
    if (pos >= line.size() || line[pos] != want) throw fail("bad tuple separator");
    ++pos;
  }
  skipSpace();
  if (line.compare(pos, 2, "=>") != 0) throw fail("expected '=>'");
  pos += 2;
  skipSpace();
  if (pos >= line.size() || !std::isdigit(static_cast<unsigned char>(line[pos])))
    throw fail("expected a count");
  std::uint64_t count = 0;
  while (pos < line.size() && std::isdigit(static_cast<unsigned char>(line[pos]))) {
    count = count * 10 + (line[pos++] - '0');
    if (count > (1ull << 62)) throw fail("count out of range");
  }
  skipSpace();
  if (pos != line.size()) throw fail("trailing characters");
  e.count = count;
  return e;
}

BandTable makeTableUnchecked(std::vector<BandEntry> entries) {
  BandTable t;
  t.entries = std::move(entries);
  t.sum = 0;
  t.min = ~0ull;
  t.max = 0;
  for (const BandEntry& e : t.entries) {
    t.sum += e.count;
    t.min = std::min(t.min, e.count);
    t.max = std::max(t.max, e.count);
  }
  return t;
}

BandTable parseBandTable(std::istream& in) {
  std::vector<BandEntry> entries;
  std::set<std::string> seen;
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    BandEntry e = parseBandLine(line, lineNo);
    if (!seen.insert(e.tupleText()).second)
      throw VerifyError("band table: duplicate band " + e.tupleText() + " at line " +
                        std::to_string(lineNo));
    ValidityReport report = validate(e.band());
    if (!report.valid)
      throw VerifyError("band table: invalid band " + e.tupleText() + " at line " +
                        std::to_string(lineNo) + ": " + report.message);
    if (e.count < kBandTableMin || e.count > kBandTableMax)
      throw VerifyError("band table: count " + std::to_string(e.count) +
                        " outside the pinned range at line " + std::to_string(lineNo));
    entries.push_back(std::move(e));
  }
  if (static_cast<int>(entries.size()) != kBandTableEntries)
    throw VerifyError("band table: expected " + std::to_string(kBandTableEntries) +
                      " entries, found " + std::to_string(entries.size()));
  BandTable t = makeTableUnchecked(std::move(entries));
  if (t.sum != kBandTableSum)
    throw VerifyError("band table: sum " + std::to_string(t.sum) + " != pinned " +
                      std::to_string(kBandTableSum));
  if (t.min != kBandTableMin || t.max != kBandTableMax)
    throw VerifyError("band table: min/max do not match the pinned constants");
  return t;
}

BandTable loadBandTable(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open band table file: " + path);
  return parseBandTable(in);
}

BandDraw sampleBand(const BandTable& table, RngStream& rng) {
  BandDraw draw;
  for (;;) {
    ++draw.trials;
    std::uint64_t i = rng.below(table.entries.size());
    if (rng.bernoulli(table.entries[i].count, table.max)) {
      draw.index = static_cast<int>(i);
      draw.band = table.entries[i].band();
      return draw;
    }
  }
}

BandCompletionCount countBandCompletions(const Grid& band) {
  if (band.n != 9 || !band.shape || !(*band.shape == BlockShape{3, 3}) ||
      band.filled() != 3)
    throw std::invalid_argument("countBandCompletions: need a 3-row band of shape (3,3)");
  ValidityReport report = validate(band);
  if (!report.valid)
    throw std::invalid_argument("countBandCompletions: invalid band: " + report.message);
  BandCounter counter(band);
  return {counter.count()};
}

std::uint64_t verifyBandEntry(const BandEntry& entry) {
  std::uint64_t recomputed = countBandCompletions(entry.band()).catalog;
  if (recomputed != entry.count)
    throw VerifyError("band " + entry.tupleText() + ": recomputed " +
                      std::to_string(recomputed) + ", table says " +
                      std::to_string(entry.count));
  return recomputed;
}

Grid bandFromTupleText(const std::string& text) {
  BandEntry e = parseBandLine(text + " => 0");
  return e.band();
}

// --- regeneration --------------------------------------------------------

namespace {

struct RawBand {
  std::array<std::array<int, 9>, 3> rows;
};

void forEachSecondThirdRow(std::array<std::array<int, 9>, 3>& rows,
                           const std::function<void()>& emit) {
  std::uint32_t colUsed[9], stackUsed[3];
  auto recurse = [&](auto&& self, int r, int c) -> void {
    if (c == 9) {
      if (r == 1) {
        self(self, 2, 3);
        return;
      }
      emit();
      return;
    }
    std::uint32_t rowUsed = 0;
    for (int cc = 3; cc < c; ++cc) rowUsed |= 1u << (rows[r][cc] - 1);
    std::uint32_t blockFixed = 0;
    for (int cc = 0; cc < 3; ++cc) blockFixed |= 1u << (rows[r][cc] - 1);
    std::uint32_t cand = ~(colUsed[c] | stackUsed[c / 3] | rowUsed | blockFixed) & kAll;
    while (cand) {
      std::uint32_t bit = cand & (~cand + 1);
      cand ^= bit;
      rows[r][c] = ctz(bit) + 1;
      colUsed[c] |= bit;
      stackUsed[c / 3] |= bit;
      self(self, r, c + 1);
      colUsed[c] ^= bit;
      stackUsed[c / 3] ^= bit;
    }
  };
  // seed masks from row 0 and the fixed first stack of rows 1,2
  for (int c = 0; c < 9; ++c) colUsed[c] = 1u << (rows[0][c] - 1);
  for (int r = 1; r < 3; ++r)
    for (int c = 0; c < 3; ++c) colUsed[c] |= 1u << (rows[r][c] - 1);
  stackUsed[0] = 0;  // unused for columns 0..2
  for (int s = 1; s < 3; ++s) {
    stackUsed[s] = 0;
    for (int c = 3 * s; c < 3 * s + 3; ++c) stackUsed[s] |= 1u << (rows[0][c] - 1);
  }
  recurse(recurse, 1, 3);
}

BandEntry entryFromRows(const std::array<std::array<int, 9>, 3>& rows) {
  BandEntry e;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 6; ++c) e.tuples[r][c] = rows[r][c + 3];
  return e;
}

// Sorts stacks 2,3 of a band by its first row and orders the two stacks;
// assumes block 1 is already standard.
void canonicalizeTail(std::array<std::array<int, 9>, 3>& rows) {
  auto sortStack = [&](int s) {
    int order[3] = {3 * s, 3 * s + 1, 3 * s + 2};
    std::sort(order, order + 3, [&](int a, int b) { return rows[0][a] < rows[0][b]; });
    std::array<std::array<int, 3>, 3> tmp;
    for (int r = 0; r < 3; ++r)
      for (int i = 0; i < 3; ++i) tmp[r][i] = rows[r][order[i]];
    for (int r = 0; r < 3; ++r)
      for (int i = 0; i < 3; ++i) rows[r][3 * s + i] = tmp[r][i];
  };
  sortStack(1);
  sortStack(2);
  if (rows[0][3] > rows[0][6])
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) std::swap(rows[r][3 + c], rows[r][6 + c]);
}

// Minimum catalog tuple over the count-preserving transformations: permute
// the band rows, choose any stack (with any column order) as the new first
// stack, relabel so block 1 is standard again, re-canonicalize.
std::string minimalClassKey(const std::array<std::array<int, 9>, 3>& rows) {
  static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                  {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  std::string best;
  for (const auto& rp : perms) {
    for (int s1 = 0; s1 < 3; ++s1) {
      for (const auto& cp : perms) {
        std::array<std::array<int, 9>, 3> m;
        // new first stack: columns of stack s1 permuted by cp
        for (int r = 0; r < 3; ++r) {
          for (int i = 0; i < 3; ++i) m[r][i] = rows[rp[r]][3 * s1 + cp[i]];
          int out = 3;
          for (int s = 0; s < 3; ++s) {
            if (s == s1) continue;
            for (int c = 0; c < 3; ++c) m[r][out++] = rows[rp[r]][3 * s + c];
          }
        }
        int relabel[10];
        for (int r = 0; r < 3; ++r)
          for (int c = 0; c < 3; ++c) relabel[m[r][c]] = 3 * r + c + 1;
        for (auto& row : m)
          for (int& v : row) v = relabel[v];
        canonicalizeTail(m);
        std::string key;
        key.reserve(18);
        for (int r = 0; r < 3; ++r)
          for (int c = 3; c < 9; ++c) key += static_cast<char>('0' + m[r][c]);
        if (best.empty() || key < best) best = key;
      }
    }
  }
  return best;
}

std::string ownKey(const BandEntry& e) {
  std::string key;
  key.reserve(18);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 6; ++c) key += static_cast<char>('0' + e.tuples[r][c]);
  return key;
}

}  // namespace

std::vector<BandEntry> enumerateCanonicalBands() {
  std::vector<BandEntry> entries;
  // first-row forms: stack 2 takes a sorted 3-subset of {4..9} containing 4
  int rest[5] = {5, 6, 7, 8, 9};
  for (int a = 0; a < 5; ++a) {
    for (int b = a + 1; b < 5; ++b) {
      std::array<std::array<int, 9>, 3> rows{};
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) rows[r][c] = 3 * r + c + 1;
      rows[0][3] = 4;
      rows[0][4] = rest[a];
      rows[0][5] = rest[b];
      int out = 6;
      for (int i = 0; i < 5; ++i)
        if (i != a && i != b) rows[0][out++] = rest[i];
      forEachSecondThirdRow(rows, [&] { entries.push_back(entryFromRows(rows)); });
    }
  }
  std::sort(entries.begin(), entries.end(),
            [](const BandEntry& x, const BandEntry& y) { return ownKey(x) < ownKey(y); });
  return entries;
}

std::vector<BandEntry> generateBandTable(const BandGenOptions& options) {
  std::vector<BandEntry> entries = enumerateCanonicalBands();
  const int total = static_cast<int>(entries.size());

  // group by class, merging across one composition level via union-find
  std::vector<int> parent(total);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  auto unite = [&](int a, int b) { parent[find(a)] = find(b); };

  std::map<std::string, int> byKey;
  for (int i = 0; i < total; ++i) byKey[ownKey(entries[i])] = i;
  if (!options.perBand) {
    for (int i = 0; i < total; ++i) {
      std::string key = minimalClassKey(rowsOf(entries[i]));
      auto it = byKey.find(key);
      if (it == byKey.end())
        throw VerifyError("band table generation: class key " + key +
                          " is not a canonical band");
      unite(i, it->second);
    }
  }

  std::vector<int> reps;
  for (int i = 0; i < total; ++i)
    if (find(i) == i) reps.push_back(i);

  std::vector<std::uint64_t> repCount(total, 0);
  std::atomic<int> nextRep{0}, doneCount{0};
  int workers = std::max(1, options.workers);
  auto work = [&] {
    for (;;) {
      int slot = nextRep.fetch_add(1);
      if (slot >= static_cast<int>(reps.size())) return;
      int idx = reps[slot];
      BandCounter counter(bandFromRows(rowsOf(entries[idx])));
      repCount[idx] = counter.count();
      int done = ++doneCount;
      if (options.progress) options.progress(done, static_cast<int>(reps.size()));
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  for (int i = 0; i < total; ++i) entries[i].count = repCount[find(i)];
  return entries;
}

void writeBandTable(std::ostream& out, const std::vector<BandEntry>& entries) {
  for (const BandEntry& e : entries)
    out << e.tupleText() << " => " << e.count << '\n';
}

}  // namespace pdcsq

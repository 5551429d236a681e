#include "pdcsq/grid.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "pdcsq/errors.hpp"

namespace pdcsq {

Grid Grid::empty(int n, std::optional<BlockShape> shape) {
  Grid g;
  g.n = n;
  g.shape = shape;
  return g;
}

namespace {

ValidityReport structural(int row, int col, std::string msg) {
  return {false, ViolationKind::Structural, row, col, std::move(msg)};
}

ValidityReport violation(ViolationKind kind, int row, int col, const char* what) {
  std::ostringstream os;
  os << what << " at row " << row + 1 << ", column " << col + 1;
  return {false, kind, row, col, os.str()};
}

}  // namespace

ValidityReport validate(const Grid& grid) {
  const int n = grid.n;
  if (n < 1 || n > kMaxOrder)
    return structural(-1, -1, "order must be in 1.." + std::to_string(kMaxOrder));
  if (grid.shape) {
    if (grid.shape->r < 1 || grid.shape->c < 1 || grid.shape->order() != n)
      return structural(-1, -1, "block shape does not match order");
  }
  if (grid.filled() > n)
    return structural(-1, -1, "more rows than the order allows");

  std::vector<std::uint32_t> colUsed(n, 0), blockUsed(grid.blockCount(), 0);
  for (int r = 0; r < grid.filled(); ++r) {
    const Row& row = grid.rows[r];
    if (static_cast<int>(row.size()) != n)
      return structural(r, -1, "row has wrong length");
    std::uint32_t rowUsed = 0;
    for (int c = 0; c < n; ++c) {
      int v = row[c];
      if (v < 1 || v > n)
        return structural(r, c, "value outside 1..n");
      std::uint32_t bit = 1u << (v - 1);
      if (rowUsed & bit) return violation(ViolationKind::RowDuplicate, r, c, "row duplicate");
      if (colUsed[c] & bit)
        return violation(ViolationKind::ColumnDuplicate, r, c, "column duplicate");
      if (grid.shape) {
        int b = grid.blockIndex(r, c);
        if (blockUsed[b] & bit)
          return violation(ViolationKind::BlockDuplicate, r, c, "block duplicate");
        blockUsed[b] |= bit;
      }
      rowUsed |= bit;
      colUsed[c] |= bit;
    }
  }
  return {true, ViolationKind::None, -1, -1, ""};
}

ColumnAvailability availability(const Grid& grid) {
  ValidityReport report = validate(grid);
  if (!report.valid)
    throw std::invalid_argument("availability of invalid grid: " + report.message);
  const int n = grid.n;
  const std::uint32_t all = (n == 32) ? ~0u : ((1u << n) - 1);
  ColumnAvailability a;
  a.n = n;
  a.columns.assign(n, all);
  if (grid.shape) a.blocks.assign(n, all);
  for (int r = 0; r < grid.filled(); ++r) {
    for (int c = 0; c < n; ++c) {
      std::uint32_t bit = 1u << (grid.rows[r][c] - 1);
      a.columns[c] &= ~bit;
      if (grid.shape) a.blocks[grid.blockIndex(r, c)] &= ~bit;
    }
  }
  return a;
}

std::string formatHeader(int n, std::optional<BlockShape> shape) {
  std::ostringstream os;
  os << "# n=" << n;
  if (shape) os << " r=" << shape->r << " c=" << shape->c;
  return os.str();
}

std::string formatGridLine(const Grid& grid) {
  std::ostringstream os;
  bool digits = grid.n <= 9;
  bool first = true;
  for (const Row& row : grid.rows) {
    for (int v : row) {
      if (digits) {
        os << v;
      } else {
        if (!first) os << ' ';
        os << v;
      }
      first = false;
    }
  }
  return os.str();
}

void writeGrids(std::ostream& out, const std::vector<Grid>& grids) {
  int headerN = -1;
  std::optional<BlockShape> headerShape;
  bool headerWritten = false;
  for (const Grid& g : grids) {
    if (!headerWritten || g.n != headerN || g.shape != headerShape) {
      out << formatHeader(g.n, g.shape) << '\n';
      headerN = g.n;
      headerShape = g.shape;
      headerWritten = true;
    }
    out << formatGridLine(g) << '\n';
  }
}

namespace {

Grid parseCells(const std::vector<int>& cells, int n,
                std::optional<BlockShape> shape, int lineNo) {
  if (n < 1) throw ParseError("grid line before any usable header", lineNo);
  if (cells.empty() || static_cast<int>(cells.size()) % n != 0)
    throw ParseError("cell count is not a multiple of the order", lineNo);
  if (static_cast<int>(cells.size()) > n * n)
    throw ParseError("more cells than an n x n grid holds", lineNo);
  Grid g = Grid::empty(n, shape);
  for (std::size_t i = 0; i < cells.size(); i += n)
    g.rows.emplace_back(cells.begin() + i, cells.begin() + i + n);
  return g;
}

}  // namespace

std::vector<Grid> readGrids(std::istream& in) {
  std::vector<Grid> grids;
  std::string line;
  int n = -1;
  std::optional<BlockShape> shape;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.empty()) continue;
    if (line[0] == '#') {
      int hn = 0, hr = 0, hc = 0;
      int got = std::sscanf(line.c_str(), "# n=%d r=%d c=%d", &hn, &hr, &hc);
      if (got < 1 || hn < 1) throw ParseError("unreadable header line", lineNo);
      n = hn;
      if (got == 3) {
        shape = BlockShape{hr, hc};
      } else if (got == 1) {
        shape = std::nullopt;
      } else {
        throw ParseError("header must give both r and c or neither", lineNo);
      }
      continue;
    }
    std::vector<int> cells;
    if (line.find(' ') == std::string::npos && n <= 9) {
      // digit-string form; infer the order when no header was seen
      int len = static_cast<int>(line.size());
      int order = n;
      if (order < 0) {
        order = static_cast<int>(std::lround(std::sqrt(double(len))));
        if (order * order != len)
          throw ParseError("cannot infer order from line length", lineNo);
        n = order;
      }
      for (char ch : line) {
        if (ch < '1' || ch > '9') throw ParseError("expected digits 1..9", lineNo);
        cells.push_back(ch - '0');
      }
    } else {
      std::istringstream cellStream(line);
      int v;
      while (cellStream >> v) cells.push_back(v);
      if (!cellStream.eof()) throw ParseError("expected integers", lineNo);
    }
    grids.push_back(parseCells(cells, n, shape, lineNo));
  }
  return grids;
}

}  // namespace pdcsq

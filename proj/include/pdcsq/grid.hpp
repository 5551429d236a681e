#pragma once
// Domain types for Latin squares and (R,C)-Sudoku matrices: filled-prefix
// grids, exact validity checking, per-column availability sets, and the
// line-oriented text format shared by all tools.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pdcsq {

using Row = std::vector<int>;  // values 1..n

// Bitmask engines keep value sets in 32-bit words.
inline constexpr int kMaxOrder = 30;

struct BlockShape {
  int r = 0;  // rows per block
  int c = 0;  // columns per block
  int order() const { return r * c; }
  bool operator==(const BlockShape&) const = default;
};

// A square with its first `rows.size()` rows filled. Arbitrary sparse
// partial fills are not representable.
struct Grid {
  int n = 0;
  std::optional<BlockShape> shape;
  std::vector<Row> rows;

  int filled() const { return static_cast<int>(rows.size()); }
  bool full() const { return filled() == n; }

  // Index of the block containing cell (row, col), both 0-based.
  int blockIndex(int row, int col) const {
    return (row / shape->r) * shape->r + col / shape->c;
  }
  int blockCount() const { return shape ? n : 0; }

  static Grid empty(int n, std::optional<BlockShape> shape = std::nullopt);
  bool operator==(const Grid&) const = default;
};

enum class ViolationKind {
  None,
  Structural,       // wrong row length, value out of range, bad shape
  RowDuplicate,
  ColumnDuplicate,
  BlockDuplicate,
};

struct ValidityReport {
  bool valid = false;
  ViolationKind kind = ViolationKind::None;
  int row = -1;  // 0-based coordinates of the offending cell
  int col = -1;
  std::string message;
};

// Checks the filled prefix against the Latin (and, when shape is present,
// block) conditions. Reports the first violation in row-major scan order.
// Structural problems are reported as ViolationKind::Structural rather
// than thrown.
ValidityReport validate(const Grid& grid);

// Per-column (and per-block) sets of values not yet used, as bitmasks with
// bit v-1 standing for value v.
struct ColumnAvailability {
  int n = 0;
  std::vector<std::uint32_t> columns;
  std::vector<std::uint32_t> blocks;  // empty when no shape
};

// Throws std::invalid_argument if the grid is not valid.
ColumnAvailability availability(const Grid& grid);

// --- text format ---------------------------------------------------------
// One grid per line, cells in row-major order: a contiguous digit string
// for n <= 9, space-separated integers for larger orders. An optional
// header line `# n=<n> r=<r> c=<c>` (r,c present only with a shape)
// declares the geometry for the lines that follow.

std::string formatGridLine(const Grid& grid);
std::string formatHeader(int n, std::optional<BlockShape> shape);
void writeGrids(std::ostream& out, const std::vector<Grid>& grids);

// Reads every grid in the stream; header lines switch the current
// geometry. Without a header, geometry is inferred from the line (digit
// strings of square length, no shape). Throws ParseError on malformed
// input.
std::vector<Grid> readGrids(std::istream& in);

}  // namespace pdcsq

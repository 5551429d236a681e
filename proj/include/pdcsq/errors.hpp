#pragma once

#include <stdexcept>
#include <string>

namespace pdcsq {

// Malformed external input (grid files, band-table files).
struct ParseError : std::runtime_error {
  int line;  // 1-based line number, 0 when not line-oriented
  explicit ParseError(const std::string& what, int line_ = 0)
      : std::runtime_error(what), line(line_) {}
};

// A recomputation disagreed with a pinned or stored value.
struct VerifyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An internal contract was violated (e.g. an acceptance weight overstated
// the conditional support, or a computed count exceeded its denominator).
struct ContractError : std::logic_error {
  using std::logic_error::logic_error;
};

// The configured per-sample trial ceiling was hit.
struct TrialCeilingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace pdcsq

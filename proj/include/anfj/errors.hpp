#pragma once

#include <stdexcept>
#include <string>

#include "anfj/ast.hpp"

namespace anfj {

/// Malformed source text. Carries the 1-based position of the offending token.
class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(const std::string& msg, SourcePos pos)
      : std::runtime_error(std::to_string(pos.line) + ":" +
                           std::to_string(pos.column) + ": " + msg),
        pos_(pos) {}
  SourcePos pos() const { return pos_; }

 private:
  SourcePos pos_;
};

/// Well-formed syntax that fails a static check (unknown names, cycles,
/// missing returns, ...).
class ElaborationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A class, field or method name that does not resolve.
class LookupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Analysis exceeded its node/edge/time budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace anfj

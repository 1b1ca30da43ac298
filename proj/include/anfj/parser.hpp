#pragma once

#include <string_view>

#include "anfj/ast.hpp"

namespace anfj {

/// Parses `.anfj` source text. Throws SyntaxError on malformed input,
/// duplicate class names, or non-atomic operands.
ast::Program parse_program(std::string_view source);

}  // namespace anfj

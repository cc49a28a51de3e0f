#pragma once

#include <string_view>

#include "rerl/syntax.hpp"

namespace rerl {

/// Parses a `.rl` source file:
///
///   module <atom> = <fundef> [, <fundef>]*
///   fundef  := a/n = fun (X1, ..., Xn) -> expr
///
/// Throws SyntaxError (line/column) on malformed input, duplicate function
/// names, arity mismatches and references to undefined functions.
Module parse_module(std::string_view text);

/// Parses a single expression. Runtime literals `<p3>` (pid) and `<t2>`
/// (unique id) are accepted so that printed states can be read back.
Expr parse_expr(std::string_view text);

Pat parse_pattern(std::string_view text);

/// Parses `a/n`.
FunName parse_fun_name(std::string_view text);

}  // namespace rerl

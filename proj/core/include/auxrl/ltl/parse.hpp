#pragma once

#include <string_view>

#include "auxrl/ltl/formula.hpp"
#include "auxrl/util/errors.hpp"

namespace auxrl::ltl {

/// Parses formula text.
///
/// Grammar (precedence high to low, parentheses override):
///   unary      !  X  F  G
///   until      U   (right associative)
///   and        &   (left associative)
///   or         |   (left associative)
///   implies    ->  (right associative)
/// Atoms are identifiers [A-Za-z_][A-Za-z0-9_]*; `true` and `false` are
/// constants. The single letters X/F/G/U double as operator names: a leading
/// X, F or G is read as an operator exactly when an operand follows it, so
/// `F F` is "eventually the atom F" while `(F & Y)` keeps both as atoms.
///
/// Throws ParseError with the byte offset of the failure.
Formula parse(std::string_view text);

}  // namespace auxrl::ltl

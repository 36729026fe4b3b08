#pragma once

#include <map>
#include <string>
#include <string_view>

namespace epilab {

/// Variables visible to an expression, e.g. {"n", 8}.
using ExprVars = std::map<std::string, double, std::less<>>;

/// Evaluates an arithmetic expression such as "1 + 1/n" or "(1 + (-1)^n)/2".
///
/// Grammar: + - * / ^ (right associative), unary minus, parentheses, numeric
/// literals, the constants pi and inf, variables from `vars`, the infix
/// operator `mod`, and the functions sqrt abs exp log min max.
/// Throws ErrorCode::Parse with the offending column on malformed input.
double eval_expression(std::string_view text, const ExprVars& vars);

}  // namespace epilab

#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace mathlens {

// Plain-text math notation units (keyboard-style, no markup): numbers,
// coordinate tuples, function applications f(x, y), superscripted
// identifiers x^2, operator-symbol forms (∇f, ∂f/∂x, sqrt(65)), and
// parenthesized expressions like (x^2-9)/(x-3).
enum class MathTokenKind {
    number,
    number_tuple,
    function_app,
    identifier_power,
    operator_symbol,
    expression,
};

struct MathToken {
    std::size_t begin = 0;
    std::size_t end = 0;  // [begin, end) byte span
    MathTokenKind kind = MathTokenKind::number;
};

// Non-overlapping math tokens in left-to-right order. Prose words are never
// tokens; bare identifiers ("x") are not tokens either.
std::vector<MathToken> scan_math_tokens(std::string_view text);

// Max parenthesis/bracket/brace nesting depth over the whole string.
int max_nesting_depth(std::string_view text);

}  // namespace mathlens

#include "mathlens/math_tokens.hpp"

#include <algorithm>

#include "mathlens/text.hpp"

namespace mathlens {
namespace {

using text::is_ascii_alpha;
using text::is_ascii_digit;

// UTF-8 operator symbols recognized as math-token starters.
constexpr std::string_view kSymbols[] = {"∇", "∂", "∫", "√"};  // ∇ ∂ ∫ √

std::size_t symbol_at(std::string_view s, std::size_t i) {
    for (std::string_view sym : kSymbols)
        if (s.compare(i, sym.size(), sym) == 0) return sym.size();
    return 0;
}

bool is_operator_char(char c) {
    return c == '+' || c == '-' || c == '*' || c == '/' || c == '=';
}

// "( -1, 4 )" style tuple of two or more signed numbers; returns end or 0.
std::size_t match_number_tuple(std::string_view s, std::size_t i) {
    if (i >= s.size() || s[i] != '(') return 0;
    std::size_t p = i + 1;
    int numbers = 0;
    auto skip_ws = [&] { while (p < s.size() && s[p] == ' ') ++p; };
    auto match_number = [&]() -> bool {
        std::size_t q = p;
        if (q < s.size() && (s[q] == '+' || s[q] == '-')) ++q;
        std::size_t digits = q;
        while (q < s.size() && is_ascii_digit(s[q])) ++q;
        if (q == digits) return false;
        if (q < s.size() && s[q] == '.' && q + 1 < s.size() && is_ascii_digit(s[q + 1])) {
            ++q;
            while (q < s.size() && is_ascii_digit(s[q])) ++q;
        }
        p = q;
        return true;
    };
    skip_ws();
    if (!match_number()) return 0;
    ++numbers;
    while (true) {
        skip_ws();
        if (p < s.size() && s[p] == ',') {
            ++p;
            skip_ws();
            if (!match_number()) return 0;
            ++numbers;
            continue;
        }
        break;
    }
    skip_ws();
    if (p < s.size() && s[p] == ')' && numbers >= 2) return p + 1;
    return 0;
}

// Absorbs a run of math characters starting at `start`; `start` must already
// be known to be a valid starter. Returns the end offset.
std::size_t absorb_math_run(std::string_view s, std::size_t start) {
    std::size_t i = start;
    int balance = 0;
    char prev = '\0';
    while (i < s.size()) {
        char c = s[i];
        if (std::size_t sym = symbol_at(s, i)) {
            i += sym;
            prev = '~';  // non-space placeholder
            continue;
        }
        if (text::is_word_char(c)) {
            ++i;
            prev = c;
            continue;
        }
        if (c == '^') {
            ++i;
            prev = c;
            continue;
        }
        if (c == '.') {
            if (is_ascii_digit(prev) && i + 1 < s.size() && is_ascii_digit(s[i + 1])) {
                ++i;
                prev = c;
                continue;
            }
            break;
        }
        if (c == ',') {
            if (balance > 0) {
                ++i;
                prev = c;
                continue;
            }
            break;
        }
        if (c == ' ') {
            // Spaces survive only inside parentheses right after a comma,
            // which keeps "f(x, y)" whole without swallowing prose.
            if (balance > 0 && prev == ',') {
                std::size_t q = i;
                while (q < s.size() && s[q] == ' ') ++q;
                if (q < s.size() && (text::is_word_char(s[q]) || s[q] == '+' || s[q] == '-' ||
                                     is_ascii_digit(s[q]) || symbol_at(s, q))) {
                    i = q;
                    continue;
                }
            }
            break;
        }
        if (is_operator_char(c)) {
            if (i + 1 < s.size() && !text::is_space(s[i + 1])) {
                ++i;
                prev = c;
                continue;
            }
            break;
        }
        if (c == '(') {
            ++balance;
            ++i;
            prev = c;
            continue;
        }
        if (c == ')') {
            if (balance == 0) break;
            --balance;
            ++i;
            prev = c;
            continue;
        }
        break;
    }
    // Trailing operators/punctuation never end a token.
    while (i > start) {
        char c = s[i - 1];
        if (is_operator_char(c) || c == '^' || c == ',' || c == '.') {
            --i;
            continue;
        }
        break;
    }
    return i;
}

bool run_is_mathy(std::string_view token) {
    bool has_digit = false, has_op = false, has_paren = false, has_symbol = false;
    for (std::size_t i = 0; i < token.size();) {
        if (std::size_t sym = symbol_at(token, i)) {
            has_symbol = true;
            i += sym;
            continue;
        }
        char c = token[i];
        if (is_ascii_digit(c)) has_digit = true;
        if (is_operator_char(c) || c == '^') has_op = true;
        if (c == '(' || c == ')') has_paren = true;
        ++i;
    }
    if (has_symbol) return true;
    if (token.front() == '(') return has_digit || has_op;  // reject prose parens
    return has_digit || has_op || (has_paren && is_ascii_alpha(token.front()));
}

MathTokenKind classify_run(std::string_view token, bool symbol_start) {
    if (symbol_start) return MathTokenKind::operator_symbol;
    bool numeric = true;
    for (char c : token)
        if (!is_ascii_digit(c) && c != '.' && c != '+' && c != '-') numeric = false;
    if (numeric) return MathTokenKind::number;
    if (token.find('=') != std::string_view::npos) return MathTokenKind::expression;
    if (is_ascii_alpha(token.front())) {
        std::size_t p = 0;
        while (p < token.size() && is_ascii_alpha(token[p])) ++p;
        if (p < token.size() && token[p] == '(' && token.back() == ')')
            return MathTokenKind::function_app;
        if (token.find('^') != std::string_view::npos) return MathTokenKind::identifier_power;
    }
    return MathTokenKind::expression;
}

}  // namespace

std::vector<MathToken> scan_math_tokens(std::string_view s) {
    std::vector<MathToken> tokens;
    std::size_t i = 0;
    while (i < s.size()) {
        if (std::size_t end = match_number_tuple(s, i)) {
            tokens.push_back({i, end, MathTokenKind::number_tuple});
            i = end;
            continue;
        }
        bool symbol_start = symbol_at(s, i) != 0;
        bool sqrt_start = false;
        if (!symbol_start && s.compare(i, 5, "sqrt(") == 0 &&
            (i == 0 || !text::is_word_char(s[i - 1])))
            sqrt_start = true;

        bool run_start = symbol_start || sqrt_start;
        if (!run_start && is_ascii_digit(s[i]) && (i == 0 || !text::is_word_char(s[i - 1])))
            run_start = true;
        if (!run_start && is_ascii_alpha(s[i]) && (i == 0 || !text::is_word_char(s[i - 1]))) {
            // Identifier directly followed by '(' or '^' opens a run: f(x), x^2.
            std::size_t p = i;
            while (p < s.size() && is_ascii_alpha(s[p])) ++p;
            if (p < s.size() && (s[p] == '(' || s[p] == '^')) run_start = true;
        }
        if (!run_start && s[i] == '(') run_start = true;

        if (run_start) {
            std::size_t end = absorb_math_run(s, i);
            std::string_view token = s.substr(i, end - i);
            if (end > i && run_is_mathy(token)) {
                MathTokenKind kind =
                    sqrt_start ? MathTokenKind::operator_symbol : classify_run(token, symbol_start);
                tokens.push_back({i, end, kind});
                i = end;
                continue;
            }
        }
        // Not a token here: step over the whole word so runs never start
        // mid-identifier.
        if (text::is_word_char(s[i])) {
            while (i < s.size() && text::is_word_char(s[i])) ++i;
        } else if (std::size_t sym = symbol_at(s, i)) {
            i += sym;
        } else {
            ++i;
        }
    }
    return tokens;
}

int max_nesting_depth(std::string_view s) {
    int depth = 0, max_depth = 0;
    for (char c : s) {
        if (c == '(' || c == '[' || c == '{') {
            ++depth;
            max_depth = std::max(max_depth, depth);
        } else if (c == ')' || c == ']' || c == '}') {
            if (depth > 0) --depth;
        }
    }
    return max_depth;
}

}  // namespace mathlens

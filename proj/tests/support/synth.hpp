// Deterministic synthetic data for tests: a pure prompt -> solution function
// standing in for a live model, plus small random generators.

#pragma once

#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "mathlens/text.hpp"

namespace synth {

// Pure function of the prompt: a plausible multistep plain-text solution whose
// shape (step count, wording, numbers) varies with the prompt hash, so ablated
// prompts produce genuinely divergent responses.
inline std::string solution_for(std::string_view prompt) {
    std::uint64_t h = mathlens::text::fnv1a64(prompt);
    const std::size_t steps = 5 + static_cast<std::size_t>(h % 4);  // 5..8

    static const char* kOpenings[] = {
        "Substitute the given function f(x, y) = x^2y into the working formula.",
        "Substitute the expression into the definition so every term is explicit.",
        "Plug in the given function and restate what is being asked.",
    };
    static const char* kMiddles[] = {
        "Differentiate with respect to x to get df/dx = 2xy.",
        "Differentiate with respect to y to get df/dy = x^2.",
        "Apply the chain rule to the outer function before touching the inner one.",
        "Simplify the resulting expression by collecting powers of x.",
        "Evaluate the gradient at the point (-1, 4) to get (-8, 1).",
        "Solve for the unknown by isolating it on the left side.",
        "Factor the numerator so the common term cancels cleanly.",
        "Integrate the remaining term to undo the derivative.",
        "Compute the magnitude sqrt(65) of the resulting vector.",
        "Take the limit as x -> 3 of the simplified quotient.",
    };
    static const char* kClosings[] = {
        "Therefore the final answer is %d.",
        "So the result evaluates to %d.",
        "Finally, the maximum rate of change works out to %d.",
    };

    std::string out;
    out += "1. ";
    out += kOpenings[h % 3];
    out += "\n";
    for (std::size_t i = 1; i + 1 < steps; ++i) {
        std::uint64_t pick = (h >> (4 * i)) % 10;
        out += std::to_string(i + 1) + ". ";
        out += kMiddles[pick];
        out += "\n";
    }
    char closing[128];
    std::snprintf(closing, sizeof(closing), kClosings[(h >> 8) % 3],
                  static_cast<int>(h % 97));
    out += std::to_string(steps) + ". ";
    out += closing;
    out += "\n";
    return out;
}

inline std::vector<std::string> random_tokens(std::mt19937& rng, std::size_t max_len,
                                              std::size_t vocab_size = 12) {
    static const char* kVocab[] = {"the",  "gradient", "x^2",  "f(x)",     "is",   "of",
                                   "solve", "(-1, 4)", "step", "evaluate", "sqrt", "limit"};
    std::uniform_int_distribution<std::size_t> len(0, max_len);
    std::uniform_int_distribution<std::size_t> pick(0, std::min<std::size_t>(vocab_size, 12) - 1);
    std::vector<std::string> tokens(len(rng));
    for (std::string& t : tokens) t = kVocab[pick(rng)];
    return tokens;
}

}  // namespace synth

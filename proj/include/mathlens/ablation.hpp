#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mathlens/lexicon.hpp"

namespace mathlens::ablate {

enum class ElementKind {
    math_expression,
    instruction_keyword,
    numeric_reference,
    linguistic_feature,
};

enum class Perturbation { mask, swap_order, case_change, strip_punctuation };

std::string_view element_kind_name(ElementKind kind);
std::string_view perturbation_name(Perturbation perturbation);

// One ablatable constituent of a question prompt. Masked kinds carry the
// matched span; linguistic features are synthesized over the whole prompt and
// always use a non-mask perturbation.
struct PromptElement {
    ElementKind kind = ElementKind::math_expression;
    std::string surface;
    std::size_t begin = 0;
    std::size_t end = 0;
    Perturbation perturbation = Perturbation::mask;
};

struct AblatedPrompt {
    PromptElement element;
    std::string text;        // full perturbed prompt, whitespace-normalized
    std::string provenance;  // sha-256 of the original prompt
};

// Elements whose ablation would be empty or identical to the original are
// skipped and reported here instead.
struct AblationWarning {
    PromptElement element;
    std::string reason;
};

struct AblationSet {
    std::vector<AblatedPrompt> ablations;
    std::vector<AblationWarning> warnings;
};

// Finds math expressions ("∇f", "f(x, y) = x^2y"), instruction keywords,
// numeric/coordinate references ("(-1, 4)", standalone numerals), and
// synthesizes one linguistic-feature element per applicable perturbation.
// Throws EmptyPrompt on blank input.
std::vector<PromptElement> decompose_prompt(
    std::string_view prompt, const Lexicon& instruction_lexicon = default_instruction_lexicon());

// Exactly one variant per element unless degenerate. Mask removal elides
// connectives left dangling in front of the removed span ("at point").
AblationSet generate_ablations(std::string_view prompt,
                               std::span<const PromptElement> elements);

}  // namespace mathlens::ablate

#include "mathlens/ablation.hpp"

#include <algorithm>
#include <array>

#include "mathlens/errors.hpp"
#include "mathlens/math_tokens.hpp"
#include "mathlens/sha256.hpp"
#include "mathlens/text.hpp"

namespace mathlens::ablate {

std::string_view element_kind_name(ElementKind kind) {
    switch (kind) {
        case ElementKind::math_expression: return "math_expression";
        case ElementKind::instruction_keyword: return "instruction_keyword";
        case ElementKind::numeric_reference: return "numeric_reference";
        case ElementKind::linguistic_feature: break;
    }
    return "linguistic_feature";
}

std::string_view perturbation_name(Perturbation perturbation) {
    switch (perturbation) {
        case Perturbation::mask: return "mask";
        case Perturbation::swap_order: return "swap_order";
        case Perturbation::case_change: return "case_change";
        case Perturbation::strip_punctuation: break;
    }
    return "strip_punctuation";
}

namespace {

// Words elided when a mask leaves them dangling in front of the removed span.
constexpr std::array<std::string_view, 15> kConnectives = {
    "at", "of", "to", "for", "in", "into", "on", "onto", "from", "by", "with",
    "the", "a", "an", "point"};

bool is_connective(std::string_view word) {
    std::string lowered = text::to_lower(word);
    return std::find(kConnectives.begin(), kConnectives.end(), lowered) != kConnectives.end();
}

// Is the gap between two math tokens just an equals sign (possibly spaced)?
bool gap_is_equals(std::string_view gap) {
    bool seen_eq = false;
    for (char c : gap) {
        if (c == '=') {
            if (seen_eq) return false;
            seen_eq = true;
        } else if (c != ' ') {
            return false;
        }
    }
    return seen_eq;
}

bool overlaps(const PromptElement& e, std::size_t begin, std::size_t end) {
    return begin < e.end && e.begin < end;
}

PromptElement make_span_element(std::string_view prompt, ElementKind kind, std::size_t begin,
                                std::size_t end) {
    PromptElement e;
    e.kind = kind;
    e.begin = begin;
    e.end = end;
    e.surface = std::string(prompt.substr(begin, end - begin));
    e.perturbation = Perturbation::mask;
    return e;
}

}  // namespace

std::vector<PromptElement> decompose_prompt(std::string_view prompt,
                                            const Lexicon& instruction_lexicon) {
    if (text::trim(prompt).empty()) throw EmptyPrompt("prompt is blank");

    std::vector<MathToken> tokens = scan_math_tokens(prompt);
    std::vector<PromptElement> masked;

    // Math expressions, merging equation forms split around " = ".
    std::vector<bool> consumed(tokens.size(), false);
    for (std::size_t k = 0; k < tokens.size(); ++k) {
        if (consumed[k]) continue;
        const MathToken& token = tokens[k];
        if (token.kind == MathTokenKind::number || token.kind == MathTokenKind::number_tuple)
            continue;
        std::size_t end = token.end;
        std::size_t j = k;
        while (j + 1 < tokens.size() &&
               gap_is_equals(prompt.substr(end, tokens[j + 1].begin - end))) {
            ++j;
            consumed[j] = true;
            end = tokens[j].end;
        }
        masked.push_back(make_span_element(prompt, ElementKind::math_expression, token.begin, end));
    }

    // Numeric and coordinate references outside the claimed math spans.
    for (std::size_t k = 0; k < tokens.size(); ++k) {
        if (consumed[k]) continue;
        const MathToken& token = tokens[k];
        if (token.kind != MathTokenKind::number && token.kind != MathTokenKind::number_tuple)
            continue;
        bool inside_math = std::any_of(masked.begin(), masked.end(), [&](const PromptElement& e) {
            return overlaps(e, token.begin, token.end);
        });
        if (!inside_math)
            masked.push_back(
                make_span_element(prompt, ElementKind::numeric_reference, token.begin, token.end));
    }

    // Instruction keywords, skipping occurrences captured by math spans.
    for (const LexiconMatch& m : find_lexicon_matches(prompt, instruction_lexicon)) {
        std::size_t end = m.position + m.lexeme.size();
        bool taken = std::any_of(masked.begin(), masked.end(), [&](const PromptElement& e) {
            return overlaps(e, m.position, end);
        });
        if (!taken)
            masked.push_back(
                make_span_element(prompt, ElementKind::instruction_keyword, m.position, end));
    }

    std::sort(masked.begin(), masked.end(), [](const PromptElement& a, const PromptElement& b) {
        if (a.begin != b.begin) return a.begin < b.begin;
        return a.end > b.end;
    });

    std::vector<PromptElement> elements = std::move(masked);

    // Synthesized linguistic features, one per applicable perturbation.
    auto first_keyword = std::find_if(elements.begin(), elements.end(), [](const PromptElement& e) {
        return e.kind == ElementKind::instruction_keyword;
    });
    if (first_keyword != elements.end()) {
        PromptElement swap;
        swap.kind = ElementKind::linguistic_feature;
        swap.perturbation = Perturbation::swap_order;
        swap.surface = "word order";
        swap.begin = first_keyword->begin;  // pivot span
        swap.end = first_keyword->end;
        elements.push_back(std::move(swap));
    }
    PromptElement casing;
    casing.kind = ElementKind::linguistic_feature;
    casing.perturbation = Perturbation::case_change;
    casing.surface = "casing";
    casing.begin = 0;
    casing.end = prompt.size();
    elements.push_back(std::move(casing));

    PromptElement punctuation;
    punctuation.kind = ElementKind::linguistic_feature;
    punctuation.perturbation = Perturbation::strip_punctuation;
    punctuation.surface = "punctuation";
    punctuation.begin = 0;
    punctuation.end = prompt.size();
    elements.push_back(std::move(punctuation));

    return elements;
}

namespace {

std::string apply_mask(std::string_view prompt, const PromptElement& element) {
    std::string prefix(prompt.substr(0, element.begin));
    std::string suffix(prompt.substr(element.end));

    // Drop connectives orphaned right before the removed span ("at point").
    while (true) {
        std::size_t end = prefix.size();
        while (end > 0 && text::is_space(prefix[end - 1])) --end;
        std::size_t start = end;
        while (start > 0 && text::is_word_char(prefix[start - 1])) --start;
        if (start == end) break;
        if (!is_connective(std::string_view(prefix).substr(start, end - start))) break;
        prefix.erase(start);
    }
    return text::normalize_whitespace(prefix + " " + suffix);
}

std::string apply_swap(std::string_view prompt, const PromptElement& element) {
    std::string left(prompt.substr(0, element.begin));
    std::string pivot(prompt.substr(element.begin, element.end - element.begin));
    std::string right(prompt.substr(element.end));
    return text::normalize_whitespace(right + " " + pivot + " " + left);
}

std::string apply_strip_punctuation(std::string_view prompt) {
    std::string out;
    out.reserve(prompt.size());
    for (char c : prompt)
        if (c != ',' && c != '.') out.push_back(c);
    return text::normalize_whitespace(out);
}

}  // namespace

AblationSet generate_ablations(std::string_view prompt,
                               std::span<const PromptElement> elements) {
    AblationSet set;
    const std::string provenance = detail::sha256_hex(prompt);
    for (const PromptElement& element : elements) {
        std::string variant;
        switch (element.perturbation) {
            case Perturbation::mask: variant = apply_mask(prompt, element); break;
            case Perturbation::swap_order: variant = apply_swap(prompt, element); break;
            case Perturbation::case_change:
                variant = text::normalize_whitespace(text::to_lower(prompt));
                break;
            case Perturbation::strip_punctuation:
                variant = apply_strip_punctuation(prompt);
                break;
        }
        if (variant.empty()) {
            set.warnings.push_back({element, "ablation leaves an empty prompt"});
            continue;
        }
        if (variant == prompt) {
            set.warnings.push_back({element, "ablation does not change the prompt"});
            continue;
        }
        set.ablations.push_back(AblatedPrompt{element, std::move(variant), provenance});
    }
    return set;
}

}  // namespace mathlens::ablate

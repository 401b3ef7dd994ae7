#include <doctest.h>

#include <algorithm>

#include "mathlens/ablation.hpp"
#include "mathlens/errors.hpp"

using namespace mathlens;
using namespace mathlens::ablate;

namespace {

constexpr const char* kGradientPrompt = "Find the gradient ∇f of f(x, y) = x^2y at point (-1, 4)";

bool has_element(const std::vector<PromptElement>& elements, ElementKind kind,
                 std::string_view surface) {
    return std::any_of(elements.begin(), elements.end(), [&](const PromptElement& e) {
        return e.kind == kind && e.surface == surface;
    });
}

const AblatedPrompt* find_by_surface(const AblationSet& set, std::string_view surface) {
    for (const AblatedPrompt& a : set.ablations)
        if (a.element.surface == surface) return &a;
    return nullptr;
}

}  // namespace

TEST_CASE("decompose finds the gradient prompt's elements") {
    auto elements = decompose_prompt(kGradientPrompt);
    CHECK(has_element(elements, ElementKind::math_expression, "∇f"));
    CHECK(has_element(elements, ElementKind::math_expression, "f(x, y) = x^2y"));
    CHECK(has_element(elements, ElementKind::numeric_reference, "(-1, 4)"));
    CHECK(has_element(elements, ElementKind::instruction_keyword, "Find"));
}

TEST_CASE("decompose rejects blank prompts") {
    CHECK_THROWS_AS(decompose_prompt("  "), EmptyPrompt);
}

TEST_CASE("prompt with no lexicon hits yields only linguistic features") {
    auto elements = decompose_prompt("hello");
    REQUIRE(elements.size() == 2);
    for (const PromptElement& e : elements) CHECK(e.kind == ElementKind::linguistic_feature);
    CHECK(elements[0].perturbation == Perturbation::case_change);
    CHECK(elements[1].perturbation == Perturbation::strip_punctuation);
}

TEST_CASE("decompose annotates the limit prompt") {
    auto elements = decompose_prompt("Evaluate the limit as x -> 3 of (x^2-9)/(x-3)");
    CHECK(has_element(elements, ElementKind::instruction_keyword, "Evaluate"));
    CHECK(has_element(elements, ElementKind::numeric_reference, "3"));
    CHECK(has_element(elements, ElementKind::math_expression, "(x^2-9)/(x-3)"));
}

TEST_CASE("mask-kind spans never overlap") {
    for (const char* prompt :
         {kGradientPrompt, "Evaluate the limit as x -> 3 of (x^2-9)/(x-3)",
          "Compute f(2) = 4 and find g(x) = x^2 at 7"}) {
        auto elements = decompose_prompt(prompt);
        std::vector<const PromptElement*> masked;
        for (const PromptElement& e : elements)
            if (e.perturbation == Perturbation::mask) masked.push_back(&e);
        for (std::size_t i = 0; i < masked.size(); ++i)
            for (std::size_t j = i + 1; j < masked.size(); ++j) {
                bool disjoint =
                    masked[i]->end <= masked[j]->begin || masked[j]->end <= masked[i]->begin;
                CHECK(disjoint);
            }
    }
}

TEST_CASE("masking the coordinate reference elides the dangling connective") {
    auto elements = decompose_prompt(kGradientPrompt);
    auto set = generate_ablations(kGradientPrompt, elements);
    const AblatedPrompt* masked = find_by_surface(set, "(-1, 4)");
    REQUIRE(masked != nullptr);
    CHECK(masked->text == "Find the gradient ∇f of f(x, y) = x^2y");
}

TEST_CASE("masking the equation elides its connective too") {
    auto elements = decompose_prompt(kGradientPrompt);
    auto set = generate_ablations(kGradientPrompt, elements);
    const AblatedPrompt* masked = find_by_surface(set, "f(x, y) = x^2y");
    REQUIRE(masked != nullptr);
    CHECK(masked->text == "Find the gradient ∇f at point (-1, 4)");
}

TEST_CASE("masking the only content of a prompt is degenerate") {
    const char* prompt = "f(x, y) = x^2y";
    auto elements = decompose_prompt(prompt);
    auto set = generate_ablations(prompt, elements);
    bool saw_degenerate_mask = false;
    for (const AblationWarning& w : set.warnings)
        if (w.element.perturbation == Perturbation::mask) saw_degenerate_mask = true;
    CHECK(saw_degenerate_mask);
    for (const AblatedPrompt& a : set.ablations) CHECK(a.element.perturbation != Perturbation::mask);
}

TEST_CASE("case_change lowercases deterministically") {
    const char* prompt = "Find ∇f";
    auto set = generate_ablations(prompt, decompose_prompt(prompt));
    const AblatedPrompt* lowered = nullptr;
    for (const AblatedPrompt& a : set.ablations)
        if (a.element.perturbation == Perturbation::case_change) lowered = &a;
    REQUIRE(lowered != nullptr);
    CHECK(lowered->text == "find ∇f");
}

TEST_CASE("swap_order pivots on the instructional verb") {
    const char* prompt = "Find the gradient of f(x, y) = x^2y";
    auto set = generate_ablations(prompt, decompose_prompt(prompt));
    const AblatedPrompt* swapped = nullptr;
    for (const AblatedPrompt& a : set.ablations)
        if (a.element.perturbation == Perturbation::swap_order) swapped = &a;
    REQUIRE(swapped != nullptr);
    CHECK(swapped->text == "the gradient of f(x, y) = x^2y Find");
}

TEST_CASE("every ablation differs from the original and respects the element count") {
    const char* prompts[] = {
        kGradientPrompt,
        "Evaluate the limit as x -> 3 of (x^2-9)/(x-3)",
        "Determine the critical points of h(x) = x^3 - 3x + 1",
        "Show that the series converges for 0.5",
        "hello",
        "f(x, y) = x^2y",
    };
    for (const char* prompt : prompts) {
        auto elements = decompose_prompt(prompt);
        auto set = generate_ablations(prompt, elements);
        CHECK(set.ablations.size() <= elements.size());
        CHECK(set.ablations.size() + set.warnings.size() == elements.size());
        for (const AblatedPrompt& a : set.ablations) {
            CHECK(a.text != prompt);
            CHECK_FALSE(a.text.empty());
        }
    }
}

TEST_CASE("masking is idempotent: the surface never reappears at its span") {
    const char* prompts[] = {kGradientPrompt,
                             "Evaluate the limit as x -> 3 of (x^2-9)/(x-3)",
                             "Compute the maximum rate of change of f(x, y) = x^2y at (-1, 4)"};
    for (const char* prompt : prompts) {
        auto elements = decompose_prompt(prompt);
        auto set = generate_ablations(prompt, elements);
        for (const AblatedPrompt& a : set.ablations) {
            if (a.element.perturbation != Perturbation::mask) continue;
            for (const PromptElement& again : decompose_prompt(a.text)) {
                if (again.perturbation != Perturbation::mask) continue;
                bool same_span_same_surface =
                    again.begin == a.element.begin && again.surface == a.element.surface;
                CHECK_FALSE(same_span_same_surface);
            }
        }
    }
}

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "mathlens/lexicon.hpp"

namespace mathlens::flow {

// One segmented step of a step-by-step solution. Spans are byte offsets into
// the source text, non-overlapping and increasing with index.
struct RawStep {
    std::size_t index = 0;
    std::string text;
    std::size_t begin = 0;
    std::size_t end = 0;
};

enum class OperationKind {
    substitution,
    differentiation,
    integration,
    simplification,
    evaluation,
    solving,
    limit,
    factoring,
    other,
};

std::string_view operation_name(OperationKind kind);
OperationKind operation_from_name(std::string_view name);  // unknown -> other

struct OperationTag {
    OperationKind name = OperationKind::other;
    std::string matched_lexeme;
};

struct ConceptTag {
    std::string name;  // open taxonomy, must exist in the loaded lexicon
    std::string matched_lexeme;
};

enum class Level { low, medium, high };

std::string_view level_name(Level level);
int level_weight(Level level);  // low=1, medium=3, high=5

struct ComplexityFeatures {
    int math_token_count = 0;
    int max_nesting_depth = 0;
    int operation_count = 0;
    int concept_count = 0;
    int score() const {
        return math_token_count + 2 * max_nesting_depth + 2 * operation_count +
               2 * concept_count;
    }
};

struct ComplexityThresholds {
    int low_max = 4;     // score <= low_max        -> low
    int medium_max = 9;  // low_max < score <= this -> medium, above -> high
};

struct ComplexityLevel {
    Level level = Level::low;
    int weight = 1;
    ComplexityFeatures features;
};

struct AnnotatedStep {
    RawStep raw;
    std::vector<OperationTag> operations;  // deduplicated by kind, match order
    std::vector<ConceptTag> concepts;      // deduplicated by name, match order
    ComplexityLevel complexity;
};

enum class EdgeKind { sequential, reference };

struct Edge {
    std::size_t from = 0;
    std::size_t to = 0;
    EdgeKind kind = EdgeKind::sequential;
    bool operator==(const Edge&) const = default;
};

struct FlowSummary {
    std::size_t total_steps = 0;
    std::size_t total_operation_count = 0;
    std::size_t unique_concepts = 0;
    double avg_complexity_per_step = 0.0;
    int reasoning_complexity_score = 0;
    std::vector<std::string> pattern_trace;  // dominant operation per step
};

struct ReasoningFlow {
    std::vector<AnnotatedStep> steps;
    std::vector<Edge> edges;
    FlowSummary summary;
};

// Rule-based segmentation, applied in priority order: explicit enumerations
// ("1.", "(a)", "Step 2:"), discourse markers at sentence start ("First",
// "Then", ...), then a sentence split on terminal punctuation followed by
// whitespace and a capital or digit. Throws EmptySolution on blank input.
std::vector<RawStep> segment_steps(std::string_view solution_text);

std::vector<OperationTag> classify_operations(const RawStep& step, const Lexicon& lexicon);
std::vector<ConceptTag> classify_concepts(const RawStep& step, const Lexicon& lexicon);

ComplexityLevel estimate_step_complexity(const AnnotatedStep& step,
                                         const ComplexityThresholds& thresholds = {});
ComplexityLevel complexity_from_features(const ComplexityFeatures& features,
                                         const ComplexityThresholds& thresholds = {});

// Highest-priority operation present on the step; "other" when untagged.
// Priority: differentiation > integration > substitution > evaluation >
// solving > simplification > limit > factoring.
OperationKind dominant_operation(const AnnotatedStep& step);

ReasoningFlow build_reasoning_graph(std::vector<AnnotatedStep> steps);

// segment -> classify -> complexity -> graph in one call.
ReasoningFlow annotate(std::string_view solution_text,
                       const Lexicon& operations = default_operation_lexicon(),
                       const Lexicon& concepts = default_concept_lexicon(),
                       const ComplexityThresholds& thresholds = {});

}  // namespace mathlens::flow

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mathlens/ablation.hpp"
#include "mathlens/divergence.hpp"
#include "mathlens/flow.hpp"

namespace mathlens::metrics {

enum class Configuration { baseline, rag, contextual };

std::string_view configuration_name(Configuration c);    // "baseline" / "rag" / "contextual"
std::string_view configuration_letter(Configuration c);  // "B" / "R" / "C"

struct AblationTrial {
    ablate::PromptElement element;
    std::string ablated_prompt;
    std::string ablated_response;
    divergence::DivergenceScore score;
};

struct ElementImpact {
    std::string element_surface;
    ablate::ElementKind element_kind = ablate::ElementKind::math_expression;
    double impact = 0.0;  // the trial's divergence
};

struct QuestionMetrics {
    std::string question_id;
    double robustness = 0.0;        // mean cosine similarity over trials
    double phrase_sensitivity = 0.0;  // max divergence over trials
    std::vector<ElementImpact> impacts;  // sorted non-increasing by impact
    std::size_t step_count = 0;
    int complexity = 0;  // reasoning_complexity_score
    std::vector<std::string> pattern_trace;
};

struct MetricStat {
    double mean = 0.0;
    double std_dev = 0.0;  // population standard deviation
    std::size_t n = 0;
};

struct ExamMetrics {
    std::string course;
    std::string exam_id;
    Configuration configuration = Configuration::baseline;
    MetricStat robustness;
    MetricStat complexity;
    MetricStat step_count;
    MetricStat phrase_sensitivity;
};

QuestionMetrics question_metrics(std::span<const AblationTrial> trials,
                                 const flow::ReasoningFlow& reasoning,
                                 std::string question_id);

// Permutation-invariant: values are sorted before accumulation so an exam's
// statistics are bit-identical regardless of question order.
ExamMetrics exam_aggregate(std::span<const QuestionMetrics> questions, std::string exam_id,
                           Configuration configuration, std::string course = {});

}  // namespace mathlens::metrics

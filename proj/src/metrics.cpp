#include "mathlens/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "mathlens/errors.hpp"

namespace mathlens::metrics {

std::string_view configuration_name(Configuration c) {
    switch (c) {
        case Configuration::baseline: return "baseline";
        case Configuration::rag: return "rag";
        case Configuration::contextual: break;
    }
    return "contextual";
}

std::string_view configuration_letter(Configuration c) {
    switch (c) {
        case Configuration::baseline: return "B";
        case Configuration::rag: return "R";
        case Configuration::contextual: break;
    }
    return "C";
}

QuestionMetrics question_metrics(std::span<const AblationTrial> trials,
                                 const flow::ReasoningFlow& reasoning,
                                 std::string question_id) {
    if (trials.empty()) throw NoTrials("question has no ablation trials");
    if (reasoning.steps.empty()) throw NoTrials("question has an empty reasoning flow");

    QuestionMetrics out;
    out.question_id = std::move(question_id);

    double cosine_sum = 0.0;
    double max_divergence = 0.0;
    for (const AblationTrial& trial : trials) {
        cosine_sum += trial.score.cosine_similarity;
        max_divergence = std::max(max_divergence, trial.score.divergence);
        out.impacts.push_back(ElementImpact{trial.element.surface, trial.element.kind,
                                            trial.score.divergence});
    }
    out.robustness = cosine_sum / static_cast<double>(trials.size());
    out.phrase_sensitivity = max_divergence;

    std::stable_sort(out.impacts.begin(), out.impacts.end(),
                     [](const ElementImpact& a, const ElementImpact& b) {
                         if (a.impact != b.impact) return a.impact > b.impact;
                         return a.element_surface < b.element_surface;
                     });

    out.step_count = reasoning.summary.total_steps;
    out.complexity = reasoning.summary.reasoning_complexity_score;
    out.pattern_trace = reasoning.summary.pattern_trace;
    return out;
}

namespace {

MetricStat stat_of(std::vector<double> values) {
    // Sorting first makes the floating-point sums independent of input order.
    std::sort(values.begin(), values.end());
    MetricStat stat;
    stat.n = values.size();
    double sum = 0.0;
    for (double v : values) sum += v;
    stat.mean = sum / static_cast<double>(values.size());
    double sq = 0.0;
    for (double v : values) sq += (v - stat.mean) * (v - stat.mean);
    stat.std_dev = std::sqrt(sq / static_cast<double>(values.size()));
    return stat;
}

}  // namespace

ExamMetrics exam_aggregate(std::span<const QuestionMetrics> questions, std::string exam_id,
                           Configuration configuration, std::string course) {
    if (questions.empty()) throw NoQuestions("exam has no questions to aggregate");

    std::vector<double> robustness, complexity, steps, sensitivity;
    for (const QuestionMetrics& q : questions) {
        robustness.push_back(q.robustness);
        complexity.push_back(static_cast<double>(q.complexity));
        steps.push_back(static_cast<double>(q.step_count));
        sensitivity.push_back(q.phrase_sensitivity);
    }

    ExamMetrics out;
    out.course = std::move(course);
    out.exam_id = std::move(exam_id);
    out.configuration = configuration;
    out.robustness = stat_of(std::move(robustness));
    out.complexity = stat_of(std::move(complexity));
    out.step_count = stat_of(std::move(steps));
    out.phrase_sensitivity = stat_of(std::move(sensitivity));
    return out;
}

}  // namespace mathlens::metrics

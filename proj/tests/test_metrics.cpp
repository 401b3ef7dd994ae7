#include <doctest.h>

#include <algorithm>
#include <random>

#include "mathlens/errors.hpp"
#include "mathlens/metrics.hpp"

using namespace mathlens;
using namespace mathlens::metrics;

namespace {

flow::ReasoningFlow tiny_flow(std::size_t steps) {
    std::vector<flow::AnnotatedStep> annotated;
    for (std::size_t i = 0; i < steps; ++i) {
        flow::AnnotatedStep step;
        step.raw.index = i;
        step.raw.text = "Evaluate term " + std::to_string(i) + ".";
        step.operations.push_back({flow::OperationKind::evaluation, "evaluate"});
        step.complexity = flow::complexity_from_features({1, 0, 1, 0});
        annotated.push_back(std::move(step));
    }
    return flow::build_reasoning_graph(std::move(annotated));
}

AblationTrial trial_with(double cosine, double ned, double alpha, std::string surface) {
    AblationTrial trial;
    trial.element.kind = ablate::ElementKind::math_expression;
    trial.element.surface = std::move(surface);
    trial.score.cosine_similarity = cosine;
    trial.score.normalized_edit_distance = ned;
    trial.score.alpha = alpha;
    trial.score.divergence = divergence::combine(alpha, cosine, ned);
    return trial;
}

}  // namespace

TEST_CASE("identical responses give robustness 1.0 and sensitivity 0.0 exactly") {
    std::vector<AblationTrial> trials(4, trial_with(1.0, 0.0, 0.5, "x"));
    QuestionMetrics qm = question_metrics(trials, tiny_flow(3), "q");
    CHECK(qm.robustness == 1.0);
    CHECK(qm.phrase_sensitivity == 0.0);
    CHECK(qm.step_count == 3);
    CHECK(qm.complexity == tiny_flow(3).summary.reasoning_complexity_score);
    CHECK(qm.pattern_trace == std::vector<std::string>(3, "evaluation"));
}

TEST_CASE("one disjoint response among identical ones") {
    const std::size_t k = 5;
    std::vector<AblationTrial> trials(k - 1, trial_with(1.0, 0.0, 0.5, "same"));
    trials.push_back(trial_with(0.0, 1.0, 0.5, "different"));
    QuestionMetrics qm = question_metrics(trials, tiny_flow(2), "q");
    CHECK(qm.robustness == static_cast<double>(k - 1) / static_cast<double>(k));
    CHECK(qm.phrase_sensitivity == 1.0);
}

TEST_CASE("impacts ranked by descending divergence") {
    std::vector<double> divergences = {0.48, 0.37, 0.63, 0.38, 0.56};
    std::vector<AblationTrial> trials;
    for (double d : divergences) trials.push_back(trial_with(1.0 - d, d, 0.5, std::to_string(d)));
    QuestionMetrics qm = question_metrics(trials, tiny_flow(1), "q");
    REQUIRE(qm.impacts.size() == 5);
    std::vector<double> expected = {0.63, 0.56, 0.48, 0.38, 0.37};
    for (std::size_t i = 0; i < expected.size(); ++i)
        CHECK(qm.impacts[i].impact == doctest::Approx(expected[i]).epsilon(1e-12));
    for (std::size_t i = 0; i + 1 < qm.impacts.size(); ++i)
        CHECK(qm.impacts[i].impact >= qm.impacts[i + 1].impact);
}

TEST_CASE("question metrics require at least one trial") {
    std::vector<AblationTrial> trials;
    CHECK_THROWS_AS(question_metrics(trials, tiny_flow(1), "q"), NoTrials);
}

TEST_CASE("stored question metrics equal a brute-force rescan") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int round = 0; round < 50; ++round) {
        std::vector<AblationTrial> trials;
        std::size_t n = 1 + rng() % 8;
        for (std::size_t i = 0; i < n; ++i)
            trials.push_back(trial_with(unit(rng), unit(rng), 0.5, "e" + std::to_string(i)));
        QuestionMetrics qm = question_metrics(trials, tiny_flow(2), "q");

        double sum = 0.0, max_div = 0.0;
        for (const AblationTrial& t : trials) {
            sum += t.score.cosine_similarity;
            max_div = std::max(max_div, t.score.divergence);
        }
        CHECK(qm.robustness == sum / static_cast<double>(n));
        CHECK(qm.phrase_sensitivity == max_div);
        for (const AblationTrial& t : trials) CHECK(qm.phrase_sensitivity >= t.score.divergence);

        double lo = 1.0, hi = 0.0;
        for (const AblationTrial& t : trials) {
            lo = std::min(lo, t.score.cosine_similarity);
            hi = std::max(hi, t.score.cosine_similarity);
        }
        CHECK(qm.robustness >= lo);
        CHECK(qm.robustness <= hi);
    }
}

TEST_CASE("single-question exam aggregates to zero deviation") {
    QuestionMetrics q;
    q.question_id = "q1";
    q.robustness = 0.8;
    q.phrase_sensitivity = 0.4;
    q.step_count = 6;
    q.complexity = 19;
    std::vector<QuestionMetrics> questions = {q};
    ExamMetrics exam = exam_aggregate(questions, "Exam I", Configuration::baseline, "Calc I");
    CHECK(exam.robustness.mean == 0.8);
    CHECK(exam.robustness.std_dev == 0.0);
    CHECK(exam.robustness.n == 1);
    CHECK(exam.step_count.mean == 6.0);
}

TEST_CASE("two-question exam matches hand arithmetic") {
    QuestionMetrics a, b;
    a.robustness = 0.7;
    b.robustness = 0.8;
    a.phrase_sensitivity = 0.2;
    b.phrase_sensitivity = 0.6;
    a.step_count = 5;
    b.step_count = 7;
    a.complexity = 15;
    b.complexity = 25;
    std::vector<QuestionMetrics> questions = {a, b};
    ExamMetrics exam = exam_aggregate(questions, "Exam I", Configuration::rag);
    CHECK(exam.robustness.mean == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(exam.robustness.std_dev == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(exam.complexity.mean == doctest::Approx(20.0).epsilon(1e-15));
    CHECK(exam.step_count.mean == doctest::Approx(6.0).epsilon(1e-15));
    CHECK(exam.phrase_sensitivity.mean == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(exam.robustness.n == 2);
}

TEST_CASE("aggregation is permutation-invariant bit for bit") {
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<QuestionMetrics> questions;
    for (int i = 0; i < 9; ++i) {
        QuestionMetrics q;
        q.robustness = unit(rng);
        q.phrase_sensitivity = unit(rng);
        q.step_count = 1 + rng() % 10;
        q.complexity = 1 + static_cast<int>(rng() % 30);
        questions.push_back(q);
    }
    ExamMetrics base = exam_aggregate(questions, "E", Configuration::contextual);
    for (int shuffle = 0; shuffle < 10; ++shuffle) {
        std::shuffle(questions.begin(), questions.end(), rng);
        ExamMetrics again = exam_aggregate(questions, "E", Configuration::contextual);
        CHECK(again.robustness.mean == base.robustness.mean);
        CHECK(again.robustness.std_dev == base.robustness.std_dev);
        CHECK(again.complexity.mean == base.complexity.mean);
        CHECK(again.complexity.std_dev == base.complexity.std_dev);
        CHECK(again.step_count.mean == base.step_count.mean);
        CHECK(again.phrase_sensitivity.std_dev == base.phrase_sensitivity.std_dev);
    }
    CHECK(base.robustness.mean >= 0.0);
    CHECK(base.robustness.mean <= 1.0);
    CHECK(base.phrase_sensitivity.mean >= 0.0);
    CHECK(base.phrase_sensitivity.mean <= 1.0);
    CHECK(base.step_count.mean >= 1.0);
}

TEST_CASE("exam aggregation requires questions") {
    std::vector<QuestionMetrics> none;
    CHECK_THROWS_AS(exam_aggregate(none, "E", Configuration::baseline), NoQuestions);
}

#include <doctest.h>

#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mathlens/errors.hpp"
#include "mathlens/flow.hpp"
#include "mathlens/text.hpp"
#include "support/oracles.hpp"

using namespace mathlens;
using namespace mathlens::flow;

namespace {

std::string fixture_path(const std::string& name) {
    return std::string(MATHLENS_FIXTURE_DIR) + "/" + name;
}

std::string read_fixture(const std::string& name) {
    return text::read_file(fixture_path(name));
}

RawStep step_of(std::string text) {
    RawStep step;
    step.text = std::move(text);
    step.end = step.text.size();
    return step;
}

}  // namespace

TEST_CASE("segment_steps splits explicit enumerations") {
    auto steps = segment_steps("1. Differentiate f. 2. Evaluate at x=2.");
    REQUIRE(steps.size() == 2);
    CHECK(steps[0].text == "1. Differentiate f.");
    CHECK(steps[1].text == "2. Evaluate at x=2.");
    CHECK(steps[0].begin == 0);
    CHECK(steps[1].begin == 20);
}

TEST_CASE("segment_steps rejects blank input") {
    CHECK_THROWS_AS(segment_steps(""), EmptySolution);
    CHECK_THROWS_AS(segment_steps("   \n\t "), EmptySolution);
}

TEST_CASE("segment_steps splits on discourse markers without punctuation") {
    auto steps = segment_steps("First differentiate both sides\nThen evaluate at x = 2");
    REQUIRE(steps.size() == 2);
    CHECK(steps[0].text == "First differentiate both sides");
    CHECK(steps[1].text == "Then evaluate at x = 2");
}

TEST_CASE("segment_steps does not split decimals or factorials mid-token") {
    auto steps = segment_steps("Substitute x = 0.5 into the series. Then add the n! terms.");
    REQUIRE(steps.size() == 2);
}

TEST_CASE("grad_q1 fixture segments into exactly 7 steps") {
    auto steps = segment_steps(read_fixture("solutions/grad_q1.txt"));
    CHECK(steps.size() == 7);
}

TEST_CASE("classify_operations matches the worked examples") {
    const Lexicon& ops = default_operation_lexicon();
    auto tags = classify_operations(step_of("Differentiate both sides with respect to x"), ops);
    REQUIRE(tags.size() == 1);
    CHECK(tags[0].name == OperationKind::differentiation);

    tags = classify_operations(step_of("Substitute u = x^2 and simplify"), ops);
    REQUIRE(tags.size() == 2);
    CHECK(tags[0].name == OperationKind::substitution);
    CHECK(tags[1].name == OperationKind::simplification);

    CHECK(classify_operations(step_of("The answer is 4"), ops).empty());
}

TEST_CASE("classify_concepts matches phrases and symbol aliases") {
    const Lexicon& concepts = default_concept_lexicon();
    auto tags = classify_concepts(step_of("Apply the chain rule to the outer function"), concepts);
    REQUIRE(tags.size() == 1);
    CHECK(tags[0].name == "chain rule");

    tags = classify_concepts(step_of("Compute ∇f(-1,4)"), concepts);
    REQUIRE(tags.size() == 1);
    CHECK(tags[0].name == "gradient");
    CHECK(tags[0].matched_lexeme == "∇");
}

TEST_CASE("grad_q1 step 5 carries gradient and directional derivative") {
    ReasoningFlow reasoning = annotate(read_fixture("solutions/grad_q1.txt"));
    REQUIRE(reasoning.steps.size() == 7);
    const auto& concepts = reasoning.steps[4].concepts;
    REQUIRE(concepts.size() == 2);
    CHECK(concepts[0].name == "gradient");
    CHECK(concepts[1].name == "directional derivative");
}

TEST_CASE("complexity levels follow the feature score") {
    // score = tokens + 2*nesting + 2*ops + 2*concepts
    CHECK(complexity_from_features({1, 0, 0, 0}).level == Level::low);
    CHECK(complexity_from_features({3, 1, 1, 1}).level == Level::medium);  // s = 9
    CHECK(complexity_from_features({6, 2, 2, 2}).level == Level::high);    // s = 18
    CHECK(complexity_from_features({3, 1, 1, 1}).features.score() == 9);
    CHECK(complexity_from_features({6, 2, 2, 2}).features.score() == 18);
    CHECK(level_weight(Level::low) == 1);
    CHECK(level_weight(Level::medium) == 3);
    CHECK(level_weight(Level::high) == 5);
}

TEST_CASE("estimate_step_complexity extracts features from the step text") {
    AnnotatedStep step;
    step.raw = step_of("So the answer is 5.");
    step.complexity = estimate_step_complexity(step);
    CHECK(step.complexity.level == Level::low);
    CHECK(step.complexity.features.math_token_count == 1);
    CHECK(step.complexity.features.max_nesting_depth == 0);

    // 3 math tokens (f(2), 4, x^2), depth 1, 1 op, 1 concept -> s = 9 -> medium.
    AnnotatedStep medium;
    medium.raw = step_of("Compute f(2) at 4 for u = x^2 with the chain rule.");
    medium.operations = classify_operations(medium.raw, default_operation_lexicon());
    medium.concepts = classify_concepts(medium.raw, default_concept_lexicon());
    REQUIRE(medium.operations.size() == 1);
    REQUIRE(medium.concepts.size() == 1);
    medium.complexity = estimate_step_complexity(medium);
    CHECK(medium.complexity.features.math_token_count == 3);
    CHECK(medium.complexity.features.max_nesting_depth == 1);
    CHECK(medium.complexity.features.score() == 9);
    CHECK(medium.complexity.level == Level::medium);
}

TEST_CASE("single-step graph has no edges") {
    AnnotatedStep only;
    only.raw = step_of("Evaluate the expression.");
    only.complexity = complexity_from_features({0, 0, 0, 0});
    ReasoningFlow reasoning = build_reasoning_graph({only});
    CHECK(reasoning.edges.empty());
    CHECK(reasoning.summary.total_steps == 1);
}

TEST_CASE("explicit back-reference adds one reference edge") {
    std::vector<AnnotatedStep> steps;
    for (const char* text : {"Differentiate f.", "Evaluate at 2.", "Combine using step 1."}) {
        AnnotatedStep step;
        step.raw = step_of(text);
        step.raw.index = steps.size();
        step.complexity = complexity_from_features({0, 0, 0, 0});
        steps.push_back(std::move(step));
    }
    ReasoningFlow reasoning = build_reasoning_graph(std::move(steps));
    REQUIRE(reasoning.edges.size() == 3);
    CHECK(reasoning.edges[0] == Edge{0, 1, EdgeKind::sequential});
    CHECK(reasoning.edges[1] == Edge{1, 2, EdgeKind::sequential});
    CHECK(reasoning.edges[2] == Edge{0, 2, EdgeKind::reference});
}

TEST_CASE("grad_q1 pattern trace matches the hand labels and the graph is a DAG") {
    ReasoningFlow reasoning = annotate(read_fixture("solutions/grad_q1.txt"));
    std::vector<std::string> expected = {"substitution", "differentiation", "differentiation",
                                         "solving",      "differentiation", "evaluation",
                                         "solving"};
    CHECK(reasoning.summary.pattern_trace == expected);

    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (const Edge& e : reasoning.edges) edges.emplace_back(e.from, e.to);
    CHECK(oracles::is_dag(reasoning.steps.size(), edges));
}

TEST_CASE("all labeled fixtures match step counts and traces") {
    nlohmann::json labels =
        nlohmann::json::parse(std::ifstream(fixture_path("solutions/labels.json")));
    for (const auto& [name, expected] : labels.items()) {
        INFO("fixture ", name);
        ReasoningFlow reasoning = annotate(read_fixture("solutions/" + name + ".txt"));
        CHECK(reasoning.summary.total_steps == expected["steps"].get<std::size_t>());
        CHECK(reasoning.summary.pattern_trace ==
              expected["trace"].get<std::vector<std::string>>());
    }
}

TEST_CASE("segmentation is deterministic and covers all non-whitespace text") {
    for (const char* name :
         {"solutions/grad_q1.txt", "solutions/s02_limit.txt", "solutions/s08_inverse.txt"}) {
        std::string source = read_fixture(name);
        auto first = segment_steps(source);
        auto second = segment_steps(source);
        REQUIRE(first.size() == second.size());
        for (std::size_t i = 0; i < first.size(); ++i) {
            CHECK(first[i].text == second[i].text);
            CHECK(first[i].begin == second[i].begin);
            CHECK(first[i].end == second[i].end);
        }
        // Span-coverage: every non-whitespace byte falls inside some span,
        // spans are strictly increasing, and each span reproduces its text.
        std::size_t cursor = 0;
        for (const RawStep& step : first) {
            CHECK(step.begin >= cursor);
            for (std::size_t p = cursor; p < step.begin; ++p) CHECK(text::is_space(source[p]));
            CHECK(source.substr(step.begin, step.end - step.begin) == step.text);
            cursor = step.end;
        }
        for (std::size_t p = cursor; p < source.size(); ++p) CHECK(text::is_space(source[p]));
    }
}

TEST_CASE("summary identities hold over 1000 random synthetic flows") {
    std::mt19937 rng(42);
    std::uniform_int_distribution<int> step_count(1, 12);
    std::uniform_int_distribution<int> feature(0, 4);
    std::uniform_int_distribution<int> backref(0, 3);

    for (int round = 0; round < 1000; ++round) {
        const int n = step_count(rng);
        std::vector<AnnotatedStep> steps;
        for (int i = 0; i < n; ++i) {
            AnnotatedStep step;
            std::string body = "Evaluate expression " + std::to_string(i) + ".";
            if (i > 0 && backref(rng) == 0)
                body += " Using step " + std::to_string(1 + (i > 1 ? i - 1 : 1)) + ".";
            step.raw = step_of(body);
            step.raw.index = static_cast<std::size_t>(i);
            step.operations = classify_operations(step.raw, default_operation_lexicon());
            step.complexity = complexity_from_features(
                {feature(rng), feature(rng), feature(rng), feature(rng)});
            steps.push_back(std::move(step));
        }

        ReasoningFlow reasoning = build_reasoning_graph(std::move(steps));
        int weight_sum = 0;
        for (const AnnotatedStep& step : reasoning.steps) weight_sum += step.complexity.weight;
        CHECK(reasoning.summary.reasoning_complexity_score == weight_sum);
        CHECK(reasoning.summary.avg_complexity_per_step ==
              static_cast<double>(weight_sum) / static_cast<double>(n));
        CHECK(reasoning.summary.reasoning_complexity_score >=
              static_cast<int>(reasoning.summary.total_steps));
        CHECK(reasoning.summary.pattern_trace.size() == reasoning.summary.total_steps);

        std::vector<std::pair<std::size_t, std::size_t>> edges;
        for (const Edge& e : reasoning.edges) {
            edges.emplace_back(e.from, e.to);
            CHECK(e.from < e.to);  // forward-only edges
            if (e.kind == EdgeKind::sequential) CHECK(e.to == e.from + 1);
        }
        CHECK(oracles::is_dag(reasoning.steps.size(), edges));
    }
}

TEST_CASE("adding a lexicon entry never removes existing tags") {
    const char* samples[] = {
        "Differentiate and then simplify the result.",
        "Solve for x after substituting the value.",
        "The answer is 4.",
        "Integrate the limit of the series.",
    };
    Lexicon base = default_operation_lexicon();
    Lexicon extended = base;
    extended.add("expansion", {"expand", "result"});

    for (const char* sample : samples) {
        auto before = classify_operations(step_of(sample), base);
        auto after = classify_operations(step_of(sample), extended);
        for (const OperationTag& tag : before) {
            bool still_present = false;
            for (const OperationTag& t : after)
                if (t.name == tag.name) still_present = true;
            CHECK(still_present);
        }
    }
}

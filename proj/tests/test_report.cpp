#include <doctest.h>

#include <algorithm>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "mathlens/errors.hpp"
#include "mathlens/report.hpp"
#include "mathlens/text.hpp"

using namespace mathlens;
using namespace mathlens::report;

namespace {

AnalysisReport sample_report() {
    AnalysisReport r;
    r.timestamp = "20250724_182112";
    r.model_name = "gemma3:latest";
    r.question_text = "Find the gradient ∇f of f(x, y) = x^2y at point (-1, 4)";
    r.impacts = {
        {"(-1, 4)", ablate::ElementKind::numeric_reference, 0.630},
        {"∇f", ablate::ElementKind::math_expression, 0.562},
        {"directional", ablate::ElementKind::instruction_keyword, 0.477},
        {"f(x, y)", ablate::ElementKind::math_expression, 0.379},
        {"maximum", ablate::ElementKind::instruction_keyword, 0.373},
    };
    r.flow_summary.total_steps = 7;
    r.flow_summary.total_operation_count = 12;
    r.flow_summary.unique_concepts = 4;
    r.flow_summary.avg_complexity_per_step = 23.0 / 7.0;
    r.flow_summary.reasoning_complexity_score = 23;
    r.flow_summary.pattern_trace = {"substitution", "differentiation", "differentiation",
                                    "solving",      "differentiation", "evaluation",
                                    "solving"};
    r.detailed_steps = {
        {"Substitute the function into the gradient formula.", {"substitution"}, {"gradient"}},
        {"Differentiate with respect to x.", {"differentiation"}, {}},
    };
    r.run_metadata.configuration = metrics::Configuration::baseline;
    r.run_metadata.alpha = 0.5;
    r.run_metadata.temperature = 0.0;
    return r;
}

metrics::ExamMetrics exam_row(std::string course, std::string exam,
                              metrics::Configuration config, double robustness,
                              double complexity, double steps, double sensitivity) {
    metrics::ExamMetrics m;
    m.course = std::move(course);
    m.exam_id = std::move(exam);
    m.configuration = config;
    m.robustness.mean = robustness;
    m.complexity.mean = complexity;
    m.step_count.mean = steps;
    m.phrase_sensitivity.mean = sensitivity;
    m.robustness.n = m.complexity.n = m.step_count.n = m.phrase_sensitivity.n = 8;
    return m;
}

}  // namespace

TEST_CASE("markdown report carries the three sections in order with 3-decimal impacts") {
    std::string md = render_question_report(sample_report(), ReportFormat::markdown);

    std::size_t ablation = md.find("## Ablation Analysis Results");
    std::size_t flow_section = md.find("## Reasoning Flow Analysis");
    std::size_t detailed = md.find("## Detailed Reasoning Steps");
    REQUIRE(ablation != std::string::npos);
    REQUIRE(flow_section != std::string::npos);
    REQUIRE(detailed != std::string::npos);
    CHECK(ablation < flow_section);
    CHECK(flow_section < detailed);

    CHECK(md.find("Important phrase: (-1, 4)  Impact: 0.630") != std::string::npos);
    CHECK(md.find("Total steps: 7") != std::string::npos);
    CHECK(md.find("Complexity score: 23") != std::string::npos);
    CHECK(md.find("Reasoning patterns: substitution, differentiation") != std::string::npos);
    CHECK(md.find("Timestamp: 20250724_182112") != std::string::npos);
}

TEST_CASE("every flow summary field surfaces in the markdown") {
    AnalysisReport r = sample_report();
    std::string md = render_question_report(r, ReportFormat::markdown);
    CHECK(md.find(std::to_string(r.flow_summary.total_steps)) != std::string::npos);
    CHECK(md.find(std::to_string(r.flow_summary.total_operation_count)) != std::string::npos);
    CHECK(md.find(std::to_string(r.flow_summary.unique_concepts)) != std::string::npos);
    CHECK(md.find(format_fixed(r.flow_summary.avg_complexity_per_step, 2)) != std::string::npos);
    CHECK(md.find(std::to_string(r.flow_summary.reasoning_complexity_score)) != std::string::npos);
    for (const std::string& op : r.flow_summary.pattern_trace)
        CHECK(md.find(op) != std::string::npos);
}

TEST_CASE("empty sections render 'none'") {
    AnalysisReport r = sample_report();
    r.impacts.clear();
    r.detailed_steps.clear();
    std::string md = render_question_report(r, ReportFormat::markdown);
    std::size_t ablation = md.find("## Ablation Analysis Results");
    CHECK(md.find("none", ablation) != std::string::npos);
}

TEST_CASE("json report round-trips byte-identically") {
    std::string first = render_question_report(sample_report(), ReportFormat::json);
    nlohmann::ordered_json parsed = nlohmann::ordered_json::parse(first);
    std::string second = parsed.dump(2) + "\n";
    CHECK(first == second);
    CHECK(parsed["impacts"][0]["surface"] == "(-1, 4)");
    CHECK(parsed["run_metadata"]["configuration"] == "baseline");
}

TEST_CASE("rendering is a pure function of the report") {
    AnalysisReport r = sample_report();
    CHECK(render_question_report(r, ReportFormat::markdown) ==
          render_question_report(r, ReportFormat::markdown));
    CHECK(render_question_report(r, ReportFormat::json) ==
          render_question_report(r, ReportFormat::json));
}

TEST_CASE("DOT export renders nodes and dashed reference edges") {
    flow::AnnotatedStep a, b, c;
    a.raw.text = "Substitute the value.";
    a.operations.push_back({flow::OperationKind::substitution, "substitute"});
    b.raw.text = "Differentiate the function.";
    b.operations.push_back({flow::OperationKind::differentiation, "differentiate"});
    c.raw.text = "Combine using step 1.";
    for (auto* step : {&a, &b, &c}) step->complexity = flow::complexity_from_features({0, 0, 0, 0});
    a.raw.index = 0;
    b.raw.index = 1;
    c.raw.index = 2;

    flow::ReasoningFlow single = flow::build_reasoning_graph({a});
    std::string dot_single = export_graph_dot(single);
    CHECK(dot_single.find("s0 [label=\"S0: substitution\"]") != std::string::npos);
    CHECK(dot_single.find("->") == std::string::npos);

    flow::ReasoningFlow three = flow::build_reasoning_graph({a, b, c});
    std::string dot = export_graph_dot(three);
    CHECK(dot.find("s0 -> s1;") != std::string::npos);
    CHECK(dot.find("s1 -> s2;") != std::string::npos);
    CHECK(dot.find("s0 -> s2 [style=dashed];") != std::string::npos);

    // Structural validity per the DOT grammar subset this emitter uses.
    std::regex node_line(R"(^  s\d+ \[label="S\d+: [a-z_]+"\];$)");
    std::regex edge_line(R"(^  s\d+ -> s\d+( \[style=dashed\])?;$)");
    std::istringstream lines(dot);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "digraph reasoning_flow {");
    int depth = 1;
    while (std::getline(lines, line)) {
        if (line == "}") {
            --depth;
            continue;
        }
        if (line == "  rankdir=LR;") continue;
        bool ok = std::regex_match(line, node_line) || std::regex_match(line, edge_line);
        CHECK(ok);
    }
    CHECK(depth == 0);
}

TEST_CASE("exam table reproduces the column set, precision, and row order") {
    std::vector<metrics::ExamMetrics> rows = {
        exam_row("Calc I", "Exam I", metrics::Configuration::contextual, 0.7519, 19.34, 6.44,
                 0.4449),
        exam_row("Calc I", "Exam I", metrics::Configuration::baseline, 0.726, 18.7, 6.1, 0.488),
        exam_row("Calc I", "Exam I", metrics::Configuration::rag, 0.671, 17.9, 5.9, 0.503),
    };
    std::string csv = export_exam_table(rows, TableFormat::csv);
    std::istringstream lines(csv);
    std::string header, row_b, row_r, row_c;
    std::getline(lines, header);
    std::getline(lines, row_b);
    std::getline(lines, row_r);
    std::getline(lines, row_c);
    CHECK(header == "Course,Exam,Model,Robustness,Complexity,Step Count,Phrase Sensitivity");
    CHECK(row_b == "Calc I,Exam I,B,0.726,18.7,6.1,0.488");
    CHECK(row_r == "Calc I,Exam I,R,0.671,17.9,5.9,0.503");
    CHECK(row_c == "Calc I,Exam I,C,0.752,19.3,6.4,0.445");  // 0.7519 rounds to 0.752

    std::regex data_row(R"(^[^,]+,[^,]+,[BRC],\d\.\d{3},\d+\.\d,\d+\.\d,\d\.\d{3}$)");
    CHECK(std::regex_match(row_b, data_row));
    CHECK(std::regex_match(row_c, data_row));

    std::string md = export_exam_table(rows, TableFormat::markdown);
    CHECK(md.find("| Calc I | Exam I | B | 0.726 | 18.7 | 6.1 | 0.488 |") != std::string::npos);
}

TEST_CASE("csv row count equals the number of exam metrics") {
    std::vector<metrics::ExamMetrics> rows;
    for (auto config : {metrics::Configuration::baseline, metrics::Configuration::rag})
        for (const char* exam : {"Exam I", "Exam II"})
            rows.push_back(exam_row("Calc II", exam, config, 0.7, 18.0, 6.0, 0.4));
    std::string csv = export_exam_table(rows, TableFormat::csv);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 4);
}

TEST_CASE("standard rubric validates and sums to 100") {
    RubricSchema rubric = RubricSchema::standard();
    rubric.validate();
    int total = 0;
    for (const auto& criterion : rubric.criteria) total += criterion.weight;
    CHECK(total == 100);
    REQUIRE(rubric.criteria.size() == 5);
    CHECK(rubric.criteria[0].weight == 30);
    CHECK(rubric.criteria[1].weight == 40);

    rubric.criteria[0].weight = 31;
    CHECK_THROWS_AS(rubric.validate(), BadConfig);
}

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mathlens/flow.hpp"
#include "mathlens/metrics.hpp"

namespace mathlens::report {

struct DetailedStep {
    std::string text;
    std::vector<std::string> operations;
    std::vector<std::string> concepts;
};

struct RunMetadata {
    metrics::Configuration configuration = metrics::Configuration::baseline;
    double alpha = 0.5;
    double temperature = 0.0;
    std::optional<int> max_tokens;
    bool context_truncated = false;
};

struct AnalysisReport {
    std::string timestamp;  // UTC, YYYYMMDD_HHMMSS
    std::string model_name;
    std::string question_text;
    std::vector<metrics::ElementImpact> impacts;  // ranked non-increasing
    flow::FlowSummary flow_summary;
    std::vector<DetailedStep> detailed_steps;
    RunMetadata run_metadata;
};

// Grading rubric attached to report metadata for human graders; weights are
// percentages summing to 100.
struct RubricSchema {
    struct Criterion {
        std::string name;
        int weight = 0;
        std::string description;
    };
    std::vector<Criterion> criteria;

    static RubricSchema standard();
    void validate() const;  // throws BadConfig unless weights sum to 100
};

enum class ReportFormat { markdown, json };

// Markdown mirrors the analysis-report layout: header block, then the
// "Ablation Analysis Results", "Reasoning Flow Analysis" and "Detailed
// Reasoning Steps" sections in that order; empty sections render "none".
// JSON is a stable-key-order serialization that round-trips byte-identically.
std::string render_question_report(const AnalysisReport& report, ReportFormat format);

// DOT digraph; node labels "S<idx>: <dominant op>", sequential edges solid,
// reference edges dashed.
std::string export_graph_dot(const flow::ReasoningFlow& flow);

enum class TableFormat { csv, markdown };

// Table-3-shaped export: Course, Exam, Model (B/R/C), Robustness, Complexity,
// Step Count, Phrase Sensitivity with 3/1/1/3 decimal places. Rows are
// ordered by course, exam, then B < R < C.
std::string export_exam_table(std::span<const metrics::ExamMetrics> all_metrics,
                              TableFormat format);

std::string format_fixed(double value, int decimals);

}  // namespace mathlens::report

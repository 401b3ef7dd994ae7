#include "mathlens/report.hpp"

#include <algorithm>
#include <cstdio>

#include <json.hpp>

#include "mathlens/errors.hpp"

namespace mathlens::report {

std::string format_fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
    return buf;
}

RubricSchema RubricSchema::standard() {
    RubricSchema rubric;
    rubric.criteria = {
        {"Correct Method / Setup", 30,
         "Appropriate approach selected; limits, bounds, or parameterization identified."},
        {"Execution/Computation", 40,
         "Accurate algebra, arithmetic, and calculus steps with logical progression."},
        {"Correct Final Answer", 10, "Correct numeric or symbolic answer, simplified."},
        {"Mathematical Notation & Units", 10, "Proper notation and units where appropriate."},
        {"Clarity/Explanation", 10, "Steps shown clearly; reasoning explained when needed."},
    };
    return rubric;
}

void RubricSchema::validate() const {
    int total = 0;
    for (const Criterion& c : criteria) total += c.weight;
    if (total != 100)
        throw BadConfig("rubric weights sum to " + std::to_string(total) + ", expected 100");
}

namespace {

std::string join(std::span<const std::string> parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::string render_markdown(const AnalysisReport& r) {
    std::string md;
    md += "# LLM Attention Analysis Report\n\n";
    md += "Timestamp: " + r.timestamp + "\n";
    md += "Model: " + r.model_name + "\n\n";
    md += "Question Analyzed:\n" + r.question_text + "\n\n";

    md += "## Ablation Analysis Results\n\n";
    if (r.impacts.empty()) {
        md += "none\n";
    } else {
        for (const metrics::ElementImpact& impact : r.impacts)
            md += "Important phrase: " + impact.element_surface +
                  "  Impact: " + format_fixed(impact.impact, 3) + "\n";
    }
    md += "\n## Reasoning Flow Analysis\n\n";
    md += "Total steps: " + std::to_string(r.flow_summary.total_steps) + "\n";
    md += "Total operations: " + std::to_string(r.flow_summary.total_operation_count) + "\n";
    md += "Unique concepts: " + std::to_string(r.flow_summary.unique_concepts) + "\n";
    md += "Average complexity per step: " +
          format_fixed(r.flow_summary.avg_complexity_per_step, 2) + "\n";
    md += "Complexity score: " + std::to_string(r.flow_summary.reasoning_complexity_score) + "\n";
    md += "Reasoning patterns: " +
          (r.flow_summary.pattern_trace.empty() ? std::string("none")
                                                : join(r.flow_summary.pattern_trace, ", ")) +
          "\n";

    md += "\n## Detailed Reasoning Steps\n\n";
    if (r.detailed_steps.empty()) {
        md += "none\n";
    } else {
        for (std::size_t i = 0; i < r.detailed_steps.size(); ++i) {
            const DetailedStep& step = r.detailed_steps[i];
            md += std::to_string(i + 1) + ". " + step.text + "\n";
            md += "   Operations: " +
                  (step.operations.empty() ? std::string("none") : join(step.operations, ", ")) +
                  "\n";
            md += "   Concepts: " +
                  (step.concepts.empty() ? std::string("none") : join(step.concepts, ", ")) + "\n";
        }
    }

    md += "\n## Run Metadata\n\n";
    md += "Configuration: " + std::string(metrics::configuration_name(r.run_metadata.configuration)) +
          "\n";
    md += "Alpha: " + format_fixed(r.run_metadata.alpha, 2) + "\n";
    md += "Temperature: " + format_fixed(r.run_metadata.temperature, 2) + "\n";
    md += "Max tokens: " +
          (r.run_metadata.max_tokens ? std::to_string(*r.run_metadata.max_tokens)
                                     : std::string("unset")) +
          "\n";
    md += std::string("Context truncated: ") + (r.run_metadata.context_truncated ? "yes" : "no") +
          "\n";
    return md;
}

nlohmann::ordered_json to_json(const AnalysisReport& r) {
    nlohmann::ordered_json j;
    j["timestamp"] = r.timestamp;
    j["model"] = r.model_name;
    j["question"] = r.question_text;
    nlohmann::ordered_json impacts = nlohmann::ordered_json::array();
    for (const metrics::ElementImpact& impact : r.impacts) {
        impacts.push_back({{"surface", impact.element_surface},
                           {"kind", std::string(ablate::element_kind_name(impact.element_kind))},
                           {"impact", impact.impact}});
    }
    j["impacts"] = std::move(impacts);
    j["flow_summary"] = {
        {"total_steps", r.flow_summary.total_steps},
        {"total_operation_count", r.flow_summary.total_operation_count},
        {"unique_concepts", r.flow_summary.unique_concepts},
        {"avg_complexity_per_step", r.flow_summary.avg_complexity_per_step},
        {"reasoning_complexity_score", r.flow_summary.reasoning_complexity_score},
        {"pattern_trace", r.flow_summary.pattern_trace},
    };
    nlohmann::ordered_json steps = nlohmann::ordered_json::array();
    for (const DetailedStep& step : r.detailed_steps) {
        steps.push_back({{"text", step.text},
                         {"operations", step.operations},
                         {"concepts", step.concepts}});
    }
    j["detailed_steps"] = std::move(steps);
    j["run_metadata"] = {
        {"configuration", std::string(metrics::configuration_name(r.run_metadata.configuration))},
        {"alpha", r.run_metadata.alpha},
        {"temperature", r.run_metadata.temperature},
        {"max_tokens",
         r.run_metadata.max_tokens ? nlohmann::ordered_json(*r.run_metadata.max_tokens)
                                   : nlohmann::ordered_json(nullptr)},
        {"context_truncated", r.run_metadata.context_truncated},
    };
    return j;
}

}  // namespace

std::string render_question_report(const AnalysisReport& report, ReportFormat format) {
    if (format == ReportFormat::markdown) return render_markdown(report);
    return to_json(report).dump(2) + "\n";
}

std::string export_graph_dot(const flow::ReasoningFlow& reasoning) {
    std::string dot;
    dot += "digraph reasoning_flow {\n";
    dot += "  rankdir=LR;\n";
    for (std::size_t i = 0; i < reasoning.steps.size(); ++i) {
        dot += "  s" + std::to_string(i) + " [label=\"S" + std::to_string(i) + ": " +
               std::string(flow::operation_name(flow::dominant_operation(reasoning.steps[i]))) +
               "\"];\n";
    }
    for (const flow::Edge& edge : reasoning.edges) {
        dot += "  s" + std::to_string(edge.from) + " -> s" + std::to_string(edge.to);
        if (edge.kind == flow::EdgeKind::reference) dot += " [style=dashed]";
        dot += ";\n";
    }
    dot += "}\n";
    return dot;
}

namespace {

int configuration_rank(metrics::Configuration c) {
    switch (c) {
        case metrics::Configuration::baseline: return 0;
        case metrics::Configuration::rag: return 1;
        case metrics::Configuration::contextual: break;
    }
    return 2;
}

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string quoted = "\"";
    for (char c : field) {
        if (c == '"') quoted += "\"\"";
        else quoted.push_back(c);
    }
    quoted += "\"";
    return quoted;
}

}  // namespace

std::string export_exam_table(std::span<const metrics::ExamMetrics> all_metrics,
                              TableFormat format) {
    std::vector<const metrics::ExamMetrics*> rows;
    rows.reserve(all_metrics.size());
    for (const metrics::ExamMetrics& m : all_metrics) rows.push_back(&m);
    std::sort(rows.begin(), rows.end(),
              [](const metrics::ExamMetrics* a, const metrics::ExamMetrics* b) {
                  if (a->course != b->course) return a->course < b->course;
                  if (a->exam_id != b->exam_id) return a->exam_id < b->exam_id;
                  return configuration_rank(a->configuration) < configuration_rank(b->configuration);
              });

    std::string out;
    if (format == TableFormat::csv) {
        out += "Course,Exam,Model,Robustness,Complexity,Step Count,Phrase Sensitivity\n";
        for (const metrics::ExamMetrics* m : rows) {
            out += csv_quote(m->course) + "," + csv_quote(m->exam_id) + "," +
                   std::string(metrics::configuration_letter(m->configuration)) + "," +
                   format_fixed(m->robustness.mean, 3) + "," +
                   format_fixed(m->complexity.mean, 1) + "," +
                   format_fixed(m->step_count.mean, 1) + "," +
                   format_fixed(m->phrase_sensitivity.mean, 3) + "\n";
        }
        return out;
    }
    out += "| Course | Exam | Model | Robustness | Complexity | Step Count | Phrase Sensitivity |\n";
    out += "|---|---|---|---|---|---|---|\n";
    for (const metrics::ExamMetrics* m : rows) {
        out += "| " + m->course + " | " + m->exam_id + " | " +
               std::string(metrics::configuration_letter(m->configuration)) + " | " +
               format_fixed(m->robustness.mean, 3) + " | " + format_fixed(m->complexity.mean, 1) +
               " | " + format_fixed(m->step_count.mean, 1) + " | " +
               format_fixed(m->phrase_sensitivity.mean, 3) + " |\n";
    }
    return out;
}

}  // namespace mathlens::report

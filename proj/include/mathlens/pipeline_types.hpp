#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mathlens/flow.hpp"
#include "mathlens/metrics.hpp"
#include "mathlens/report.hpp"

namespace mathlens::pipeline {

struct QuestionOutcome {
    std::string question_id;
    bool ok = false;
    std::string error;
    std::vector<metrics::AblationTrial> trials;
    metrics::QuestionMetrics question_metrics;
    report::AnalysisReport analysis;
    flow::ReasoningFlow reasoning;
};

struct ExamRunOutcome {
    metrics::Configuration configuration = metrics::Configuration::baseline;
    std::vector<QuestionOutcome> questions;
    std::size_t succeeded = 0;
    bool has_metrics = false;
    metrics::ExamMetrics exam_metrics;
};

struct CompareOutcome {
    std::vector<ExamRunOutcome> runs;
    std::vector<std::string> configuration_errors;  // "<config>: <reason>"
    std::vector<metrics::ExamMetrics> table_rows;
};

struct IngestStats {
    std::size_t docs = 0;
    std::size_t segments = 0;
    std::size_t chunks = 0;
    std::string index_path;
};

}  // namespace mathlens::pipeline

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mathlens/exam.hpp"
#include "mathlens/gateway.hpp"
#include "mathlens/lexicon.hpp"
#include "mathlens/metrics.hpp"
#include "mathlens/pipeline_types.hpp"
#include "mathlens/report.hpp"
#include "mathlens/retrieval.hpp"
#include "mathlens/run_config.hpp"

namespace mathlens::pipeline {

// Wires configuration, lexicons, the gateway and retrieval into the
// decompose -> ablate -> query -> score -> annotate -> report pipeline.
class Orchestrator {
public:
    explicit Orchestrator(RunConfig cfg);

    const RunConfig& config() const { return cfg_; }
    const std::string& run_timestamp() const { return timestamp_; }

    // Full pipeline for one prompt; throws on question-level failure.
    QuestionOutcome run_question(const std::string& question_id, const std::string& prompt,
                                 metrics::Configuration configuration);

    // Per-question failures are recorded, aggregation covers the successes.
    ExamRunOutcome run_exam(const exam::ExamFile& exam_file,
                            metrics::Configuration configuration,
                            const std::filesystem::path& out_dir);

    // Runs baseline, rag and contextual; configuration-level errors isolate.
    CompareOutcome run_compare(const exam::ExamFile& exam_file,
                               const std::filesystem::path& out_dir);

    // corpus dir -> filter -> chunk -> embed -> index snapshot.
    IngestStats run_ingest();

    // Flow extraction over a saved response, no model queries.
    QuestionOutcome run_flow_file(const std::filesystem::path& response_path,
                                  const std::filesystem::path& out_dir);

    void write_question_outputs(const std::filesystem::path& out_dir,
                                const QuestionOutcome& outcome) const;
    void write_exam_outputs(const std::filesystem::path& out_dir, const exam::ExamFile& exam_file,
                            const ExamRunOutcome& outcome) const;

private:
    struct QuestionContext {
        std::vector<retrieval::ContextItem> items;
    };

    QuestionContext context_for(const std::string& prompt, metrics::Configuration configuration);
    const retrieval::VectorIndex& index();
    std::unique_ptr<retrieval::Embedder> make_embedder() const;

    RunConfig cfg_;
    std::string timestamp_;
    Lexicon operations_;
    Lexicon concepts_;
    Lexicon instructions_;
    std::optional<gateway::ReplayCache> cache_;
    std::optional<gateway::Gateway> gateway_;
    std::optional<retrieval::VectorIndex> index_;
};

}  // namespace mathlens::pipeline

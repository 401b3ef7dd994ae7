#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mathlens/errors.hpp"
#include "mathlens/exam.hpp"
#include "mathlens/pipeline.hpp"
#include "mathlens/run_config.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitConfigError = 2;

struct GlobalOptions {
    std::string config_path;
    bool replay_only = false;
    double alpha = -1.0;  // <0 means "not set on the command line"
    std::string out_dir;
    int parallelism = 0;
    int question_parallelism = 0;
    std::string timestamp;
};

mathlens::RunConfig effective_config(const GlobalOptions& opts) {
    mathlens::RunConfig cfg;
    if (!opts.config_path.empty()) cfg = mathlens::load_run_config(opts.config_path);
    if (opts.replay_only) cfg.replay_only = true;
    if (opts.alpha >= 0.0) cfg.alpha = opts.alpha;
    if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
    if (opts.parallelism > 0) cfg.endpoint.parallelism = opts.parallelism;
    if (opts.question_parallelism > 0) cfg.question_parallelism = opts.question_parallelism;
    if (!opts.timestamp.empty()) cfg.timestamp_override = opts.timestamp;
    cfg.validate();
    return cfg;
}

int exit_code_for(const mathlens::pipeline::ExamRunOutcome& outcome) {
    if (outcome.succeeded == outcome.questions.size()) return kExitOk;
    return kExitPartial;
}

mathlens::metrics::Configuration parse_configuration(const std::string& name) {
    if (name == "baseline") return mathlens::metrics::Configuration::baseline;
    if (name == "rag") return mathlens::metrics::Configuration::rag;
    if (name == "contextual") return mathlens::metrics::Configuration::contextual;
    throw mathlens::ConfigError("unknown configuration '" + name +
                                "' (expected baseline|rag|contextual)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interpretability analysis for LLM-generated calculus solutions"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    GlobalOptions opts;
    app.add_option("--config", opts.config_path, "Run configuration file (key = value)");
    app.add_flag("--replay-only", opts.replay_only, "Serve every completion from the replay cache");
    app.add_option("--alpha", opts.alpha, "Divergence weight in [0,1]")
        ->check(CLI::Range(0.0, 1.0));
    app.add_option("--out", opts.out_dir, "Output directory");
    app.add_option("--parallelism", opts.parallelism, "Concurrent trial requests");
    app.add_option("--question-parallelism", opts.question_parallelism,
                   "Concurrent questions within an exam (default 1)");
    app.add_option("--timestamp", opts.timestamp,
                   "Inject a fixed report timestamp (YYYYMMDD_HHMMSS)");

    // analyze: one question, by id or inline.
    auto* analyze = app.add_subcommand("analyze", "Analyze a single question");
    std::string question_id, inline_prompt, configuration_name = "baseline";
    analyze->add_option("--question-id", question_id, "Question id from the configured exam file");
    analyze->add_option("--prompt", inline_prompt, "Inline question prompt");
    analyze->add_option("--configuration", configuration_name, "baseline|rag|contextual");

    auto* exam_cmd = app.add_subcommand("exam", "Analyze a whole exam file");
    std::string exam_path;
    std::string exam_configuration = "baseline";
    exam_cmd->add_option("exam_file", exam_path, "Exam file")->required();
    exam_cmd->add_option("--configuration", exam_configuration, "baseline|rag|contextual");

    auto* compare_cmd =
        app.add_subcommand("compare", "Run baseline, rag and contextual and merge the table");
    std::string compare_path;
    compare_cmd->add_option("exam_file", compare_path, "Exam file")->required();

    auto* ingest_cmd = app.add_subcommand("ingest", "Build the vector index from a corpus dir");
    std::string corpus_dir;
    ingest_cmd->add_option("corpus_dir", corpus_dir, "Directory of UTF-8 .txt files");

    auto* flow_cmd =
        app.add_subcommand("flow", "Extract the reasoning flow of a saved response");
    std::string response_path;
    flow_cmd->add_option("response_file", response_path, "Saved solution text")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        mathlens::RunConfig cfg = effective_config(opts);
        namespace pl = mathlens::pipeline;

        if (analyze->parsed()) {
            std::string prompt = inline_prompt;
            std::string qid = question_id.empty() ? "inline" : question_id;
            if (prompt.empty()) {
                if (question_id.empty())
                    throw mathlens::ConfigError("analyze needs --prompt or --question-id");
                if (cfg.exam_path.empty())
                    throw mathlens::ConfigError("--question-id needs exam.path in the config");
                mathlens::exam::ExamFile exam_file = mathlens::exam::load_exam(cfg.exam_path);
                for (const mathlens::exam::Question& q : exam_file.questions)
                    if (q.question_id == question_id) prompt = q.prompt;
                if (prompt.empty())
                    throw mathlens::ConfigError("question id '" + question_id +
                                                "' not found in " + cfg.exam_path);
            }
            pl::Orchestrator orchestrator(cfg);
            pl::QuestionOutcome outcome =
                orchestrator.run_question(qid, prompt, parse_configuration(configuration_name));
            orchestrator.write_question_outputs(cfg.out_dir, outcome);
            std::cout << "analyzed '" << qid << "': " << outcome.question_metrics.impacts.size()
                      << " ranked impacts, " << outcome.question_metrics.step_count
                      << " reasoning steps\n";
            std::cout << "reports under " << cfg.out_dir << "/questions/" << qid << ".{md,json}\n";
            return kExitOk;
        }

        if (exam_cmd->parsed()) {
            mathlens::exam::ExamFile exam_file = mathlens::exam::load_exam(exam_path);
            pl::Orchestrator orchestrator(cfg);
            pl::ExamRunOutcome outcome = orchestrator.run_exam(
                exam_file, parse_configuration(exam_configuration), cfg.out_dir);
            std::cout << "exam '" << exam_file.exam_id << "': " << outcome.succeeded << "/"
                      << outcome.questions.size() << " questions analyzed\n";
            for (const pl::QuestionOutcome& q : outcome.questions)
                if (!q.ok) std::cerr << "  failed " << q.question_id << ": " << q.error << "\n";
            return exit_code_for(outcome);
        }

        if (compare_cmd->parsed()) {
            mathlens::exam::ExamFile exam_file = mathlens::exam::load_exam(compare_path);
            pl::Orchestrator orchestrator(cfg);
            pl::CompareOutcome outcome = orchestrator.run_compare(exam_file, cfg.out_dir);
            std::cout << "compare '" << exam_file.exam_id << "': " << outcome.table_rows.size()
                      << " table rows\n";
            for (const std::string& error : outcome.configuration_errors)
                std::cerr << "  configuration failed: " << error << "\n";
            bool partial = !outcome.configuration_errors.empty();
            for (const pl::ExamRunOutcome& run : outcome.runs)
                if (run.succeeded != run.questions.size()) partial = true;
            return partial ? kExitPartial : kExitOk;
        }

        if (ingest_cmd->parsed()) {
            if (!corpus_dir.empty()) cfg.corpus_dir = corpus_dir;
            cfg.validate();
            pl::Orchestrator orchestrator(cfg);
            pl::IngestStats stats = orchestrator.run_ingest();
            std::cout << "ingested " << stats.docs << " docs, " << stats.segments
                      << " keyword-matched segments, " << stats.chunks << " chunks\n";
            std::cout << "index snapshot: " << stats.index_path << "\n";
            return kExitOk;
        }

        if (flow_cmd->parsed()) {
            pl::Orchestrator orchestrator(cfg);
            pl::QuestionOutcome outcome = orchestrator.run_flow_file(response_path, cfg.out_dir);
            std::cout << "flow '" << outcome.question_id
                      << "': " << outcome.reasoning.summary.total_steps << " steps, score "
                      << outcome.reasoning.summary.reasoning_complexity_score << "\n";
            return kExitOk;
        }
    } catch (const mathlens::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const mathlens::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPartial;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
    return kExitOk;
}

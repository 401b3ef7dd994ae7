#include "mathlens/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include <json.hpp>

#include "mathlens/ablation.hpp"
#include "mathlens/divergence.hpp"
#include "mathlens/errors.hpp"
#include "mathlens/text.hpp"

namespace mathlens::pipeline {

namespace fs = std::filesystem;

Orchestrator::Orchestrator(RunConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    timestamp_ = cfg_.timestamp_override.empty() ? utc_timestamp() : cfg_.timestamp_override;

    operations_ = cfg_.operations_lexicon_path.empty()
                      ? default_operation_lexicon()
                      : Lexicon::load(cfg_.operations_lexicon_path);
    concepts_ = cfg_.concepts_lexicon_path.empty() ? default_concept_lexicon()
                                                   : Lexicon::load(cfg_.concepts_lexicon_path);
    instructions_ = cfg_.instructions_lexicon_path.empty()
                        ? default_instruction_lexicon()
                        : Lexicon::load(cfg_.instructions_lexicon_path);

    if (cfg_.replay_only && cfg_.replay_dir.empty())
        throw ConfigError("replay-only mode requires replay.dir");
    if (!cfg_.replay_dir.empty()) cache_.emplace(cfg_.replay_dir);
    gateway_.emplace(cfg_.endpoint, cache_ ? &*cache_ : nullptr, cfg_.replay_only);
}

std::unique_ptr<retrieval::Embedder> Orchestrator::make_embedder() const {
    if (cfg_.embedding_fallback)
        return std::make_unique<retrieval::HashedBowEmbedder>(cfg_.embedding_dims);
    if (cfg_.embedding_url.empty())
        throw ConfigError("embedding.url is required when embedding.fallback is off");
    return std::make_unique<retrieval::HttpEmbedder>(cfg_.embedding_url, cfg_.embedding_model,
                                                     cfg_.embedding_dims, "/v1/embeddings",
                                                     cfg_.embedding_timeout_ms);
}

const retrieval::VectorIndex& Orchestrator::index() {
    if (!index_) {
        if (cfg_.index_path.empty() || !fs::exists(cfg_.index_path))
            throw ConfigError("rag configuration needs retrieval.index_path "
                              "(run `ingest` over the corpus first)");
        nlohmann::json snapshot = nlohmann::json::parse(text::read_file(cfg_.index_path));
        index_ = retrieval::VectorIndex::from_json(snapshot);
        if (index_->size() == 0) throw EmptyIndex("index snapshot holds no chunks");
    }
    return *index_;
}

Orchestrator::QuestionContext Orchestrator::context_for(const std::string& prompt,
                                                        metrics::Configuration configuration) {
    QuestionContext ctx;
    if (configuration == metrics::Configuration::baseline) return ctx;

    if (configuration == metrics::Configuration::rag) {
        const retrieval::VectorIndex& idx = index();
        retrieval::EmbeddingVector query = make_embedder()->embed(prompt);
        for (const retrieval::ScoredChunk& scored :
             idx.query_topk(query, cfg_.retrieval.top_k)) {
            retrieval::ContextItem item;
            item.ref = "[" + scored.chunk->doc_id + ":" + std::to_string(scored.chunk->chunk_id) +
                       "]";
            item.text = scored.chunk->text;
            ctx.items.push_back(std::move(item));
        }
        return ctx;
    }

    // Contextual retrieval: curated documents inlined in manifest order.
    if (cfg_.manifest_path.empty())
        throw ConfigError("contextual configuration needs contextual.manifest");
    fs::path manifest_dir = fs::path(cfg_.manifest_path).parent_path();
    for (const std::string& raw_line : text::split(text::read_file(cfg_.manifest_path), '\n')) {
        std::string_view line = text::trim(raw_line);
        if (line.empty() || line.front() == '#') continue;
        fs::path doc_path{std::string(line)};
        if (doc_path.is_relative()) doc_path = manifest_dir / doc_path;
        if (!fs::exists(doc_path))
            throw ConfigError("manifest references a missing document: " + doc_path.string());
        retrieval::ContextItem item;
        item.ref = "[" + doc_path.stem().string() + "]";
        item.text = std::string(text::trim(text::read_file(doc_path.string())));
        ctx.items.push_back(std::move(item));
    }
    return ctx;
}

QuestionOutcome Orchestrator::run_question(const std::string& question_id,
                                           const std::string& prompt,
                                           metrics::Configuration configuration) {
    QuestionOutcome outcome;
    outcome.question_id = question_id;

    QuestionContext ctx = context_for(prompt, configuration);
    std::string system_text = gateway::build_system_prompt();

    auto assemble = [&](const std::string& question) {
        if (configuration == metrics::Configuration::baseline)
            return retrieval::assemble_baseline(question, system_text);
        return retrieval::assemble_with_context(question, ctx.items, system_text,
                                                cfg_.max_context_chars);
    };

    retrieval::AssembledPrompt original_prompt = assemble(prompt);

    std::vector<ablate::PromptElement> elements = ablate::decompose_prompt(prompt, instructions_);
    ablate::AblationSet ablations = ablate::generate_ablations(prompt, elements);
    if (ablations.ablations.empty())
        throw NoTrials("question '" + question_id + "' produced no ablation trials");

    std::vector<gateway::CompletionRequest> requests;
    requests.reserve(ablations.ablations.size() + 1);
    auto make_request = [&](const retrieval::AssembledPrompt& assembled) {
        gateway::CompletionRequest request;
        request.model_name = cfg_.endpoint.model;
        request.system_text = assembled.system_text;
        request.user_text = assembled.user_text;
        request.temperature = cfg_.endpoint.temperature;
        request.max_tokens = cfg_.endpoint.max_tokens;
        return request;
    };
    requests.push_back(make_request(original_prompt));
    bool truncated = original_prompt.truncated;
    for (const ablate::AblatedPrompt& ablated : ablations.ablations) {
        retrieval::AssembledPrompt assembled = assemble(ablated.text);
        truncated = truncated || assembled.truncated;
        requests.push_back(make_request(assembled));
    }

    std::vector<gateway::TrialOutcome> responses =
        gateway_->run_trials(requests, cfg_.endpoint.parallelism);

    if (!responses[0].ok())
        throw Error("question '" + question_id + "': original prompt failed: " +
                    responses[0].error);
    const std::string& original_response = responses[0].response->text;

    std::vector<std::size_t> kept;
    std::vector<std::string> ablated_responses;
    for (std::size_t i = 0; i < ablations.ablations.size(); ++i) {
        if (responses[i + 1].ok()) {
            kept.push_back(i);
            ablated_responses.push_back(responses[i + 1].response->text);
        }
    }
    if (kept.empty())
        throw NoTrials("question '" + question_id + "': every ablation trial failed");

    std::vector<divergence::DivergenceScore> scores =
        divergence::score_trials(original_response, ablated_responses, cfg_.alpha);

    std::vector<metrics::AblationTrial> trials;
    trials.reserve(kept.size());
    for (std::size_t t = 0; t < kept.size(); ++t) {
        const ablate::AblatedPrompt& ablated = ablations.ablations[kept[t]];
        trials.push_back(metrics::AblationTrial{ablated.element, ablated.text,
                                                ablated_responses[t], scores[t]});
    }

    outcome.trials = std::move(trials);
    outcome.reasoning =
        flow::annotate(original_response, operations_, concepts_, cfg_.complexity);
    outcome.question_metrics =
        metrics::question_metrics(outcome.trials, outcome.reasoning, question_id);

    report::AnalysisReport& analysis = outcome.analysis;
    analysis.timestamp = timestamp_;
    analysis.model_name = cfg_.endpoint.model;
    analysis.question_text = prompt;
    analysis.impacts = outcome.question_metrics.impacts;
    analysis.flow_summary = outcome.reasoning.summary;
    for (const flow::AnnotatedStep& step : outcome.reasoning.steps) {
        report::DetailedStep detailed;
        detailed.text = step.raw.text;
        for (const flow::OperationTag& op : step.operations)
            detailed.operations.emplace_back(flow::operation_name(op.name));
        for (const flow::ConceptTag& tag : step.concepts)
            detailed.concepts.push_back(tag.name);
        analysis.detailed_steps.push_back(std::move(detailed));
    }
    analysis.run_metadata.configuration = configuration;
    analysis.run_metadata.alpha = cfg_.alpha;
    analysis.run_metadata.temperature = cfg_.endpoint.temperature;
    analysis.run_metadata.max_tokens = cfg_.endpoint.max_tokens;
    analysis.run_metadata.context_truncated = truncated;

    outcome.ok = true;
    return outcome;
}

ExamRunOutcome Orchestrator::run_exam(const exam::ExamFile& exam_file,
                                      metrics::Configuration configuration,
                                      const fs::path& out_dir) {
    ExamRunOutcome outcome;
    outcome.configuration = configuration;
    outcome.questions.resize(exam_file.questions.size());

    if (configuration == metrics::Configuration::rag) index();  // load before workers start

    auto run_one = [&](std::size_t i) {
        const exam::Question& q = exam_file.questions[i];
        try {
            outcome.questions[i] = run_question(q.question_id, q.prompt, configuration);
        } catch (const std::exception& e) {
            outcome.questions[i] = QuestionOutcome{};
            outcome.questions[i].question_id = q.question_id;
            outcome.questions[i].error = e.what();
        }
    };

    const std::size_t n = exam_file.questions.size();
    if (cfg_.question_parallelism <= 1) {
        for (std::size_t i = 0; i < n; ++i) run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::size_t workers = std::min<std::size_t>(
            static_cast<std::size_t>(cfg_.question_parallelism), n);
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                while (true) {
                    std::size_t i = next.fetch_add(1);
                    if (i >= n) return;
                    run_one(i);
                }
            });
        for (std::thread& t : pool) t.join();
    }

    std::vector<metrics::QuestionMetrics> succeeded;
    for (const QuestionOutcome& q : outcome.questions)
        if (q.ok) succeeded.push_back(q.question_metrics);
    outcome.succeeded = succeeded.size();
    if (!succeeded.empty()) {
        outcome.exam_metrics = metrics::exam_aggregate(succeeded, exam_file.exam_id,
                                                       configuration, exam_file.course);
        outcome.has_metrics = true;
    }

    write_exam_outputs(out_dir, exam_file, outcome);
    return outcome;
}

CompareOutcome Orchestrator::run_compare(const exam::ExamFile& exam_file,
                                         const fs::path& out_dir) {
    CompareOutcome compare;
    for (metrics::Configuration configuration :
         {metrics::Configuration::baseline, metrics::Configuration::rag,
          metrics::Configuration::contextual}) {
        std::string name(metrics::configuration_name(configuration));
        try {
            ExamRunOutcome run = run_exam(exam_file, configuration, out_dir / name);
            if (run.has_metrics) compare.table_rows.push_back(run.exam_metrics);
            compare.runs.push_back(std::move(run));
        } catch (const std::exception& e) {
            compare.configuration_errors.push_back(name + ": " + e.what());
        }
    }
    text::write_file_atomic((out_dir / "exam_metrics.csv").string(),
                            report::export_exam_table(compare.table_rows,
                                                      report::TableFormat::csv));
    text::write_file_atomic((out_dir / "exam_metrics.md").string(),
                            report::export_exam_table(compare.table_rows,
                                                      report::TableFormat::markdown));
    return compare;
}

IngestStats Orchestrator::run_ingest() {
    if (cfg_.corpus_dir.empty()) throw ConfigError("ingest needs corpus.dir");

    std::vector<retrieval::CorpusDoc> docs;
    std::vector<fs::path> files;
    for (const fs::directory_entry& entry : fs::directory_iterator(cfg_.corpus_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".txt")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const fs::path& file : files)
        docs.push_back(retrieval::CorpusDoc{file.stem().string(),
                                            text::read_file(file.string())});
    if (docs.empty()) throw EmptyCorpus("no .txt documents under " + cfg_.corpus_dir);

    std::vector<retrieval::CorpusSegment> segments =
        retrieval::filter_segments(docs, cfg_.retrieval.keywords);

    std::vector<retrieval::CorpusChunk> chunks;
    for (const retrieval::CorpusSegment& segment : segments)
        for (retrieval::CorpusChunk& chunk :
             retrieval::chunk_segment(segment, cfg_.retrieval.chunk_size, cfg_.retrieval.overlap)) {
            chunk.chunk_id = chunks.size();
            chunks.push_back(std::move(chunk));
        }

    std::vector<std::string> texts;
    texts.reserve(chunks.size());
    for (const retrieval::CorpusChunk& chunk : chunks) texts.push_back(chunk.text);
    std::unique_ptr<retrieval::Embedder> embedder = make_embedder();
    std::vector<retrieval::EmbeddingVector> vectors = retrieval::embed_batch(texts, *embedder);

    retrieval::VectorIndex built;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        chunks[i].vector = std::move(vectors[i]);
        built.add(std::move(chunks[i]));
    }

    IngestStats stats;
    stats.docs = docs.size();
    stats.segments = segments.size();
    stats.chunks = built.size();
    stats.index_path = cfg_.index_path.empty() ? (fs::path(cfg_.out_dir) / "index.json").string()
                                               : cfg_.index_path;
    text::write_file_atomic(stats.index_path, built.to_json(cfg_.retrieval).dump(2) + "\n");
    index_ = std::move(built);
    return stats;
}

QuestionOutcome Orchestrator::run_flow_file(const fs::path& response_path,
                                            const fs::path& out_dir) {
    QuestionOutcome outcome;
    outcome.question_id = response_path.stem().string();
    outcome.reasoning = flow::annotate(text::read_file(response_path.string()), operations_,
                                       concepts_, cfg_.complexity);

    report::AnalysisReport& analysis = outcome.analysis;
    analysis.timestamp = timestamp_;
    analysis.model_name = cfg_.endpoint.model;
    analysis.question_text = "(flow extraction of " + response_path.filename().string() + ")";
    analysis.flow_summary = outcome.reasoning.summary;
    for (const flow::AnnotatedStep& step : outcome.reasoning.steps) {
        report::DetailedStep detailed;
        detailed.text = step.raw.text;
        for (const flow::OperationTag& op : step.operations)
            detailed.operations.emplace_back(flow::operation_name(op.name));
        for (const flow::ConceptTag& tag : step.concepts)
            detailed.concepts.push_back(tag.name);
        analysis.detailed_steps.push_back(std::move(detailed));
    }
    analysis.run_metadata.alpha = cfg_.alpha;
    analysis.run_metadata.temperature = cfg_.endpoint.temperature;
    outcome.ok = true;

    write_question_outputs(out_dir, outcome);
    return outcome;
}

void Orchestrator::write_question_outputs(const fs::path& out_dir,
                                          const QuestionOutcome& outcome) const {
    const std::string& qid = outcome.question_id;
    text::write_file_atomic(
        (out_dir / "questions" / (qid + ".md")).string(),
        report::render_question_report(outcome.analysis, report::ReportFormat::markdown));
    text::write_file_atomic(
        (out_dir / "questions" / (qid + ".json")).string(),
        report::render_question_report(outcome.analysis, report::ReportFormat::json));
    text::write_file_atomic((out_dir / "graphs" / (qid + ".dot")).string(),
                            report::export_graph_dot(outcome.reasoning));
}

void Orchestrator::write_exam_outputs(const fs::path& out_dir, const exam::ExamFile& exam_file,
                                      const ExamRunOutcome& outcome) const {
    for (const QuestionOutcome& q : outcome.questions)
        if (q.ok) write_question_outputs(out_dir, q);

    std::vector<metrics::ExamMetrics> rows;
    if (outcome.has_metrics) rows.push_back(outcome.exam_metrics);
    text::write_file_atomic((out_dir / "exam_metrics.csv").string(),
                            report::export_exam_table(rows, report::TableFormat::csv));

    nlohmann::ordered_json meta;
    meta["exam"] = exam_file.exam_id;
    meta["course"] = exam_file.course;
    meta["configuration"] = std::string(metrics::configuration_name(outcome.configuration));
    meta["model"] = cfg_.endpoint.model;
    meta["temperature"] = cfg_.endpoint.temperature;
    if (cfg_.endpoint.max_tokens)
        meta["max_tokens"] = *cfg_.endpoint.max_tokens;
    else
        meta["max_tokens"] = nullptr;
    meta["alpha"] = cfg_.alpha;
    meta["timestamp"] = timestamp_;
    meta["replay_only"] = cfg_.replay_only;
    meta["questions_total"] = exam_file.questions.size();
    meta["questions_succeeded"] = outcome.succeeded;

    nlohmann::ordered_json failures = nlohmann::ordered_json::array();
    for (const QuestionOutcome& q : outcome.questions)
        if (!q.ok) failures.push_back({{"question_id", q.question_id}, {"error", q.error}});
    meta["failures"] = std::move(failures);

    nlohmann::ordered_json truncated = nlohmann::ordered_json::array();
    for (const QuestionOutcome& q : outcome.questions)
        if (q.ok && q.analysis.run_metadata.context_truncated) truncated.push_back(q.question_id);
    meta["context_truncated"] = std::move(truncated);

    if (outcome.has_metrics) {
        auto stat_json = [](const metrics::MetricStat& stat) {
            return nlohmann::ordered_json{
                {"mean", stat.mean}, {"std_dev", stat.std_dev}, {"n", stat.n}};
        };
        meta["metrics"] = {
            {"robustness", stat_json(outcome.exam_metrics.robustness)},
            {"complexity", stat_json(outcome.exam_metrics.complexity)},
            {"step_count", stat_json(outcome.exam_metrics.step_count)},
            {"phrase_sensitivity", stat_json(outcome.exam_metrics.phrase_sensitivity)},
        };
    } else {
        meta["metrics"] = nullptr;
    }

    meta["retrieval"] = {
        {"mode", std::string(metrics::configuration_name(outcome.configuration))},
        {"chunk_size", cfg_.retrieval.chunk_size},
        {"overlap", cfg_.retrieval.overlap},
        {"top_k", cfg_.retrieval.top_k},
        {"max_context_chars", cfg_.max_context_chars},
    };

    report::RubricSchema rubric = report::RubricSchema::standard();
    rubric.validate();
    nlohmann::ordered_json criteria = nlohmann::ordered_json::array();
    for (const report::RubricSchema::Criterion& c : rubric.criteria)
        criteria.push_back(
            {{"name", c.name}, {"weight", c.weight}, {"description", c.description}});
    meta["rubric"] = {{"criteria", std::move(criteria)}};

    text::write_file_atomic((out_dir / "run_metadata.json").string(), meta.dump(2) + "\n");
}

}  // namespace mathlens::pipeline

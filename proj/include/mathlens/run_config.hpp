#pragma once

#include <string>
#include <string_view>

#include "mathlens/flow.hpp"
#include "mathlens/gateway.hpp"
#include "mathlens/retrieval.hpp"

namespace mathlens {

// Everything a run needs, loaded from a key = value config file. Paths named
// in the config must exist at load time; violations raise ConfigError.
struct RunConfig {
    gateway::EndpointConfig endpoint;

    // embedding.* keys; when fallback is on the offline hashed-BoW embedder
    // is used and the endpoint fields are ignored.
    std::string embedding_url;
    std::string embedding_model = "nomic-embed-text";
    std::size_t embedding_dims = 256;
    int embedding_timeout_ms = 30000;
    bool embedding_fallback = true;

    retrieval::RetrievalConfig retrieval;
    std::size_t max_context_chars = 8000;

    double alpha = 0.5;
    flow::ComplexityThresholds complexity;  // complexity.low_max / complexity.medium_max

    std::string operations_lexicon_path;    // empty -> built-in default
    std::string concepts_lexicon_path;      // empty -> built-in default
    std::string instructions_lexicon_path;  // empty -> built-in default

    std::string exam_path;
    std::string corpus_dir;
    std::string index_path;
    std::string manifest_path;
    std::string out_dir = "out";
    std::string replay_dir;
    bool replay_only = false;

    std::string timestamp_override;  // YYYYMMDD_HHMMSS; empty -> wall clock
    int question_parallelism = 1;

    void validate() const;  // throws ConfigError
};

RunConfig parse_run_config(std::string_view text, const std::string& base_dir = {});
RunConfig load_run_config(const std::string& path);

// Current UTC time as YYYYMMDD_HHMMSS.
std::string utc_timestamp();

}  // namespace mathlens

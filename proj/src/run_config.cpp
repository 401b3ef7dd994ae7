#include "mathlens/run_config.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <map>

#include "mathlens/errors.hpp"
#include "mathlens/text.hpp"

namespace mathlens {

namespace {

bool parse_bool(const std::string& key, const std::string& value) {
    std::string v = text::to_lower(value);
    if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
    if (v == "false" || v == "no" || v == "0" || v == "off") return false;
    throw ConfigError("config key '" + key + "' expects a boolean, got '" + value + "'");
}

long parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t consumed = 0;
        long parsed = std::stol(value, &consumed);
        if (consumed != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' expects an integer, got '" + value + "'");
    }
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t consumed = 0;
        double parsed = std::stod(value, &consumed);
        if (consumed != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' expects a number, got '" + value + "'");
    }
}

// Relative paths in a config file resolve against the file's directory.
std::string resolve_path(const std::string& base_dir, const std::string& value) {
    if (value.empty() || base_dir.empty()) return value;
    std::filesystem::path p(value);
    if (p.is_absolute()) return value;
    return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

}  // namespace

RunConfig parse_run_config(std::string_view input, const std::string& base_dir) {
    RunConfig cfg;
    std::map<std::string, std::string> kv;
    for (const std::string& raw_line : text::split(input, '\n')) {
        std::string_view line = text::trim(raw_line);
        if (line.empty() || line.front() == '#') continue;
        std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config line is not 'key = value': " + std::string(line));
        std::string key(text::trim(line.substr(0, eq)));
        std::string value(text::trim(line.substr(eq + 1)));
        kv[key] = value;
    }

    for (const auto& [key, value] : kv) {
        if (key == "endpoint.url") cfg.endpoint.url = value;
        else if (key == "endpoint.path") cfg.endpoint.path = value;
        else if (key == "endpoint.model") cfg.endpoint.model = value;
        else if (key == "endpoint.temperature") cfg.endpoint.temperature = parse_double(key, value);
        else if (key == "endpoint.parallelism")
            cfg.endpoint.parallelism = static_cast<int>(parse_int(key, value));
        else if (key == "endpoint.timeout_ms")
            cfg.endpoint.timeout_ms = static_cast<int>(parse_int(key, value));
        else if (key == "endpoint.auth_token_env") cfg.endpoint.auth_token_env = value;
        else if (key == "endpoint.retry_attempts")
            cfg.endpoint.retry_attempts = static_cast<int>(parse_int(key, value));
        else if (key == "endpoint.max_tokens")
            cfg.endpoint.max_tokens = static_cast<int>(parse_int(key, value));
        else if (key == "embedding.url") cfg.embedding_url = value;
        else if (key == "embedding.model") cfg.embedding_model = value;
        else if (key == "embedding.dims")
            cfg.embedding_dims = static_cast<std::size_t>(parse_int(key, value));
        else if (key == "embedding.timeout_ms")
            cfg.embedding_timeout_ms = static_cast<int>(parse_int(key, value));
        else if (key == "embedding.fallback") cfg.embedding_fallback = parse_bool(key, value);
        else if (key == "retrieval.chunk_size")
            cfg.retrieval.chunk_size = static_cast<std::size_t>(parse_int(key, value));
        else if (key == "retrieval.overlap")
            cfg.retrieval.overlap = static_cast<std::size_t>(parse_int(key, value));
        else if (key == "retrieval.top_k")
            cfg.retrieval.top_k = static_cast<std::size_t>(parse_int(key, value));
        else if (key == "retrieval.keywords") {
            cfg.retrieval.keywords.clear();
            for (const std::string& piece : text::split(value, ',')) {
                std::string keyword(text::trim(piece));
                if (!keyword.empty()) cfg.retrieval.keywords.push_back(std::move(keyword));
            }
        } else if (key == "retrieval.mode") {
            if (value == "rag") cfg.retrieval.mode = retrieval::RetrievalMode::rag;
            else if (value == "contextual") cfg.retrieval.mode = retrieval::RetrievalMode::contextual;
            else throw ConfigError("retrieval.mode must be rag or contextual, got '" + value + "'");
        } else if (key == "retrieval.max_context_chars")
            cfg.max_context_chars = static_cast<std::size_t>(parse_int(key, value));
        else if (key == "retrieval.index_path") cfg.index_path = resolve_path(base_dir, value);
        else if (key == "alpha") cfg.alpha = parse_double(key, value);
        else if (key == "complexity.low_max")
            cfg.complexity.low_max = static_cast<int>(parse_int(key, value));
        else if (key == "complexity.medium_max")
            cfg.complexity.medium_max = static_cast<int>(parse_int(key, value));
        else if (key == "lexicons.operations")
            cfg.operations_lexicon_path = resolve_path(base_dir, value);
        else if (key == "lexicons.concepts")
            cfg.concepts_lexicon_path = resolve_path(base_dir, value);
        else if (key == "lexicons.instructions")
            cfg.instructions_lexicon_path = resolve_path(base_dir, value);
        else if (key == "exam.path") cfg.exam_path = resolve_path(base_dir, value);
        else if (key == "corpus.dir") cfg.corpus_dir = resolve_path(base_dir, value);
        else if (key == "contextual.manifest") cfg.manifest_path = resolve_path(base_dir, value);
        else if (key == "run.out_dir") cfg.out_dir = resolve_path(base_dir, value);
        else if (key == "run.timestamp") cfg.timestamp_override = value;
        else if (key == "run.question_parallelism")
            cfg.question_parallelism = static_cast<int>(parse_int(key, value));
        else if (key == "replay.dir") cfg.replay_dir = resolve_path(base_dir, value);
        else if (key == "replay.only") cfg.replay_only = parse_bool(key, value);
        else throw ConfigError("unknown config key '" + key + "'");
    }

    cfg.validate();
    return cfg;
}

void RunConfig::validate() const {
    if (alpha < 0.0 || alpha > 1.0) throw ConfigError("alpha must lie in [0,1]");
    if (complexity.low_max < 0 || complexity.medium_max <= complexity.low_max)
        throw ConfigError("complexity thresholds need 0 <= low_max < medium_max");
    if (retrieval.chunk_size == 0 || retrieval.overlap >= retrieval.chunk_size)
        throw ConfigError("retrieval requires 0 <= overlap < chunk_size");
    if (retrieval.top_k == 0) throw ConfigError("retrieval.top_k must be >= 1");
    if (endpoint.parallelism < 1) throw ConfigError("endpoint.parallelism must be >= 1");
    if (question_parallelism < 1) throw ConfigError("run.question_parallelism must be >= 1");

    auto must_exist = [](const std::string& key, const std::string& path) {
        if (!path.empty() && !std::filesystem::exists(path))
            throw ConfigError("config key '" + key + "' points to a missing path: " + path);
    };
    must_exist("lexicons.operations", operations_lexicon_path);
    must_exist("lexicons.concepts", concepts_lexicon_path);
    must_exist("lexicons.instructions", instructions_lexicon_path);
    must_exist("exam.path", exam_path);
    must_exist("corpus.dir", corpus_dir);
    must_exist("contextual.manifest", manifest_path);
}

RunConfig load_run_config(const std::string& path) {
    std::string base_dir = std::filesystem::path(path).parent_path().string();
    return parse_run_config(text::read_file(path), base_dir);
}

std::string utc_timestamp() {
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d%02d%02d_%02d%02d%02d", tm_utc.tm_year + 1900,
                  tm_utc.tm_mon + 1, tm_utc.tm_mday, tm_utc.tm_hour, tm_utc.tm_min,
                  tm_utc.tm_sec);
    return buf;
}

}  // namespace mathlens

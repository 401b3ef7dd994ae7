#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mathlens::gateway {

struct SystemPromptOptions;
std::string build_system_prompt(const SystemPromptOptions& options);
std::string build_system_prompt();

struct CompletionRequest {
    std::string model_name;
    std::string system_text = build_system_prompt();
    std::string user_text;  // must be non-empty when sent
    double temperature = 0.0;
    std::optional<int> max_tokens;
};

enum class ResponseSource { live, replay };

struct CompletionResponse {
    std::string text;
    std::int64_t latency_ms = 0;
    ResponseSource source = ResponseSource::live;
};

struct EndpointConfig {
    std::string url;                              // e.g. http://localhost:11434
    std::string path = "/v1/chat/completions";
    std::string model = "gemma3:latest";
    double temperature = 0.0;
    int timeout_ms = 30000;
    int parallelism = 4;
    std::string auth_token_env;  // env var holding a bearer token, if any
    int retry_attempts = 3;
    int retry_base_delay_ms = 100;  // doubled per attempt
    std::optional<int> max_tokens;
};

// Default instructs the model to answer like an exam-taking student, show
// every step, and write plain keyboard math with no markup. Throws
// OverrideEmpty when a custom override is present but blank.
struct SystemPromptOptions {
    // Replaces the default protocol text entirely; must be non-empty if set.
    std::optional<std::string> custom_override;
    // Appended after the default text under a blank-line separator.
    std::string context_preamble;
};

// Content-addressed store of full request/response records, one JSON file
// per entry at <root>/<first 2 hex>/<digest>.json. Writes are atomic
// (temp file + rename) so concurrent trial workers never observe partials.
class ReplayCache {
public:
    explicit ReplayCache(std::string root_dir);

    static std::string key_digest(const CompletionRequest& request);

    std::optional<std::string> lookup(const CompletionRequest& request) const;
    void store(const CompletionRequest& request, const std::string& response_text) const;

    const std::string& root() const { return root_; }

private:
    std::string entry_path(const std::string& digest) const;
    std::string root_;
};

struct TrialOutcome {
    std::optional<CompletionResponse> response;
    std::string error;  // empty on success
    bool ok() const { return response.has_value(); }
};

// Chat-completion client with optional replay cache. In replay-only mode a
// cache miss raises ReplayMiss instead of touching the network.
class Gateway {
public:
    Gateway(EndpointConfig endpoint, const ReplayCache* cache = nullptr,
            bool replay_only = false);

    CompletionResponse complete(const CompletionRequest& request) const;

    // Bounded-concurrency batch; responses come back in request order and
    // per-request failures never abort the batch. Transport errors retry
    // with exponential backoff.
    std::vector<TrialOutcome> run_trials(std::span<const CompletionRequest> requests,
                                         int parallelism) const;

    const EndpointConfig& endpoint() const { return endpoint_; }

private:
    CompletionResponse complete_live(const CompletionRequest& request) const;

    EndpointConfig endpoint_;
    const ReplayCache* cache_;
    bool replay_only_;
};

}  // namespace mathlens::gateway

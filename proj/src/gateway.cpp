#include "mathlens/gateway.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "mathlens/errors.hpp"
#include "mathlens/sha256.hpp"

namespace mathlens::gateway {

namespace {

constexpr std::string_view kDefaultSystemPrompt =
    "You are a undergrad student taking an exam. Answer each question thoroughly, "
    "completely and show all steps.\n"
    "Do NOT use LaTeX or math markup of any kind. Use plain, human readable math "
    "notation only (e.g., f(x) = x^2/4, not \\frac{x^2}{4}).\n"
    "Do not include any $$, \\( \\), or backslashes. Write math as it would appear "
    "on paper using keyboard characters.";

std::string format_temperature(double t) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", t);
    return buf;
}

}  // namespace

std::string build_system_prompt() { return std::string(kDefaultSystemPrompt); }

std::string build_system_prompt(const SystemPromptOptions& options) {
    if (options.custom_override) {
        if (options.custom_override->empty())
            throw OverrideEmpty("custom system prompt override is empty");
        return *options.custom_override;
    }
    std::string prompt(kDefaultSystemPrompt);
    if (!options.context_preamble.empty()) {
        prompt += "\n\n";
        prompt += options.context_preamble;
    }
    return prompt;
}

ReplayCache::ReplayCache(std::string root_dir) : root_(std::move(root_dir)) {}

std::string ReplayCache::key_digest(const CompletionRequest& request) {
    constexpr char sep = '\x1f';
    std::string material;
    material += request.model_name;
    material += sep;
    material += request.system_text;
    material += sep;
    material += request.user_text;
    material += sep;
    material += format_temperature(request.temperature);
    return detail::sha256_hex(material);
}

std::string ReplayCache::entry_path(const std::string& digest) const {
    return root_ + "/" + digest.substr(0, 2) + "/" + digest + ".json";
}

std::optional<std::string> ReplayCache::lookup(const CompletionRequest& request) const {
    std::ifstream in(entry_path(key_digest(request)), std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    nlohmann::json entry = nlohmann::json::parse(ss.str(), nullptr, false);
    if (entry.is_discarded() || !entry.contains("response")) return std::nullopt;
    return entry["response"]["text"].get<std::string>();
}

void ReplayCache::store(const CompletionRequest& request, const std::string& response_text) const {
    nlohmann::ordered_json entry;
    entry["model"] = request.model_name;
    entry["system"] = request.system_text;
    entry["user"] = request.user_text;
    entry["temperature"] = request.temperature;
    if (request.max_tokens)
        entry["max_tokens"] = *request.max_tokens;
    else
        entry["max_tokens"] = nullptr;
    entry["response"] = {{"text", response_text}};

    namespace fs = std::filesystem;
    fs::path target(entry_path(key_digest(request)));
    fs::create_directories(target.parent_path());

    static std::atomic<unsigned> counter{0};
    fs::path tmp = target;
    tmp += ".tmp" + std::to_string(counter.fetch_add(1));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write cache entry: " + tmp.string());
        out << entry.dump(2);
    }
    fs::rename(tmp, target);
}

Gateway::Gateway(EndpointConfig endpoint, const ReplayCache* cache, bool replay_only)
    : endpoint_(std::move(endpoint)), cache_(cache), replay_only_(replay_only) {}

CompletionResponse Gateway::complete(const CompletionRequest& request) const {
    if (request.user_text.empty()) throw BadConfig("completion request has empty user text");
    if (cache_) {
        if (std::optional<std::string> hit = cache_->lookup(request))
            return CompletionResponse{std::move(*hit), 0, ResponseSource::replay};
    }
    if (replay_only_)
        throw ReplayMiss("no cached response for request digest " +
                         ReplayCache::key_digest(request));

    CompletionResponse response = complete_live(request);
    if (cache_) cache_->store(request, response.text);
    return response;
}

CompletionResponse Gateway::complete_live(const CompletionRequest& request) const {
    if (endpoint_.url.empty())
        throw EndpointUnreachable("no endpoint URL configured");

    nlohmann::json body;
    body["model"] = request.model_name.empty() ? endpoint_.model : request.model_name;
    body["messages"] = nlohmann::json::array({
        nlohmann::json{{"role", "system"}, {"content", request.system_text}},
        nlohmann::json{{"role", "user"}, {"content", request.user_text}},
    });
    body["temperature"] = request.temperature;
    if (request.max_tokens) body["max_tokens"] = *request.max_tokens;

    httplib::Client client(endpoint_.url);
    client.set_connection_timeout(0, endpoint_.timeout_ms * 1000LL);
    client.set_read_timeout(endpoint_.timeout_ms / 1000, (endpoint_.timeout_ms % 1000) * 1000);
    client.set_write_timeout(endpoint_.timeout_ms / 1000, (endpoint_.timeout_ms % 1000) * 1000);

    httplib::Headers headers;
    if (!endpoint_.auth_token_env.empty()) {
        if (const char* token = std::getenv(endpoint_.auth_token_env.c_str()))
            headers.emplace("Authorization", std::string("Bearer ") + token);
    }

    auto start = std::chrono::steady_clock::now();
    httplib::Result result = client.Post(endpoint_.path, headers, body.dump(), "application/json");
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count();

    if (!result) {
        switch (result.error()) {
            case httplib::Error::ConnectionTimeout:
            case httplib::Error::Read:
            case httplib::Error::Write:
                throw Timeout("endpoint timed out: " + endpoint_.url);
            default:
                throw EndpointUnreachable("cannot reach endpoint: " + endpoint_.url);
        }
    }
    if (result->status != 200)
        throw HttpError(result->status,
                        "endpoint returned status " + std::to_string(result->status));

    nlohmann::json payload = nlohmann::json::parse(result->body, nullptr, false);
    if (payload.is_discarded() || !payload.contains("choices") || payload["choices"].empty())
        throw HttpError(result->status, "malformed completion payload");
    std::string content = payload["choices"][0]["message"]["content"].get<std::string>();
    if (content.empty()) throw HttpError(result->status, "endpoint returned an empty completion");

    return CompletionResponse{std::move(content), elapsed, ResponseSource::live};
}

std::vector<TrialOutcome> Gateway::run_trials(std::span<const CompletionRequest> requests,
                                              int parallelism) const {
    if (parallelism < 1) throw BadConfig("parallelism must be >= 1");

    std::vector<TrialOutcome> outcomes(requests.size());
    auto run_one = [&](std::size_t i) {
        int attempts = std::max(1, endpoint_.retry_attempts);
        for (int attempt = 0; attempt < attempts; ++attempt) {
            try {
                outcomes[i].response = complete(requests[i]);
                outcomes[i].error.clear();
                return;
            } catch (const ReplayMiss& e) {
                outcomes[i].error = e.what();
                return;  // a miss never resolves by retrying
            } catch (const BadConfig& e) {
                outcomes[i].error = e.what();
                return;
            } catch (const HttpError& e) {
                outcomes[i].error = e.what();
                if (e.status < 500) return;
            } catch (const Error& e) {
                outcomes[i].error = e.what();
            }
            if (attempt + 1 < attempts) {
                auto delay = std::chrono::milliseconds(
                    endpoint_.retry_base_delay_ms * (1LL << attempt));
                std::this_thread::sleep_for(delay);
            }
        }
    };

    const std::size_t n = requests.size();
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(parallelism), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) run_one(i);
        return outcomes;
    }

    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                run_one(i);
            }
        });
    }
    for (std::thread& t : pool) t.join();
    return outcomes;
}

}  // namespace mathlens::gateway

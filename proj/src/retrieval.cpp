#include "mathlens/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <httplib.h>

#include "mathlens/divergence.hpp"
#include "mathlens/errors.hpp"
#include "mathlens/text.hpp"

namespace mathlens::retrieval {

bool EmbeddingVector::is_zero() const {
    for (double v : values)
        if (v != 0.0) return false;
    return true;
}

namespace {

std::vector<std::string> split_paragraphs(std::string_view doc_text) {
    std::vector<std::string> paragraphs;
    std::string current;
    bool blank_run = false;
    for (const std::string& line : text::split(doc_text, '\n')) {
        if (text::trim(line).empty()) {
            blank_run = true;
            continue;
        }
        if (blank_run && !current.empty()) {
            paragraphs.push_back(std::move(current));
            current.clear();
        }
        blank_run = false;
        if (!current.empty()) current.push_back('\n');
        current += std::string(text::trim(line));
    }
    if (!current.empty()) paragraphs.push_back(std::move(current));
    return paragraphs;
}

}  // namespace

std::vector<CorpusSegment> filter_segments(std::span<const CorpusDoc> docs,
                                           std::span<const std::string> keywords) {
    if (docs.empty()) throw EmptyCorpus("no corpus documents supplied");
    if (keywords.empty()) throw BadConfig("keyword filter requires at least one keyword");

    std::vector<CorpusSegment> segments;
    for (const CorpusDoc& doc : docs) {
        for (std::string& paragraph : split_paragraphs(doc.text)) {
            std::string lowered = text::to_lower(paragraph);
            std::vector<std::string> matched;
            for (const std::string& keyword : keywords)
                if (text::contains_word(lowered, text::to_lower(keyword)))
                    matched.push_back(keyword);
            if (!matched.empty())
                segments.push_back(CorpusSegment{doc.doc_id, std::move(paragraph),
                                                 std::move(matched)});
        }
    }
    return segments;
}

std::vector<CorpusChunk> chunk_segment(const CorpusSegment& segment, std::size_t chunk_size,
                                       std::size_t overlap) {
    if (chunk_size == 0 || overlap >= chunk_size)
        throw BadConfig("chunking requires 0 <= overlap < chunk_size");

    std::vector<CorpusChunk> chunks;
    const std::size_t len = segment.text.size();
    const std::size_t stride = chunk_size - overlap;
    std::size_t pos = 0;
    while (true) {
        std::size_t end = std::min(pos + chunk_size, len);
        CorpusChunk chunk;
        chunk.doc_id = segment.doc_id;
        chunk.begin = pos;
        chunk.end = end;
        chunk.text = segment.text.substr(pos, end - pos);
        chunks.push_back(std::move(chunk));
        if (end == len) break;
        pos += stride;
    }
    return chunks;
}

EmbeddingVector HashedBowEmbedder::embed(std::string_view input) const {
    EmbeddingVector vec;
    vec.values.assign(dims_, 0.0);
    for (const std::string& token : divergence::tokenize(input)) {
        std::uint64_t h = text::fnv1a64(token);
        std::size_t bucket = static_cast<std::size_t>(h % dims_);
        double sign = ((h >> 32) & 1) ? 1.0 : -1.0;
        vec.values[bucket] += sign;
    }
    double norm_sq = 0.0;
    for (double v : vec.values) norm_sq += v * v;
    if (norm_sq > 0.0) {
        double norm = std::sqrt(norm_sq);
        for (double& v : vec.values) v /= norm;
    }
    return vec;
}

HttpEmbedder::HttpEmbedder(std::string url, std::string model, std::size_t dims,
                           std::string path, int timeout_ms)
    : url_(std::move(url)), model_(std::move(model)), dims_(dims), path_(std::move(path)),
      timeout_ms_(timeout_ms) {}

EmbeddingVector HttpEmbedder::embed(std::string_view input) const {
    nlohmann::json body;
    body["model"] = model_;
    body["input"] = nlohmann::json::array({std::string(input)});

    httplib::Client client(url_);
    client.set_connection_timeout(0, timeout_ms_ * 1000LL);
    client.set_read_timeout(timeout_ms_ / 1000, (timeout_ms_ % 1000) * 1000);

    httplib::Result result = client.Post(path_, body.dump(), "application/json");
    if (!result) throw EndpointUnreachable("cannot reach embedding endpoint: " + url_);
    if (result->status != 200)
        throw HttpError(result->status,
                        "embedding endpoint returned status " + std::to_string(result->status));

    nlohmann::json payload = nlohmann::json::parse(result->body, nullptr, false);
    if (payload.is_discarded() || !payload.contains("data") || payload["data"].empty())
        throw HttpError(result->status, "malformed embedding payload");

    EmbeddingVector vec;
    vec.values = payload["data"][0]["embedding"].get<std::vector<double>>();
    if (vec.values.size() != dims_)
        throw BadConfig("embedding endpoint returned " + std::to_string(vec.values.size()) +
                        " dims, expected " + std::to_string(dims_));
    return vec;
}

std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts,
                                         const Embedder& embedder, bool parallel) {
    std::vector<EmbeddingVector> vectors(texts.size());
    const std::int64_t count = static_cast<std::int64_t>(texts.size());
#pragma omp parallel for schedule(static) if (parallel)
    for (std::int64_t i = 0; i < count; ++i)
        vectors[static_cast<std::size_t>(i)] = embedder.embed(texts[static_cast<std::size_t>(i)]);
    return vectors;
}

double dense_cosine(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty()) return 0.0;
    if (std::equal(a.begin(), a.end(), b.begin())) {
        for (double v : a)
            if (v != 0.0) return 1.0;
        return 0.0;
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

void VectorIndex::add(CorpusChunk chunk) {
    if (chunks_.empty()) {
        dims_ = chunk.vector.values.size();
    } else if (chunk.vector.values.size() != dims_) {
        throw BadConfig("chunk dimensionality " + std::to_string(chunk.vector.values.size()) +
                        " does not match index dims " + std::to_string(dims_));
    }
    chunks_.push_back(std::move(chunk));
}

std::vector<ScoredChunk> VectorIndex::query_topk(const EmbeddingVector& query, std::size_t k,
                                                 bool parallel) const {
    if (chunks_.empty()) throw EmptyIndex("vector index is empty");
    if (k == 0) throw BadConfig("top-k requires k >= 1");

    std::vector<double> similarity(chunks_.size());
    const std::int64_t count = static_cast<std::int64_t>(chunks_.size());
#pragma omp parallel for schedule(static) if (parallel)
    for (std::int64_t i = 0; i < count; ++i)
        similarity[static_cast<std::size_t>(i)] =
            dense_cosine(query.values, chunks_[static_cast<std::size_t>(i)].vector.values);

    std::vector<std::size_t> order(chunks_.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (similarity[a] != similarity[b]) return similarity[a] > similarity[b];
        return chunks_[a].chunk_id < chunks_[b].chunk_id;
    });

    std::vector<ScoredChunk> top;
    const std::size_t take = std::min(k, chunks_.size());
    top.reserve(take);
    for (std::size_t i = 0; i < take; ++i)
        top.push_back(ScoredChunk{&chunks_[order[i]], similarity[order[i]]});
    return top;
}

nlohmann::ordered_json VectorIndex::to_json(const RetrievalConfig& config) const {
    nlohmann::ordered_json snapshot;
    snapshot["config"] = {
        {"chunk_size", config.chunk_size},
        {"overlap", config.overlap},
        {"top_k", config.top_k},
        {"keywords", config.keywords},
        {"mode", config.mode == RetrievalMode::rag ? "rag" : "contextual"},
    };
    snapshot["dims"] = dims_;
    nlohmann::ordered_json chunk_array = nlohmann::ordered_json::array();
    for (const CorpusChunk& chunk : chunks_) {
        nlohmann::ordered_json entry;
        entry["chunk_id"] = chunk.chunk_id;
        entry["doc_id"] = chunk.doc_id;
        entry["begin"] = chunk.begin;
        entry["end"] = chunk.end;
        entry["text"] = chunk.text;
        entry["vector"] = chunk.vector.values;
        chunk_array.push_back(std::move(entry));
    }
    snapshot["chunks"] = std::move(chunk_array);
    return snapshot;
}

VectorIndex VectorIndex::from_json(const nlohmann::json& snapshot, RetrievalConfig* config) {
    VectorIndex index;
    if (config && snapshot.contains("config")) {
        const nlohmann::json& c = snapshot["config"];
        config->chunk_size = c.value("chunk_size", config->chunk_size);
        config->overlap = c.value("overlap", config->overlap);
        config->top_k = c.value("top_k", config->top_k);
        config->keywords = c.value("keywords", config->keywords);
        config->mode = c.value("mode", "rag") == std::string("contextual")
                           ? RetrievalMode::contextual
                           : RetrievalMode::rag;
    }
    for (const nlohmann::json& entry : snapshot.at("chunks")) {
        CorpusChunk chunk;
        chunk.chunk_id = entry.at("chunk_id").get<std::uint64_t>();
        chunk.doc_id = entry.at("doc_id").get<std::string>();
        chunk.begin = entry.at("begin").get<std::size_t>();
        chunk.end = entry.at("end").get<std::size_t>();
        chunk.text = entry.at("text").get<std::string>();
        chunk.vector.values = entry.at("vector").get<std::vector<double>>();
        index.add(std::move(chunk));
    }
    return index;
}

namespace {

constexpr std::string_view kContextHeader = "Reference material:";

}

AssembledPrompt assemble_baseline(const std::string& question, const std::string& system_text) {
    AssembledPrompt prompt;
    prompt.system_text = system_text;
    prompt.user_text = question;
    return prompt;
}

AssembledPrompt assemble_with_context(const std::string& question,
                                      std::span<const ContextItem> items,
                                      const std::string& system_text,
                                      std::size_t max_user_chars) {
    auto render = [&](std::size_t take) {
        std::string user;
        if (take > 0) {
            user += kContextHeader;
            user += '\n';
            for (std::size_t i = 0; i < take; ++i) {
                user += items[i].ref;
                user += ' ';
                user += items[i].text;
                user += '\n';
            }
            user += '\n';
        }
        user += question;
        return user;
    };

    std::size_t take = items.size();
    std::string user = render(take);
    while (user.size() > max_user_chars && take > 0) {
        --take;  // drop lowest-ranked items first
        user = render(take);
    }
    if (user.size() > max_user_chars)
        throw ContextOverflow("question alone exceeds the context budget of " +
                              std::to_string(max_user_chars) + " chars");

    AssembledPrompt prompt;
    prompt.system_text = system_text;
    prompt.user_text = std::move(user);
    prompt.truncated = take < items.size();
    for (std::size_t i = 0; i < take; ++i) prompt.included_refs.push_back(items[i].ref);
    return prompt;
}

}  // namespace mathlens::retrieval

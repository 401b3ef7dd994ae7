#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace mathlens::retrieval {

struct CorpusDoc {
    std::string doc_id;
    std::string text;
};

// A keyword-retained paragraph of a source document.
struct CorpusSegment {
    std::string doc_id;
    std::string text;
    std::vector<std::string> matched_keywords;
};

struct EmbeddingVector {
    std::vector<double> values;
    bool is_zero() const;
};

struct CorpusChunk {
    std::uint64_t chunk_id = 0;  // global, ascending; breaks similarity ties
    std::string doc_id;
    std::string text;
    std::size_t begin = 0;  // span within the parent segment
    std::size_t end = 0;
    EmbeddingVector vector;
};

enum class RetrievalMode { rag, contextual };

struct RetrievalConfig {
    std::size_t chunk_size = 800;  // characters
    std::size_t overlap = 200;
    std::size_t top_k = 4;
    std::vector<std::string> keywords;
    RetrievalMode mode = RetrievalMode::rag;
};

// Paragraph-level keyword filter (case-insensitive, whole word).
// Throws EmptyCorpus when no documents are given and BadConfig on an empty
// keyword list; zero matches is a valid (empty) result.
std::vector<CorpusSegment> filter_segments(std::span<const CorpusDoc> docs,
                                           std::span<const std::string> keywords);

// Sliding window with stride chunk_size - overlap; spans cover the segment
// and adjacent spans overlap by exactly `overlap` except the final chunk.
std::vector<CorpusChunk> chunk_segment(const CorpusSegment& segment, std::size_t chunk_size,
                                       std::size_t overlap);

class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::size_t dims() const = 0;
    virtual EmbeddingVector embed(std::string_view text) const = 0;
};

// Deterministic offline embedder: hashed bag of words over the divergence
// tokenizer, fixed 256 dims with a hash-assigned sign, L2-normalized.
class HashedBowEmbedder final : public Embedder {
public:
    explicit HashedBowEmbedder(std::size_t dims = 256) : dims_(dims) {}
    std::size_t dims() const override { return dims_; }
    EmbeddingVector embed(std::string_view text) const override;

private:
    std::size_t dims_;
};

// Embedding endpoint speaking the common {"model", "input"} JSON shape.
class HttpEmbedder final : public Embedder {
public:
    HttpEmbedder(std::string url, std::string model, std::size_t dims,
                 std::string path = "/v1/embeddings", int timeout_ms = 30000);
    std::size_t dims() const override { return dims_; }
    EmbeddingVector embed(std::string_view text) const override;

private:
    std::string url_;
    std::string model_;
    std::size_t dims_;
    std::string path_;
    int timeout_ms_;
};

std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts,
                                         const Embedder& embedder, bool parallel = true);

struct ScoredChunk {
    const CorpusChunk* chunk = nullptr;
    double similarity = 0.0;
};

// Build-then-freeze exact-cosine index with a JSON snapshot.
class VectorIndex {
public:
    void add(CorpusChunk chunk);  // enforces uniform dimensionality
    std::size_t size() const { return chunks_.size(); }
    const std::vector<CorpusChunk>& chunks() const { return chunks_; }

    // Exact top-k by cosine, descending, ties broken by ascending chunk_id;
    // k beyond the index size returns everything. Scores are computed
    // identically on the serial and OpenMP paths.
    std::vector<ScoredChunk> query_topk(const EmbeddingVector& query, std::size_t k,
                                        bool parallel = true) const;

    nlohmann::ordered_json to_json(const RetrievalConfig& config) const;
    static VectorIndex from_json(const nlohmann::json& snapshot, RetrievalConfig* config = nullptr);

private:
    std::vector<CorpusChunk> chunks_;
    std::size_t dims_ = 0;
};

double dense_cosine(std::span<const double> a, std::span<const double> b);

// One context block handed to prompt assembly: a ranked chunk in RAG mode or
// a curated document in contextual mode.
struct ContextItem {
    std::string ref;  // "[doc_id:chunk_id]" or "[doc_id]"
    std::string text;
};

struct AssembledPrompt {
    std::string system_text;
    std::string user_text;
    bool truncated = false;
    std::vector<std::string> included_refs;
};

// Baseline passes the question through untouched; rag/contextual insert the
// items under a "Reference material:" header ahead of the question. Items are
// dropped lowest-rank-first to fit max_user_chars (the question itself must
// fit, otherwise ContextOverflow).
AssembledPrompt assemble_baseline(const std::string& question, const std::string& system_text);
AssembledPrompt assemble_with_context(const std::string& question,
                                      std::span<const ContextItem> items,
                                      const std::string& system_text,
                                      std::size_t max_user_chars);

}  // namespace mathlens::retrieval

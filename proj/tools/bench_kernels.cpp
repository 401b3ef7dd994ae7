// Times the batch kernels on their serial and OpenMP paths over synthetic
// workloads. Outputs one line per (kernel, path) with throughput.

#include <chrono>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mathlens/divergence.hpp"
#include "mathlens/retrieval.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string synthetic_response(std::mt19937& rng, std::size_t words) {
    static const char* vocab[] = {"differentiate", "substitute",  "gradient", "evaluate",
                                  "x^2",           "f(x)",        "therefore", "the",
                                  "solve",         "simplify",    "limit",     "(-1, 4)",
                                  "derivative",    "chain",       "rule",      "integral"};
    std::uniform_int_distribution<std::size_t> pick(0, std::size(vocab) - 1);
    std::string text;
    for (std::size_t i = 0; i < words; ++i) {
        if (i) text += ' ';
        text += vocab[pick(rng)];
    }
    return text;
}

void bench_score_trials() {
    std::mt19937 rng(7);
    std::string original = synthetic_response(rng, 600);
    std::vector<std::string> ablated;
    for (int i = 0; i < 96; ++i) ablated.push_back(synthetic_response(rng, 600));

    for (bool parallel : {false, true}) {
        auto start = Clock::now();
        auto scores = mathlens::divergence::score_trials(original, ablated, 0.5, parallel);
        double elapsed = seconds_since(start);
        std::printf("score_trials   %-8s %4zu trials   %8.3f ms  (checksum %.6f)\n",
                    parallel ? "parallel" : "serial", scores.size(), elapsed * 1e3,
                    scores.back().divergence);
    }
}

void bench_query_topk() {
    std::mt19937 rng(11);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const std::size_t chunks = 50000, dims = 256;

    mathlens::retrieval::VectorIndex index;
    for (std::size_t i = 0; i < chunks; ++i) {
        mathlens::retrieval::CorpusChunk chunk;
        chunk.chunk_id = i;
        chunk.doc_id = "doc";
        chunk.vector.values.resize(dims);
        for (double& v : chunk.vector.values) v = gauss(rng);
        index.add(std::move(chunk));
    }
    mathlens::retrieval::EmbeddingVector query;
    query.values.resize(dims);
    for (double& v : query.values) v = gauss(rng);

    for (bool parallel : {false, true}) {
        auto start = Clock::now();
        double checksum = 0.0;
        for (int repeat = 0; repeat < 20; ++repeat)
            checksum += index.query_topk(query, 10, parallel).front().similarity;
        double elapsed = seconds_since(start);
        std::printf("query_topk     %-8s %4d queries   %8.3f ms  (checksum %.6f)\n",
                    parallel ? "parallel" : "serial", 20, elapsed * 1e3, checksum);
    }
}

void bench_embed_batch() {
    std::mt19937 rng(13);
    std::vector<std::string> texts;
    for (int i = 0; i < 4000; ++i) texts.push_back(synthetic_response(rng, 120));
    mathlens::retrieval::HashedBowEmbedder embedder;

    for (bool parallel : {false, true}) {
        auto start = Clock::now();
        auto vectors = mathlens::retrieval::embed_batch(texts, embedder, parallel);
        double elapsed = seconds_since(start);
        double checksum = 0.0;
        for (double v : vectors.back().values) checksum += v * v;
        std::printf("embed_batch    %-8s %4zu texts    %8.3f ms  (checksum %.6f)\n",
                    parallel ? "parallel" : "serial", vectors.size(), elapsed * 1e3, checksum);
    }
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; both paths run serially\n");
#endif
    bench_score_trials();
    bench_query_topk();
    bench_embed_batch();
    return 0;
}

#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mathlens::divergence {

// Lowercased word tokens; math notation units (x^2, f(x), 3.14, (-1, 4))
// survive as single tokens.
using TokenSequence = std::vector<std::string>;

TokenSequence tokenize(std::string_view text);

// Term -> tf-idf weight; zero weights are never stored. std::map keeps
// iteration deterministic.
using SparseVector = std::map<std::string, double>;

// tf = count / doc length, idf = ln(N / df) + 1 over the given corpus.
// Throws InsufficientCorpus when fewer than two documents are supplied.
std::vector<SparseVector> tfidf_vectors(std::span<const TokenSequence> docs);

// dot(a,b) / (|a| |b|), clamped to [0,1]. Entry-wise equal vectors compare
// to exactly 1.0; a zero-norm side yields 0.0 and sets *zero_norm when given.
double cosine_similarity(const SparseVector& a, const SparseVector& b,
                         bool* zero_norm = nullptr);

// Token-level Levenshtein with unit costs, divided by max(|a|, |b|).
// Two empty sequences compare to 0.
double normalized_edit_distance(const TokenSequence& a, const TokenSequence& b);

struct DivergenceScore {
    double cosine_similarity = 0.0;
    double normalized_edit_distance = 0.0;
    double divergence = 0.0;
    double alpha = 0.5;
};

// d = alpha * (1 - cos) + (1 - alpha) * ned.
double combine(double alpha, double cosine, double edit_distance);

// Per-trial divergence. The corpus supplies the idf statistics and must
// contain both sequences.
DivergenceScore divergence(const TokenSequence& original_response,
                           const TokenSequence& ablated_response,
                           std::span<const TokenSequence> corpus, double alpha);

// Batch kernel over one question's trials: corpus = original + ablated
// responses, vectorized once; per-trial scoring is OpenMP-parallel when
// `parallel` is set and bit-identical to the serial path either way.
std::vector<DivergenceScore> score_trials(const std::string& original_response,
                                          std::span<const std::string> ablated_responses,
                                          double alpha, bool parallel = true);

}  // namespace mathlens::divergence

#include "mathlens/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "mathlens/errors.hpp"
#include "mathlens/math_tokens.hpp"
#include "mathlens/text.hpp"

namespace mathlens::divergence {

TokenSequence tokenize(std::string_view s) {
    std::vector<MathToken> math = scan_math_tokens(s);
    TokenSequence tokens;
    std::string word;
    auto flush = [&] {
        if (!word.empty()) {
            tokens.push_back(word);
            word.clear();
        }
    };
    std::size_t next_math = 0;
    std::size_t i = 0;
    while (i < s.size()) {
        if (next_math < math.size() && math[next_math].begin == i) {
            flush();
            tokens.push_back(text::to_lower(s.substr(i, math[next_math].end - i)));
            i = math[next_math].end;
            ++next_math;
            continue;
        }
        unsigned char c = static_cast<unsigned char>(s[i]);
        if (text::is_word_char(s[i]) || c >= 0x80) {
            word.push_back(static_cast<char>(
                (s[i] >= 'A' && s[i] <= 'Z') ? s[i] - 'A' + 'a' : s[i]));
        } else {
            flush();
        }
        ++i;
    }
    flush();
    return tokens;
}

std::vector<SparseVector> tfidf_vectors(std::span<const TokenSequence> docs) {
    const std::size_t n = docs.size();
    if (n < 2) throw InsufficientCorpus("tf-idf needs at least 2 documents, got " +
                                        std::to_string(n));

    std::map<std::string, std::size_t> df;
    for (const TokenSequence& doc : docs) {
        std::map<std::string, bool> seen;
        for (const std::string& token : doc)
            if (!seen[token]) {
                seen[token] = true;
                ++df[token];
            }
    }

    std::vector<SparseVector> vectors;
    vectors.reserve(n);
    for (const TokenSequence& doc : docs) {
        SparseVector vec;
        if (!doc.empty()) {
            std::map<std::string, std::size_t> counts;
            for (const std::string& token : doc) ++counts[token];
            const double len = static_cast<double>(doc.size());
            for (const auto& [term, count] : counts) {
                double tf = static_cast<double>(count) / len;
                double idf = std::log(static_cast<double>(n) /
                                      static_cast<double>(df.at(term))) + 1.0;
                vec[term] = tf * idf;
            }
        }
        vectors.push_back(std::move(vec));
    }
    return vectors;
}

double cosine_similarity(const SparseVector& a, const SparseVector& b, bool* zero_norm) {
    if (zero_norm) *zero_norm = false;
    if (a.empty() || b.empty()) {
        if (zero_norm) *zero_norm = true;
        return 0.0;
    }
    if (a == b) return 1.0;

    double dot = 0.0;
    for (const auto& [term, weight] : a) {
        auto it = b.find(term);
        if (it != b.end()) dot += weight * it->second;
    }
    double na = 0.0, nb = 0.0;
    for (const auto& [term, weight] : a) na += weight * weight;
    for (const auto& [term, weight] : b) nb += weight * weight;
    if (na == 0.0 || nb == 0.0) {
        if (zero_norm) *zero_norm = true;
        return 0.0;
    }
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

double normalized_edit_distance(const TokenSequence& a, const TokenSequence& b) {
    const std::size_t n = a.size(), m = b.size();
    if (n == 0 && m == 0) return 0.0;
    if (n == 0 || m == 0) return 1.0;

    std::vector<std::size_t> prev(m + 1), curr(m + 1);
    for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
    for (std::size_t i = 1; i <= n; ++i) {
        curr[0] = i;
        for (std::size_t j = 1; j <= m; ++j) {
            std::size_t cost = (a[i - 1] == b[j - 1]) ? 0 : 1;
            curr[j] = std::min({prev[j] + 1, curr[j - 1] + 1, prev[j - 1] + cost});
        }
        std::swap(prev, curr);
    }
    return static_cast<double>(prev[m]) / static_cast<double>(std::max(n, m));
}

double combine(double alpha, double cosine, double edit_distance) {
    return alpha * (1.0 - cosine) + (1.0 - alpha) * edit_distance;
}

DivergenceScore divergence(const TokenSequence& original_response,
                           const TokenSequence& ablated_response,
                           std::span<const TokenSequence> corpus, double alpha) {
    if (alpha < 0.0 || alpha > 1.0)
        throw std::invalid_argument("alpha must lie in [0,1]");
    auto find_doc = [&](const TokenSequence& doc) -> std::size_t {
        for (std::size_t i = 0; i < corpus.size(); ++i)
            if (corpus[i] == doc) return i;
        throw std::invalid_argument("corpus does not contain the response");
    };
    std::size_t oi = find_doc(original_response);
    std::size_t ai = find_doc(ablated_response);

    std::vector<SparseVector> vectors = tfidf_vectors(corpus);
    DivergenceScore score;
    score.alpha = alpha;
    score.cosine_similarity = cosine_similarity(vectors[oi], vectors[ai]);
    score.normalized_edit_distance = normalized_edit_distance(original_response, ablated_response);
    score.divergence = combine(alpha, score.cosine_similarity, score.normalized_edit_distance);
    return score;
}

std::vector<DivergenceScore> score_trials(const std::string& original_response,
                                          std::span<const std::string> ablated_responses,
                                          double alpha, bool parallel) {
    if (alpha < 0.0 || alpha > 1.0)
        throw std::invalid_argument("alpha must lie in [0,1]");
    std::vector<TokenSequence> corpus;
    corpus.reserve(ablated_responses.size() + 1);
    corpus.push_back(tokenize(original_response));
    for (const std::string& response : ablated_responses)
        corpus.push_back(tokenize(response));

    std::vector<SparseVector> vectors = tfidf_vectors(corpus);
    const std::int64_t count = static_cast<std::int64_t>(ablated_responses.size());
    std::vector<DivergenceScore> scores(ablated_responses.size());

#pragma omp parallel for schedule(static) if (parallel)
    for (std::int64_t t = 0; t < count; ++t) {
        DivergenceScore& score = scores[static_cast<std::size_t>(t)];
        score.alpha = alpha;
        score.cosine_similarity =
            cosine_similarity(vectors[0], vectors[static_cast<std::size_t>(t) + 1]);
        score.normalized_edit_distance =
            normalized_edit_distance(corpus[0], corpus[static_cast<std::size_t>(t) + 1]);
        score.divergence = combine(alpha, score.cosine_similarity, score.normalized_edit_distance);
    }
    return scores;
}

}  // namespace mathlens::divergence

#include "mathlens/lexicon.hpp"

#include <algorithm>

#include "mathlens/errors.hpp"
#include "mathlens/text.hpp"

namespace mathlens {

Lexicon Lexicon::parse(std::string_view config_text) {
    Lexicon lex;
    for (const std::string& raw_line : text::split(config_text, '\n')) {
        std::string_view line = text::trim(raw_line);
        if (line.empty() || line.front() == '#') continue;
        std::size_t colon = line.find(':');
        if (colon == std::string_view::npos)
            throw ConfigError("lexicon line missing ':' separator: " + std::string(line));
        std::string tag(text::trim(line.substr(0, colon)));
        if (tag.empty()) throw ConfigError("lexicon line with empty tag");
        std::vector<std::string> lexemes;
        for (const std::string& piece : text::split(line.substr(colon + 1), ',')) {
            std::string_view lexeme = text::trim(piece);
            if (!lexeme.empty()) lexemes.push_back(text::to_lower(lexeme));
        }
        if (lexemes.empty()) throw ConfigError("lexicon tag with no lexemes: " + tag);
        lex.add(std::move(tag), std::move(lexemes));
    }
    return lex;
}

Lexicon Lexicon::load(const std::string& path) {
    return parse(text::read_file(path));
}

void Lexicon::add(std::string tag, std::vector<std::string> lexemes) {
    for (Entry& e : entries_) {
        if (e.tag == tag) {
            e.lexemes.insert(e.lexemes.end(), lexemes.begin(), lexemes.end());
            return;
        }
    }
    entries_.push_back(Entry{std::move(tag), std::move(lexemes)});
}

bool Lexicon::operator==(const Lexicon& other) const {
    if (entries_.size() != other.entries_.size()) return false;
    for (std::size_t i = 0; i < entries_.size(); ++i)
        if (entries_[i].tag != other.entries_[i].tag ||
            entries_[i].lexemes != other.entries_[i].lexemes)
            return false;
    return true;
}

namespace {

// Word boundaries apply per end: an end that is an ASCII word char needs a
// non-word neighbor, a symbol end (∇, ∂, ...) matches flush against anything.
bool boundary_ok(std::string_view haystack, std::size_t pos, std::size_t len) {
    std::string_view lexeme = haystack.substr(pos, len);
    if (text::is_word_char(lexeme.front())) {
        if (pos > 0 && text::is_word_char(haystack[pos - 1])) return false;
    }
    if (text::is_word_char(lexeme.back())) {
        std::size_t end = pos + len;
        if (end < haystack.size() && text::is_word_char(haystack[end])) return false;
    }
    return true;
}

}  // namespace

std::vector<LexiconMatch> find_lexicon_matches(std::string_view haystack, const Lexicon& lexicon) {
    std::string lowered = text::to_lower(haystack);
    std::vector<LexiconMatch> matches;
    for (const Lexicon::Entry& entry : lexicon.entries()) {
        for (const std::string& lexeme : entry.lexemes) {
            std::size_t pos = 0;
            while ((pos = lowered.find(lexeme, pos)) != std::string::npos) {
                if (boundary_ok(lowered, pos, lexeme.size()))
                    matches.push_back(LexiconMatch{entry.tag, lexeme, pos});
                ++pos;
            }
        }
    }
    std::sort(matches.begin(), matches.end(), [](const LexiconMatch& a, const LexiconMatch& b) {
        if (a.position != b.position) return a.position < b.position;
        if (a.tag != b.tag) return a.tag < b.tag;
        return a.lexeme < b.lexeme;
    });
    return matches;
}

namespace {

constexpr std::string_view kOperationLexicon = R"(# Mathematical operation taxonomy: tag: lexeme, lexeme, ...
differentiation: differentiate, differentiates, differentiated, differentiating, differentiation, derivative, derivatives
integration: integrate, integrates, integrated, integrating, integration, integral, integrals, antiderivative, antiderivatives, ∫
substitution: substitute, substitutes, substituted, substituting, substitution, plug in, plugging in, plugged in
simplification: simplify, simplifies, simplified, simplifying, simplification, combine like terms
evaluation: evaluate, evaluates, evaluated, evaluating, evaluation, compute, computes, computed, computing, calculate, calculates, calculated, calculating
solving: solve, solves, solved, solving, isolate, isolating
limit: limit, limits, l'hopital
factoring: factor, factors, factored, factoring, factorize, factorization
)";

constexpr std::string_view kConceptLexicon = R"(# Concept taxonomy: tag: lexeme, lexeme, ...
gradient: gradient, gradients, grad, ∇
chain rule: chain rule
partial derivatives: partial derivative, partial derivatives, ∂
directional derivative: directional derivative, directional derivatives
Fundamental Theorem of Calculus: fundamental theorem of calculus, fundamental theorem
maximum: maximum, maximize, maximal
minimum: minimum, minimize, minimal
limits: limit, limits
series: series, taylor series, power series
continuity: continuous, continuity
critical points: critical point, critical points
)";

constexpr std::string_view kInstructionLexicon = R"(# Instructional keywords for prompt decomposition: tag: lexeme, lexeme, ...
find: find
compute: compute
evaluate: evaluate
determine: determine
show: show
sketch: sketch
)";

}  // namespace

const Lexicon& default_operation_lexicon() {
    static const Lexicon lex = Lexicon::parse(kOperationLexicon);
    return lex;
}

const Lexicon& default_concept_lexicon() {
    static const Lexicon lex = Lexicon::parse(kConceptLexicon);
    return lex;
}

const Lexicon& default_instruction_lexicon() {
    static const Lexicon lex = Lexicon::parse(kInstructionLexicon);
    return lex;
}

}  // namespace mathlens

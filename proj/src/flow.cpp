#include "mathlens/flow.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <set>

#include "mathlens/errors.hpp"
#include "mathlens/math_tokens.hpp"
#include "mathlens/text.hpp"

namespace mathlens::flow {

namespace {

constexpr std::array<std::string_view, 9> kOperationNames = {
    "substitution", "differentiation", "integration", "simplification", "evaluation",
    "solving",      "limit",           "factoring",   "other"};

constexpr std::array<std::string_view, 6> kDiscourseMarkers = {"First",     "Then", "Next",
                                                               "Finally",   "Therefore",
                                                               "So"};

// Fixed dominant-operation priority; earlier wins.
constexpr std::array<OperationKind, 8> kDominantPriority = {
    OperationKind::differentiation, OperationKind::integration,  OperationKind::substitution,
    OperationKind::evaluation,      OperationKind::solving,      OperationKind::simplification,
    OperationKind::limit,           OperationKind::factoring};

}  // namespace

std::string_view operation_name(OperationKind kind) {
    switch (kind) {
        case OperationKind::substitution: return kOperationNames[0];
        case OperationKind::differentiation: return kOperationNames[1];
        case OperationKind::integration: return kOperationNames[2];
        case OperationKind::simplification: return kOperationNames[3];
        case OperationKind::evaluation: return kOperationNames[4];
        case OperationKind::solving: return kOperationNames[5];
        case OperationKind::limit: return kOperationNames[6];
        case OperationKind::factoring: return kOperationNames[7];
        case OperationKind::other: break;
    }
    return kOperationNames[8];
}

OperationKind operation_from_name(std::string_view name) {
    if (name == "substitution") return OperationKind::substitution;
    if (name == "differentiation") return OperationKind::differentiation;
    if (name == "integration") return OperationKind::integration;
    if (name == "simplification") return OperationKind::simplification;
    if (name == "evaluation") return OperationKind::evaluation;
    if (name == "solving") return OperationKind::solving;
    if (name == "limit") return OperationKind::limit;
    if (name == "factoring") return OperationKind::factoring;
    return OperationKind::other;
}

std::string_view level_name(Level level) {
    switch (level) {
        case Level::low: return "low";
        case Level::medium: return "medium";
        case Level::high: break;
    }
    return "high";
}

int level_weight(Level level) {
    switch (level) {
        case Level::low: return 1;
        case Level::medium: return 3;
        case Level::high: break;
    }
    return 5;
}

namespace {

// --- segmentation -----------------------------------------------------------

struct MarkerRange {
    std::size_t begin, end;
};

bool is_terminal(char c) { return c == '.' || c == '?' || c == '!'; }

// "1.", "12)", "(a)", "Step 3:" — returns one-past-the-marker or 0.
std::size_t match_enum_marker(std::string_view s, std::size_t p) {
    auto followed_by_space = [&](std::size_t q) {
        return q >= s.size() || text::is_space(s[q]);
    };
    if (p < s.size() && text::is_ascii_digit(s[p])) {
        std::size_t q = p;
        while (q < s.size() && text::is_ascii_digit(s[q]) && q - p < 3) ++q;
        if (q < s.size() && (s[q] == '.' || s[q] == ')') && followed_by_space(q + 1))
            return q + 1;
        return 0;
    }
    if (p < s.size() && s[p] == '(') {
        if (p + 2 < s.size() && (text::is_ascii_alpha(s[p + 1]) || text::is_ascii_digit(s[p + 1])) &&
            s[p + 2] == ')' && followed_by_space(p + 3))
            return p + 3;
        return 0;
    }
    if (s.compare(p, 5, "Step ") == 0 || s.compare(p, 5, "step ") == 0) {
        std::size_t q = p + 5;
        std::size_t digits = q;
        while (q < s.size() && text::is_ascii_digit(s[q])) ++q;
        if (q > digits && q < s.size() && (s[q] == ':' || s[q] == '.') && followed_by_space(q + 1))
            return q + 1;
    }
    return 0;
}

std::size_t match_discourse_marker(std::string_view s, std::size_t p) {
    for (std::string_view marker : kDiscourseMarkers) {
        if (s.compare(p, marker.size(), marker) != 0) continue;
        std::size_t q = p + marker.size();
        if (q < s.size() && (s[q] == ' ' || s[q] == ',')) return q;
    }
    return 0;
}

}  // namespace

std::vector<RawStep> segment_steps(std::string_view s) {
    if (text::trim(s).empty()) throw EmptySolution("solution text is blank");

    // A position can start a step if it begins the text, a line, or follows
    // sentence-terminal punctuation.
    std::vector<bool> starts(s.size() + 1, false);
    std::vector<std::size_t> boundaries;
    {
        std::size_t i = 0;
        while (i < s.size() && text::is_space(s[i])) ++i;
        if (i < s.size()) {
            starts[i] = true;
            boundaries.push_back(i);
        }
        for (std::size_t k = 0; k < s.size(); ++k) {
            if (s[k] != '\n' && !is_terminal(s[k])) continue;
            std::size_t j = k + 1;
            if (is_terminal(s[k]) && (j >= s.size() || !text::is_space(s[j]))) continue;
            while (j < s.size() && text::is_space(s[j])) ++j;
            if (j < s.size()) starts[j] = true;
        }
    }

    std::vector<MarkerRange> marker_ranges;

    // Rule 1: explicit enumerations at step-start positions.
    for (std::size_t p = 0; p < s.size(); ++p) {
        if (!starts[p]) continue;
        if (std::size_t end = match_enum_marker(s, p)) {
            boundaries.push_back(p);
            marker_ranges.push_back({p, end});
        }
    }

    auto in_marker = [&](std::size_t pos) {
        for (const MarkerRange& r : marker_ranges)
            if (pos >= r.begin && pos < r.end) return true;
        return false;
    };
    auto follows_marker = [&](std::size_t pos) {
        for (const MarkerRange& r : marker_ranges) {
            if (r.end > pos) continue;
            bool only_ws = true;
            for (std::size_t q = r.end; q < pos; ++q)
                if (!text::is_space(s[q])) only_ws = false;
            if (only_ws) return true;
        }
        return false;
    };

    // Rule 2: discourse markers at sentence starts (but not right after an
    // enumeration marker, where they belong to the freshly opened step).
    for (std::size_t p = 0; p < s.size(); ++p) {
        if (!starts[p] || follows_marker(p)) continue;
        if (match_discourse_marker(s, p)) boundaries.push_back(p);
    }

    // Rule 3: sentence split on terminal punctuation + whitespace + capital
    // or digit. Decimal points and marker-internal dots are skipped.
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!is_terminal(s[i]) || in_marker(i)) continue;
        if (s[i] == '.' && i > 0 && text::is_ascii_digit(s[i - 1]) && i + 1 < s.size() &&
            text::is_ascii_digit(s[i + 1]))
            continue;
        std::size_t j = i + 1;
        if (j >= s.size() || !text::is_space(s[j])) continue;
        while (j < s.size() && text::is_space(s[j])) ++j;
        if (j < s.size() && (text::is_upper(s[j]) || text::is_ascii_digit(s[j])))
            boundaries.push_back(j);
    }

    std::sort(boundaries.begin(), boundaries.end());
    boundaries.erase(std::unique(boundaries.begin(), boundaries.end()), boundaries.end());
    boundaries.push_back(s.size());

    std::vector<RawStep> steps;
    for (std::size_t b = 0; b + 1 < boundaries.size(); ++b) {
        std::size_t lo = boundaries[b], hi = boundaries[b + 1];
        while (lo < hi && text::is_space(s[lo])) ++lo;
        while (hi > lo && text::is_space(s[hi - 1])) --hi;
        if (lo == hi) continue;
        RawStep step;
        step.index = steps.size();
        step.begin = lo;
        step.end = hi;
        step.text = std::string(s.substr(lo, hi - lo));
        steps.push_back(std::move(step));
    }
    return steps;
}

std::vector<OperationTag> classify_operations(const RawStep& step, const Lexicon& lexicon) {
    std::vector<OperationTag> tags;
    for (const LexiconMatch& m : find_lexicon_matches(step.text, lexicon)) {
        OperationKind kind = operation_from_name(m.tag);
        // "other" is reserved for untagged steps, so entries outside the
        // operation taxonomy never produce a tag.
        if (kind == OperationKind::other) continue;
        bool seen = std::any_of(tags.begin(), tags.end(),
                                [&](const OperationTag& t) { return t.name == kind; });
        if (!seen) tags.push_back(OperationTag{kind, m.lexeme});
    }
    return tags;
}

std::vector<ConceptTag> classify_concepts(const RawStep& step, const Lexicon& lexicon) {
    std::vector<ConceptTag> tags;
    for (const LexiconMatch& m : find_lexicon_matches(step.text, lexicon)) {
        bool seen = std::any_of(tags.begin(), tags.end(),
                                [&](const ConceptTag& t) { return t.name == m.tag; });
        if (!seen) tags.push_back(ConceptTag{m.tag, m.lexeme});
    }
    return tags;
}

ComplexityLevel complexity_from_features(const ComplexityFeatures& features,
                                         const ComplexityThresholds& thresholds) {
    int s = features.score();
    Level level = s <= thresholds.low_max    ? Level::low
                  : s <= thresholds.medium_max ? Level::medium
                                               : Level::high;
    return ComplexityLevel{level, level_weight(level), features};
}

ComplexityLevel estimate_step_complexity(const AnnotatedStep& step,
                                         const ComplexityThresholds& thresholds) {
    ComplexityFeatures f;
    f.math_token_count = static_cast<int>(scan_math_tokens(step.raw.text).size());
    f.max_nesting_depth = max_nesting_depth(step.raw.text);
    f.operation_count = static_cast<int>(step.operations.size());
    f.concept_count = static_cast<int>(step.concepts.size());
    return complexity_from_features(f, thresholds);
}

OperationKind dominant_operation(const AnnotatedStep& step) {
    for (OperationKind kind : kDominantPriority)
        for (const OperationTag& tag : step.operations)
            if (tag.name == kind) return kind;
    return OperationKind::other;
}

namespace {

// --- reference edge detection -----------------------------------------------

std::vector<std::string> lower_words(std::string_view s) {
    std::vector<std::string> words;
    std::string current;
    for (char c : text::to_lower(s)) {
        if (text::is_word_char(c)) {
            current.push_back(c);
        } else if (!current.empty()) {
            words.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) words.push_back(std::move(current));
    return words;
}

// "step 3" / "from step 3" style references to 1-based step numbers.
std::vector<std::size_t> referenced_step_numbers(std::string_view lowered) {
    std::vector<std::size_t> refs;
    std::size_t pos = 0;
    while ((pos = lowered.find("step ", pos)) != std::string_view::npos) {
        bool left_ok = pos == 0 || !text::is_word_char(lowered[pos - 1]);
        std::size_t q = pos + 5;
        std::size_t digits = q;
        std::size_t value = 0;
        while (q < lowered.size() && text::is_ascii_digit(lowered[q])) {
            value = value * 10 + static_cast<std::size_t>(lowered[q] - '0');
            ++q;
        }
        if (left_ok && q > digits && value > 0) refs.push_back(value);
        pos = q;
    }
    return refs;
}

}  // namespace

ReasoningFlow build_reasoning_graph(std::vector<AnnotatedStep> steps) {
    if (steps.empty()) throw EmptySolution("reasoning graph requires at least one step");

    ReasoningFlow flow;
    flow.steps = std::move(steps);
    const std::size_t n = flow.steps.size();

    for (std::size_t i = 0; i + 1 < n; ++i)
        flow.edges.push_back(Edge{i, i + 1, EdgeKind::sequential});

    // Earliest step introducing each single-letter intermediate via an
    // explicit "let/set/define/substitute X =" form.
    std::map<char, std::size_t> definer;
    for (std::size_t i = 0; i < n; ++i) {
        std::string lowered = text::to_lower(flow.steps[i].raw.text);
        for (std::string_view intro : {"let ", "set ", "define ", "substitute "}) {
            std::size_t pos = 0;
            while ((pos = lowered.find(intro, pos)) != std::string::npos) {
                std::size_t q = pos + intro.size();
                if (q + 1 < lowered.size() && text::is_ascii_alpha(lowered[q]) &&
                    !text::is_word_char(lowered[q + 1])) {
                    std::size_t r = q + 1;
                    while (r < lowered.size() && lowered[r] == ' ') ++r;
                    if (r < lowered.size() && lowered[r] == '=' && !definer.count(lowered[q]))
                        definer[lowered[q]] = i;
                }
                pos += intro.size();
            }
        }
    }

    std::set<std::pair<std::size_t, std::size_t>> refs;
    for (std::size_t i = 0; i < n; ++i) {
        std::string lowered = text::to_lower(flow.steps[i].raw.text);

        for (std::size_t number : referenced_step_numbers(lowered)) {
            std::size_t target = number - 1;
            if (target < i) refs.insert({target, i});
        }

        // "the <word> above" resolving to the earliest prior step that
        // mentions that word.
        std::vector<std::string> words = lower_words(lowered);
        for (std::size_t w = 2; w < words.size(); ++w) {
            if (words[w] != "above" || words[w - 2] != "the") continue;
            const std::string& referent = words[w - 1];
            for (std::size_t j = 0; j < i; ++j) {
                if (text::contains_word(text::to_lower(flow.steps[j].raw.text), referent)) {
                    refs.insert({j, i});
                    break;
                }
            }
        }

        for (const auto& [letter, def_idx] : definer) {
            if (def_idx >= i) continue;
            if (text::contains_word(lowered, std::string_view(&letter, 1)))
                refs.insert({def_idx, i});
        }
    }

    for (const auto& [from, to] : refs) {
        if (to == from + 1) continue;  // already covered by the sequential edge
        flow.edges.push_back(Edge{from, to, EdgeKind::reference});
    }

    // Summary statistics.
    FlowSummary& summary = flow.summary;
    summary.total_steps = n;
    std::set<std::string> concept_names;
    for (const AnnotatedStep& step : flow.steps) {
        summary.total_operation_count += step.operations.size();
        for (const ConceptTag& c : step.concepts) concept_names.insert(c.name);
        summary.reasoning_complexity_score += step.complexity.weight;
        summary.pattern_trace.emplace_back(operation_name(dominant_operation(step)));
    }
    summary.unique_concepts = concept_names.size();
    summary.avg_complexity_per_step =
        static_cast<double>(summary.reasoning_complexity_score) / static_cast<double>(n);
    return flow;
}

ReasoningFlow annotate(std::string_view solution_text, const Lexicon& operations,
                       const Lexicon& concepts, const ComplexityThresholds& thresholds) {
    std::vector<AnnotatedStep> annotated;
    for (RawStep& raw : segment_steps(solution_text)) {
        AnnotatedStep step;
        step.operations = classify_operations(raw, operations);
        step.concepts = classify_concepts(raw, concepts);
        step.raw = std::move(raw);
        step.complexity = estimate_step_complexity(step, thresholds);
        annotated.push_back(std::move(step));
    }
    return build_reasoning_graph(std::move(annotated));
}

}  // namespace mathlens::flow

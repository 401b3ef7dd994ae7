#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mathlens {

// Editable keyword taxonomy. File format, one entry per line:
//   tag: lexeme1, lexeme2, ...
// '#' starts a comment, blank lines are ignored. Matching is
// case-insensitive and whole-word for alphanumeric lexemes; lexemes that
// start or end with a symbol (∇, ∂, ...) match anywhere.
class Lexicon {
public:
    struct Entry {
        std::string tag;
        std::vector<std::string> lexemes;  // stored lowercased
    };

    static Lexicon parse(std::string_view config_text);
    static Lexicon load(const std::string& path);

    void add(std::string tag, std::vector<std::string> lexemes);
    const std::vector<Entry>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }

    bool operator==(const Lexicon& other) const;

private:
    std::vector<Entry> entries_;
};

struct LexiconMatch {
    std::string tag;
    std::string lexeme;   // the lexicon entry that triggered
    std::size_t position; // byte offset of the match in the haystack
};

// All matches of all entries, sorted by position then tag. The haystack is
// lowercased internally; positions refer to the original string.
std::vector<LexiconMatch> find_lexicon_matches(std::string_view haystack, const Lexicon& lexicon);

// Default taxonomies; identical to the files shipped under configs/.
const Lexicon& default_operation_lexicon();
const Lexicon& default_concept_lexicon();
const Lexicon& default_instruction_lexicon();

}  // namespace mathlens

#include <doctest.h>

#include "mathlens/lexicon.hpp"
#include "mathlens/sha256.hpp"
#include "mathlens/text.hpp"

using namespace mathlens;

TEST_CASE("lowercasing leaves UTF-8 symbols intact") {
    CHECK(text::to_lower("Find ∇F") == "find ∇f");
    CHECK(text::to_lower("X^2Y") == "x^2y");
}

TEST_CASE("whitespace normalization collapses runs and fixes punctuation gaps") {
    CHECK(text::normalize_whitespace("  a   b \t c  ") == "a b c");
    CHECK(text::normalize_whitespace("x , y .") == "x, y.");
    CHECK(text::normalize_whitespace("") == "");
}

TEST_CASE("whole-word containment") {
    CHECK(text::contains_word("the gradient above", "gradient"));
    CHECK_FALSE(text::contains_word("antiderivatives", "derivatives"));
    CHECK(text::contains_word("get u^4", "u"));
    CHECK_FALSE(text::contains_word("queue", "u"));
}

TEST_CASE("sha256 matches the FIPS test vectors") {
    CHECK(detail::sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(detail::sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(detail::sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
          "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST_CASE("lexicon files parse and match the built-in defaults") {
    Lexicon ops = Lexicon::load(std::string(MATHLENS_CONFIG_DIR) + "/operations.lex");
    Lexicon concepts = Lexicon::load(std::string(MATHLENS_CONFIG_DIR) + "/concepts.lex");
    Lexicon instructions = Lexicon::load(std::string(MATHLENS_CONFIG_DIR) + "/instructions.lex");
    CHECK(ops == default_operation_lexicon());
    CHECK(concepts == default_concept_lexicon());
    CHECK(instructions == default_instruction_lexicon());
}

TEST_CASE("lexicon matching is case-insensitive, whole-word, symbol-aware") {
    Lexicon lex;
    lex.add("gradient", {"gradient", "∇"});
    lex.add("chain rule", {"chain rule"});

    auto matches = find_lexicon_matches("Apply the Chain Rule to ∇f", lex);
    REQUIRE(matches.size() == 2);
    CHECK(matches[0].tag == "chain rule");
    CHECK(matches[1].tag == "gradient");

    CHECK(find_lexicon_matches("gradients", lex).empty());  // no partial-word hits
}

#include <doctest.h>

#include <random>

#include "knowmesh/errors.hpp"
#include "knowmesh/term.hpp"

using namespace knowmesh;

TEST_CASE("canonicalize applies the normalization rules") {
    CHECK(canonicalize("Lying time") == "lying_time");
    CHECK(canonicalize("user") == "user");
    CHECK(canonicalize("Swaps/hour") == "swaps_per_hour");
    CHECK(canonicalize("  Step  Count  ") == "step_count");
    CHECK(canonicalize("heart-rate") == "heart_rate");
    CHECK(canonicalize("A__B") == "a_b");
}

TEST_CASE("canonicalize rejects empty results") {
    CHECK_THROWS_AS(canonicalize(""), EmptyTerm);
    CHECK_THROWS_AS(canonicalize("   "), EmptyTerm);
    CHECK_THROWS_AS(canonicalize("__"), EmptyTerm);
    CHECK_THROWS_AS(canonicalize("!!"), EmptyTerm);
}

TEST_CASE("canonicalize is idempotent on random input") {
    std::mt19937_64 rng(7);
    const std::string alphabet = "aZ 9_/-.#";
    int produced = 0;
    for (int i = 0; i < 2000; ++i) {
        std::string raw;
        std::size_t len = 1 + rng() % 24;
        for (std::size_t j = 0; j < len; ++j) raw.push_back(alphabet[rng() % alphabet.size()]);
        try {
            std::string once = canonicalize(raw);
            CHECK(canonicalize(once) == once);
            ++produced;
        } catch (const EmptyTerm&) {
            // raw had no usable characters
        }
    }
    CHECK(produced > 1000);
}

TEST_CASE("checked terms must already be canonical") {
    CHECK(Term::checked("lying_time").text == "lying_time");
    CHECK_THROWS_AS(Term::checked("Lying time"), NonCanonicalTerm);
    CHECK_THROWS_AS(Term::checked("a__b"), NonCanonicalTerm);
}

TEST_CASE("unknown_fragments flags words missing from the dictionary") {
    std::set<Term> words = {Term("lying"), Term("time"), Term("swaps"), Term("per")};
    CHECK(unknown_fragments(Term("lying_time"), words).empty());
    auto missing = unknown_fragments(Term("swaps_per_hour"), words);
    REQUIRE(missing.size() == 1);
    CHECK(missing[0] == "hour");
}

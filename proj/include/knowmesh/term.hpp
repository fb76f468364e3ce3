#pragma once

#include <compare>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace knowmesh {

/// Normalizes a raw token into canonical form: lowercase, whitespace runs
/// become single underscores, '/' becomes "_per_", repeated underscores
/// collapse, leading/trailing underscores are trimmed. Any other character
/// outside [a-z0-9_] maps to '_'. Idempotent. Throws EmptyTerm when nothing
/// remains.
std::string canonicalize(std::string_view raw);

/// A canonical lowercase word token. Entities, predicates, attributes and
/// event labels are all Terms, so every name stays a human-readable word.
struct Term {
    std::string text;

    Term() = default;
    explicit Term(std::string text_) : text(std::move(text_)) {}

    /// Canonicalizes `raw` and wraps it.
    static Term canonical(std::string_view raw);
    /// Wraps `s`, requiring that it is already canonical (throws NonCanonicalTerm).
    static Term checked(std::string_view s);

    bool empty() const { return text.empty(); }
    auto operator<=>(const Term&) const = default;
};

/// Splits `t` on underscores and returns the fragments that are not covered
/// by `words`. An empty result means the term is built from known human
/// words; a non-empty result is reported (not rejected) by callers.
std::vector<std::string> unknown_fragments(const Term& t, const std::set<Term>& words);

}  // namespace knowmesh

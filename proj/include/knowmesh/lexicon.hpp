#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>

#include "knowmesh/term.hpp"

namespace knowmesh {

/// Static language knowledge loaded from a data file: synonym sets, category
/// labels, and part-of-speech tags. Immutable after load; share freely.
struct Lexicon {
    std::map<Term, std::set<Term>> synonyms;  // symmetric after load
    std::map<Term, Term> categories;
    std::map<Term, Term> pos;  // noun | verb | adjective
    std::set<Term> dictionary;

    bool empty() const {
        return synonyms.empty() && categories.empty() && pos.empty() && dictionary.empty();
    }
};

/// Parses the lexicon text format:
///   syn head: w1, w2, ...
///   cat word: category
///   pos word: noun|verb|adjective
///   word w
/// plus blank lines and # comments. Applies the symmetric closure to synonym
/// pairs and collects every mentioned term into the dictionary. Throws
/// ParseError / NonCanonicalTerm.
Lexicon load_lexicon(const std::string& text);

/// Canonical text form; load(save(lex)) == lex.
std::string save_lexicon(const Lexicon& lex);

/// Synonyms of `t`, never containing `t` itself; empty for unknown terms.
std::set<Term> lookup_synonyms(const Lexicon& lex, const Term& t);
std::optional<Term> lookup_category(const Lexicon& lex, const Term& t);
std::optional<Term> lookup_pos(const Lexicon& lex, const Term& t);

}  // namespace knowmesh

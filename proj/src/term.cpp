#include "knowmesh/term.hpp"

#include <cctype>

#include "knowmesh/errors.hpp"

namespace knowmesh {

std::string canonicalize(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        unsigned char uc = static_cast<unsigned char>(c);
        if (std::isalnum(uc)) {
            out.push_back(static_cast<char>(std::tolower(uc)));
        } else if (c == '/') {
            out += "_per_";
        } else {
            out.push_back('_');  // whitespace and punctuation
        }
    }
    // collapse runs of underscores
    std::string collapsed;
    collapsed.reserve(out.size());
    for (char c : out) {
        if (c == '_' && !collapsed.empty() && collapsed.back() == '_') continue;
        collapsed.push_back(c);
    }
    while (!collapsed.empty() && collapsed.front() == '_') collapsed.erase(collapsed.begin());
    while (!collapsed.empty() && collapsed.back() == '_') collapsed.pop_back();
    if (collapsed.empty()) throw EmptyTerm("term is empty after normalization");
    return collapsed;
}

Term Term::canonical(std::string_view raw) { return Term(canonicalize(raw)); }

Term Term::checked(std::string_view s) {
    std::string c = canonicalize(s);
    if (c != s) throw NonCanonicalTerm("term '" + std::string(s) + "' is not canonical");
    return Term(std::move(c));
}

std::vector<std::string> unknown_fragments(const Term& t, const std::set<Term>& words) {
    std::vector<std::string> unknown;
    std::size_t pos = 0;
    while (pos <= t.text.size()) {
        std::size_t next = t.text.find('_', pos);
        if (next == std::string::npos) next = t.text.size();
        std::string frag = t.text.substr(pos, next - pos);
        if (!frag.empty() && !words.contains(Term(frag))) unknown.push_back(frag);
        pos = next + 1;
    }
    return unknown;
}

}  // namespace knowmesh

#include "knowmesh/lexicon.hpp"

#include <sstream>

#include "knowmesh/errors.hpp"

namespace knowmesh {

namespace {
std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

Term checked_term(const std::string& token, std::size_t line_no) {
    try {
        return Term::checked(trim(token));
    } catch (const std::runtime_error& e) {
        throw ParseError(line_no, e.what());
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, sep)) out.push_back(item);
    return out;
}

const std::set<Term>& pos_tags() {
    static const std::set<Term> tags = {Term("noun"), Term("verb"), Term("adjective")};
    return tags;
}
}  // namespace

Lexicon load_lexicon(const std::string& text) {
    Lexicon lex;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string body = trim(line);
        if (body.empty() || body[0] == '#') continue;
        std::size_t sp = body.find(' ');
        if (sp == std::string::npos) throw ParseError(line_no, "expected '<kind> <args>'");
        std::string kind = body.substr(0, sp);
        std::string rest = trim(body.substr(sp + 1));
        if (kind == "word") {
            lex.dictionary.insert(checked_term(rest, line_no));
            continue;
        }
        std::size_t colon = rest.find(':');
        if (colon == std::string::npos) throw ParseError(line_no, "expected '<head>: <values>'");
        Term head = checked_term(rest.substr(0, colon), line_no);
        std::string values = rest.substr(colon + 1);
        lex.dictionary.insert(head);
        if (kind == "syn") {
            for (const std::string& tok : split(values, ',')) {
                Term w = checked_term(tok, line_no);
                if (w == head) continue;
                lex.synonyms[head].insert(w);
                lex.synonyms[w].insert(head);  // symmetric closure
                lex.dictionary.insert(w);
            }
        } else if (kind == "cat") {
            Term cat = checked_term(values, line_no);
            lex.categories[head] = cat;
            lex.dictionary.insert(cat);
        } else if (kind == "pos") {
            Term tag = checked_term(values, line_no);
            if (!pos_tags().contains(tag))
                throw ParseError(line_no, "pos must be noun, verb or adjective");
            lex.pos[head] = tag;
        } else {
            throw ParseError(line_no, "unknown entry kind '" + kind + "'");
        }
    }
    return lex;
}

std::string save_lexicon(const Lexicon& lex) {
    std::ostringstream os;
    for (const auto& [head, words] : lex.synonyms) {
        os << "syn " << head.text << ":";
        bool first = true;
        for (const Term& w : words) {
            os << (first ? " " : ", ") << w.text;
            first = false;
        }
        os << '\n';
    }
    for (const auto& [word, cat] : lex.categories) os << "cat " << word.text << ": " << cat.text << '\n';
    for (const auto& [word, tag] : lex.pos) os << "pos " << word.text << ": " << tag.text << '\n';
    for (const Term& w : lex.dictionary) os << "word " << w.text << '\n';
    return os.str();
}

std::set<Term> lookup_synonyms(const Lexicon& lex, const Term& t) {
    auto it = lex.synonyms.find(t);
    if (it == lex.synonyms.end()) return {};
    std::set<Term> out = it->second;
    out.erase(t);
    return out;
}

std::optional<Term> lookup_category(const Lexicon& lex, const Term& t) {
    auto it = lex.categories.find(t);
    if (it == lex.categories.end()) return std::nullopt;
    return it->second;
}

std::optional<Term> lookup_pos(const Lexicon& lex, const Term& t) {
    auto it = lex.pos.find(t);
    if (it == lex.pos.end()) return std::nullopt;
    return it->second;
}

}  // namespace knowmesh

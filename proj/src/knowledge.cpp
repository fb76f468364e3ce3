#include "knowmesh/knowledge.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "knowmesh/errors.hpp"

namespace knowmesh {

const char* to_string(KnowledgeLevel level) {
    switch (level) {
        case KnowledgeLevel::Primary: return "primary";
        case KnowledgeLevel::Secondary: return "secondary";
        case KnowledgeLevel::Invented: return "invented";
    }
    return "?";
}

std::optional<KnowledgeLevel> level_from_string(std::string_view s) {
    if (s == "primary") return KnowledgeLevel::Primary;
    if (s == "secondary") return KnowledgeLevel::Secondary;
    if (s == "invented") return KnowledgeLevel::Invented;
    return std::nullopt;
}

const std::set<Term>& default_predicates() {
    static const std::set<Term> preds = {
        Term("element_of"), Term("unit_of"),       Term("measured_by"),
        Term("carried_by"), Term("attached_to"),   Term("has"),
        Term("is_a"),       Term("synonymous_to"), Term("classifies"),
    };
    return preds;
}

const std::set<Term>& functional_predicates() {
    static const std::set<Term> preds = {
        Term("element_of"),
        Term("unit_of"),
        Term("measured_by"),
    };
    return preds;
}

KnowledgeStore::KnowledgeStore() : predicates_(default_predicates()) {}

std::map<TripleKey, Triple>& KnowledgeStore::partition(KnowledgeLevel level) {
    switch (level) {
        case KnowledgeLevel::Primary: return ontology_;
        case KnowledgeLevel::Secondary: return parameters_;
        case KnowledgeLevel::Invented: return hypotheses_;
    }
    return ontology_;
}

const std::map<TripleKey, Triple>& KnowledgeStore::partition(KnowledgeLevel level) const {
    switch (level) {
        case KnowledgeLevel::Primary: return ontology_;
        case KnowledgeLevel::Secondary: return parameters_;
        case KnowledgeLevel::Invented: return hypotheses_;
    }
    return ontology_;
}

void KnowledgeStore::assert_triple(const Triple& t) {
    if (!predicates_.contains(t.predicate))
        throw UnknownPredicate("predicate '" + t.predicate.text + "' not in vocabulary");
    TripleKey key(t);
    if (auto existing = level_of(key)) {
        if (*existing != t.level)
            throw LevelConflict("triple (" + key.subject.text + ", " + key.predicate.text + ", " +
                                key.object.text + ") already stored at level " +
                                to_string(*existing));
        provenance_[key].emplace_back(t.source, t.asserted_at);
        return;
    }
    // functional-relation conflict: same subject+predicate, different object
    if (t.level == KnowledgeLevel::Primary && functional_predicates().contains(t.predicate)) {
        for (const auto& [k, existing] : ontology_) {
            if (k.subject == t.subject && k.predicate == t.predicate && k.object != t.object &&
                existing.source != t.source) {
                conflicts_.insert(k);
                conflicts_.insert(key);
            }
        }
    }
    partition(t.level).emplace(key, t);
}

void KnowledgeStore::move_triple(const TripleKey& key, KnowledgeLevel to,
                                 const std::string& source, Tick tick) {
    Triple t;
    if (auto existing = level_of(key)) {
        if (*existing == to) {  // already there; keep original provenance
            provenance_[key].emplace_back(source, tick);
            return;
        }
        t = partition(*existing).at(key);
        partition(*existing).erase(key);
    } else {
        t.subject = key.subject;
        t.predicate = key.predicate;
        t.object = key.object;
    }
    t.level = to;
    t.source = source;
    t.asserted_at = tick;
    if (!predicates_.contains(t.predicate))
        throw UnknownPredicate("predicate '" + t.predicate.text + "' not in vocabulary");
    partition(to).emplace(key, t);
}

bool KnowledgeStore::remove_triple(const TripleKey& key) {
    if (auto existing = level_of(key)) {
        partition(*existing).erase(key);
        conflicts_.erase(key);
        provenance_.erase(key);
        return true;
    }
    return false;
}

bool KnowledgeStore::contains(const TripleKey& key) const { return level_of(key).has_value(); }

std::optional<KnowledgeLevel> KnowledgeStore::level_of(const TripleKey& key) const {
    if (ontology_.contains(key)) return KnowledgeLevel::Primary;
    if (parameters_.contains(key)) return KnowledgeLevel::Secondary;
    if (hypotheses_.contains(key)) return KnowledgeLevel::Invented;
    return std::nullopt;
}

namespace {
bool matches(const Triple& t, const TriplePattern& p) {
    if (p.subject && *p.subject != t.subject) return false;
    if (p.predicate && *p.predicate != t.predicate) return false;
    if (p.object && *p.object != t.object) return false;
    return true;
}

TriplePattern flipped(const TriplePattern& p) {
    TriplePattern f;
    f.subject = p.object;
    f.predicate = p.predicate;
    f.object = p.subject;
    return f;
}
}  // namespace

std::vector<Triple> KnowledgeStore::query(const TriplePattern& pattern,
                                          std::optional<KnowledgeLevel> level_filter) const {
    static const Term kSynonymous("synonymous_to");
    bool symmetric = pattern.predicate && *pattern.predicate == kSynonymous;
    std::vector<Triple> out;
    auto scan = [&](const std::map<TripleKey, Triple>& part) {
        for (const auto& [key, t] : part) {
            if (matches(t, pattern) || (symmetric && matches(t, flipped(pattern))))
                out.push_back(t);
        }
    };
    if (level_filter) {
        scan(partition(*level_filter));
    } else {
        scan(ontology_);
        scan(parameters_);
        scan(hypotheses_);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {
// adjacency over asserted (Primary + Secondary) triples
std::map<Term, std::vector<Triple>> asserted_adjacency(const KnowledgeStore& store) {
    std::map<Term, std::vector<Triple>> adj;
    for (const auto& [key, t] : store.ontology()) adj[t.subject].push_back(t);
    for (const auto& [key, t] : store.parameter_triples()) adj[t.subject].push_back(t);
    for (auto& [term, edges] : adj) std::sort(edges.begin(), edges.end());
    return adj;
}

bool path_less(const Path& a, const Path& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}
}  // namespace

std::vector<Path> KnowledgeStore::find_paths(const Term& from, const Term& to,
                                             int max_len) const {
    std::vector<Path> out;
    if (from == to) {
        out.push_back({});
        return out;
    }
    auto adj = asserted_adjacency(*this);
    Path current;
    std::set<Term> visited{from};
    auto dfs = [&](auto&& self, const Term& at) -> void {
        if (static_cast<int>(current.size()) >= max_len) return;
        auto it = adj.find(at);
        if (it == adj.end()) return;
        for (const Triple& edge : it->second) {
            if (visited.contains(edge.object)) continue;  // simple paths only
            current.push_back(edge);
            if (edge.object == to) {
                out.push_back(current);
            } else {
                visited.insert(edge.object);
                self(self, edge.object);
                visited.erase(edge.object);
            }
            current.pop_back();
        }
    };
    dfs(dfs, from);
    std::sort(out.begin(), out.end(), path_less);
    return out;
}

std::vector<Term> KnowledgeStore::reachable(const Term& from, int max_len) const {
    auto adj = asserted_adjacency(*this);
    std::set<Term> seen{from};
    std::vector<Term> frontier{from};
    for (int depth = 0; depth < max_len && !frontier.empty(); ++depth) {
        std::vector<Term> next;
        for (const Term& at : frontier) {
            auto it = adj.find(at);
            if (it == adj.end()) continue;
            for (const Triple& edge : it->second) {
                if (seen.insert(edge.object).second) next.push_back(edge.object);
            }
        }
        frontier = std::move(next);
    }
    seen.erase(from);
    return {seen.begin(), seen.end()};
}

bool KnowledgeStore::has_outgoing(const Term& entity) const {
    for (const auto& [key, t] : ontology_)
        if (t.subject == entity) return true;
    for (const auto& [key, t] : parameters_)
        if (t.subject == entity) return true;
    return false;
}

bool KnowledgeStore::mentions(const Term& entity) const {
    for (const auto* part : {&ontology_, &parameters_, &hypotheses_})
        for (const auto& [key, t] : *part)
            if (t.subject == entity || t.object == entity) return true;
    return false;
}

void KnowledgeStore::record_observation(Observation obs) {
    observations_.push_back(std::move(obs));
}

std::vector<Observation> KnowledgeStore::local_samples(const Term& attribute) const {
    std::vector<Observation> out;
    for (const Observation& o : observations_)
        if (o.attribute == attribute && !o.quarantined && o.numeric && o.label) out.push_back(o);
    return out;
}

void KnowledgeStore::release_quarantine(const Term& attribute) {
    for (Observation& o : observations_)
        if (o.attribute == attribute) o.quarantined = false;
}

std::vector<Triple> KnowledgeStore::all_triples() const {
    std::vector<Triple> out;
    for (const auto* part : {&ontology_, &parameters_, &hypotheses_})
        for (const auto& [key, t] : *part) out.push_back(t);
    std::sort(out.begin(), out.end());
    return out;
}

bool KnowledgeStore::empty() const {
    return ontology_.empty() && parameters_.empty() && hypotheses_.empty() &&
           observations_.empty();
}

void KnowledgeStore::extend_predicates(const std::set<Term>& extra) {
    predicates_.insert(extra.begin(), extra.end());
}

bool KnowledgeStore::partitions_consistent() const {
    auto check = [](const std::map<TripleKey, Triple>& part, KnowledgeLevel expect) {
        for (const auto& [key, t] : part) {
            if (t.level != expect) return false;
            if (TripleKey(t) != key) return false;
        }
        return true;
    };
    if (!check(ontology_, KnowledgeLevel::Primary)) return false;
    if (!check(parameters_, KnowledgeLevel::Secondary)) return false;
    if (!check(hypotheses_, KnowledgeLevel::Invented)) return false;
    for (const auto& [key, t] : ontology_)
        if (parameters_.contains(key) || hypotheses_.contains(key)) return false;
    for (const auto& [key, t] : parameters_)
        if (hypotheses_.contains(key)) return false;
    return true;
}

bool KnowledgeStore::operator==(const KnowledgeStore& other) const {
    if (ontology_ != other.ontology_ || parameters_ != other.parameters_ ||
        hypotheses_ != other.hypotheses_)
        return false;
    auto sorted = [](std::vector<Observation> v) {
        std::sort(v.begin(), v.end());
        return v;
    };
    return sorted(observations_) == sorted(other.observations_);
}

// --- serialization ---------------------------------------------------------

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::optional<double> parse_number(std::string_view s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::string triple_line(const Triple& t) {
    std::ostringstream os;
    os << "T\t" << to_string(t.level) << '\t' << t.subject.text << '\t' << t.predicate.text
       << '\t' << t.object.text << '\t' << t.source << '\t' << t.asserted_at;
    return os.str();
}

std::string observation_line(const Observation& o) {
    std::ostringstream os;
    os << "O\t" << o.attribute.text << '\t'
       << (o.numeric ? format_number(o.number) : o.label_value.text) << '\t'
       << (o.unit.empty() ? "-" : o.unit.text) << '\t' << (o.label ? o.label->text : "-") << '\t'
       << o.timestamp << '\t' << o.source << '\t' << (o.quarantined ? 'q' : 'l');
    return os.str();
}

namespace {
constexpr char kStoreHeader[] = "knowmesh-store v1";

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
        std::size_t next = line.find('\t', pos);
        if (next == std::string::npos) {
            fields.push_back(line.substr(pos));
            break;
        }
        fields.push_back(line.substr(pos, next - pos));
        pos = next + 1;
    }
    return fields;
}

Tick parse_tick(const std::string& s, std::size_t line_no) {
    Tick v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ParseError(line_no, "bad tick '" + s + "'");
    return v;
}

Triple parse_triple_fields(const std::vector<std::string>& f, std::size_t line_no) {
    if (f.size() != 7) throw ParseError(line_no, "triple record needs 7 fields");
    Triple t;
    auto level = level_from_string(f[1]);
    if (!level) throw ParseError(line_no, "unknown level '" + f[1] + "'");
    t.level = *level;
    try {
        t.subject = Term::checked(f[2]);
        t.predicate = Term::checked(f[3]);
        t.object = Term::checked(f[4]);
    } catch (const std::runtime_error& e) {
        throw ParseError(line_no, e.what());
    }
    t.source = f[5];
    t.asserted_at = parse_tick(f[6], line_no);
    return t;
}

Observation parse_observation_fields(const std::vector<std::string>& f, std::size_t line_no) {
    if (f.size() != 8) throw ParseError(line_no, "observation record needs 8 fields");
    Observation o;
    try {
        o.attribute = Term::checked(f[1]);
        if (auto num = parse_number(f[2])) {
            o.numeric = true;
            o.number = *num;
        } else {
            o.numeric = false;
            o.label_value = Term::checked(f[2]);
        }
        if (f[3] != "-") o.unit = Term::checked(f[3]);
        if (f[4] != "-") o.label = Term::checked(f[4]);
    } catch (const ParseError&) {
        throw;
    } catch (const std::runtime_error& e) {
        throw ParseError(line_no, e.what());
    }
    o.timestamp = parse_tick(f[5], line_no);
    o.source = f[6];
    if (f[7] == "q")
        o.quarantined = true;
    else if (f[7] == "l")
        o.quarantined = false;
    else
        throw ParseError(line_no, "quarantine flag must be q or l");
    return o;
}
}  // namespace

std::string serialize_store(const KnowledgeStore& store) {
    std::vector<std::string> lines;
    for (const Triple& t : store.all_triples()) lines.push_back(triple_line(t));
    for (const Observation& o : store.observations()) lines.push_back(observation_line(o));
    std::sort(lines.begin(), lines.end());
    std::string out = kStoreHeader;
    out.push_back('\n');
    for (const std::string& line : lines) {
        out += line;
        out.push_back('\n');
    }
    return out;
}

KnowledgeStore deserialize_store(const std::string& text) {
    KnowledgeStore store;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    bool saw_header = false;
    std::set<Term> extra_predicates;
    while (std::getline(in, line)) {
        ++line_no;
        if (!saw_header) {
            if (line != kStoreHeader)
                throw ParseError(line_no, "expected header '" + std::string(kStoreHeader) + "'");
            saw_header = true;
            continue;
        }
        if (line.empty()) continue;
        auto fields = split_tabs(line);
        if (fields[0] == "T") {
            Triple t = parse_triple_fields(fields, line_no);
            if (!store.predicates().contains(t.predicate)) extra_predicates.insert(t.predicate);
            store.extend_predicates(extra_predicates);
            store.assert_triple(t);
        } else if (fields[0] == "O") {
            store.record_observation(parse_observation_fields(fields, line_no));
        } else {
            throw ParseError(line_no, "unknown record kind '" + fields[0] + "'");
        }
    }
    if (!saw_header) throw ParseError(line_no, "missing store header");
    return store;
}

}  // namespace knowmesh

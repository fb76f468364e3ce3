#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "knowmesh/term.hpp"

namespace knowmesh {

using Tick = std::int64_t;

enum class KnowledgeLevel { Primary, Secondary, Invented };

const char* to_string(KnowledgeLevel level);
std::optional<KnowledgeLevel> level_from_string(std::string_view s);

/// A subject-predicate-object fact. Identity is (subject, predicate, object);
/// level/source/asserted_at are bookkeeping and do not participate in the key.
struct Triple {
    Term subject;
    Term predicate;
    Term object;
    KnowledgeLevel level = KnowledgeLevel::Primary;
    std::string source;       // node id that asserted it
    Tick asserted_at = 0;

    auto operator<=>(const Triple&) const = default;
};

struct TripleKey {
    Term subject;
    Term predicate;
    Term object;

    TripleKey() = default;
    TripleKey(Term s, Term p, Term o)
        : subject(std::move(s)), predicate(std::move(p)), object(std::move(o)) {}
    explicit TripleKey(const Triple& t)
        : subject(t.subject), predicate(t.predicate), object(t.object) {}

    auto operator<=>(const TripleKey&) const = default;
};

/// A timestamped sample from a sensor stream. The value is either a number
/// with an optional unit, or a label term. `label` is the supervision tag
/// used for induction. Foreign samples arrive quarantined and stay out of
/// induction until released.
struct Observation {
    Term attribute;
    bool numeric = true;
    double number = 0.0;
    Term unit;                 // empty when none
    Term label_value;          // set when !numeric
    std::optional<Term> label;
    Tick timestamp = 0;
    std::string source;
    bool quarantined = false;

    auto operator<=>(const Observation&) const = default;
};

struct TriplePattern {
    std::optional<Term> subject;
    std::optional<Term> predicate;
    std::optional<Term> object;
};

/// A directed path, following triples subject -> object. Empty = trivial path.
using Path = std::vector<Triple>;

/// The relations used by the built-in scenarios. Scenarios may extend the
/// vocabulary declaratively.
const std::set<Term>& default_predicates();
/// Single-valued relations: a second Primary object for the same subject and
/// predicate is kept but flagged as a conflict instead of replacing anything.
const std::set<Term>& functional_predicates();

/// Per-node knowledge, partitioned by level: ontology (Primary), parameters
/// (Secondary triples plus the observation log), hypotheses (Invented).
/// Pure value; copy/move freely, no internal sharing.
class KnowledgeStore {
public:
    KnowledgeStore();

    // --- triples ---------------------------------------------------------
    /// Stores `t` in the partition matching its level. Re-asserting the same
    /// key at the same level is a no-op that records extra provenance.
    /// Throws LevelConflict when the key exists at a different level and
    /// UnknownPredicate when the predicate is not in the vocabulary.
    void assert_triple(const Triple& t);
    /// Lifecycle move: relocates the triple to the partition of `to`,
    /// updating its level. Inserts when absent. Never throws LevelConflict.
    void move_triple(const TripleKey& key, KnowledgeLevel to, const std::string& source,
                     Tick tick);
    /// Removes the triple wherever it lives. Returns false when absent.
    bool remove_triple(const TripleKey& key);
    bool contains(const TripleKey& key) const;
    std::optional<KnowledgeLevel> level_of(const TripleKey& key) const;

    /// All triples matching the pattern, in lexicographic order. A bound
    /// synonymous_to pattern also matches stored triples in the reverse
    /// orientation (synonymy is stored directionally, queried symmetrically).
    std::vector<Triple> query(const TriplePattern& pattern,
                              std::optional<KnowledgeLevel> level_filter = std::nullopt) const;

    /// All simple directed paths from -> to of length <= max_len over the
    /// asserted knowledge (Primary + Secondary), shortest first, then
    /// lexicographic. from == to yields the single empty path.
    std::vector<Path> find_paths(const Term& from, const Term& to, int max_len) const;
    /// Entities reachable from `from` within max_len edges (excluding `from`).
    std::vector<Term> reachable(const Term& from, int max_len) const;
    bool has_outgoing(const Term& entity) const;
    /// True when any asserted triple mentions the entity.
    bool mentions(const Term& entity) const;

    // --- observations ----------------------------------------------------
    void record_observation(Observation obs);
    const std::vector<Observation>& observations() const { return observations_; }
    /// Local (non-quarantined) numeric labeled samples for one attribute.
    std::vector<Observation> local_samples(const Term& attribute) const;
    /// Clears the quarantine flag on foreign samples of `attribute`.
    void release_quarantine(const Term& attribute);

    // --- partitions ------------------------------------------------------
    const std::map<TripleKey, Triple>& ontology() const { return ontology_; }
    const std::map<TripleKey, Triple>& parameter_triples() const { return parameters_; }
    const std::map<TripleKey, Triple>& hypothesis_triples() const { return hypotheses_; }
    std::vector<Triple> all_triples() const;
    bool empty() const;

    /// Keys flagged because two sources asserted different objects for the
    /// same functional (subject, predicate).
    const std::set<TripleKey>& conflicts() const { return conflicts_; }
    /// Extra (source, tick) records from duplicate assertions.
    const std::map<TripleKey, std::vector<std::pair<std::string, Tick>>>& provenance() const {
        return provenance_;
    }

    // --- vocabulary ------------------------------------------------------
    void extend_predicates(const std::set<Term>& extra);
    const std::set<Term>& predicates() const { return predicates_; }

    /// Verifies the partition discipline: every triple lives in exactly the
    /// partition matching its level, and no key appears twice.
    bool partitions_consistent() const;

    /// Content equality: partitions match field-for-field and the observation
    /// logs hold the same samples (order-insensitive).
    bool operator==(const KnowledgeStore& other) const;

private:
    std::map<TripleKey, Triple>& partition(KnowledgeLevel level);
    const std::map<TripleKey, Triple>& partition(KnowledgeLevel level) const;

    std::map<TripleKey, Triple> ontology_;    // Primary
    std::map<TripleKey, Triple> parameters_;  // Secondary
    std::map<TripleKey, Triple> hypotheses_;  // Invented
    std::vector<Observation> observations_;
    std::set<TripleKey> conflicts_;
    std::map<TripleKey, std::vector<std::pair<std::string, Tick>>> provenance_;
    std::set<Term> predicates_;
};

/// Line-based text form: header `knowmesh-store v1`, then one record per
/// line, sorted. Round trip is the identity on store content.
std::string serialize_store(const KnowledgeStore& store);
KnowledgeStore deserialize_store(const std::string& text);

std::string format_number(double v);
std::optional<double> parse_number(std::string_view s);

std::string triple_line(const Triple& t);
std::string observation_line(const Observation& o);

}  // namespace knowmesh

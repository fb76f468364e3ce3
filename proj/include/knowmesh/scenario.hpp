#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "knowmesh/lexicon.hpp"
#include "knowmesh/lifecycle.hpp"
#include "knowmesh/netsim.hpp"
#include "knowmesh/stream.hpp"

namespace knowmesh {

struct TripleInjection {
    std::string node;
    Triple triple;
    Tick at = 0;  // 0 = initial store content
};

struct ScheduledActionSpec {
    Tick tick = 0;
    std::string action;  // broadcast_query | run_induction | run_verification |
                         // extract_events | push_secondary
    std::string node;
    std::map<std::string, std::string> args;
};

/// A declarative experiment: topology, deployment model, initial knowledge,
/// synthetic streams, lifecycle schedule, thresholds, and the seed.
/// Sectioned key-value text format; see the repository README.
struct Scenario {
    std::string name;
    int model = 3;
    std::uint64_t seed = 0;
    Tick duration = 0;
    std::vector<NodeInfo> nodes;
    std::vector<Link> links;
    std::vector<ProtocolProfile> profiles;  // defaults with overrides applied
    std::vector<TripleInjection> triples;
    std::vector<StreamSpec> streams;
    std::vector<ScheduledActionSpec> schedule;
    Thresholds thresholds;
    std::string lexicon_file;  // as written in the file; resolved by the caller
    std::set<Term> vocabulary;
    std::set<Term> extra_predicates;
};

/// Parses and fully validates a scenario document. Unknown sections, unknown
/// keys and dangling references are rejected. Throws ParseError /
/// ValidationError.
Scenario load_scenario(const std::string& text);

void validate_scenario(const Scenario& s);

/// Human-word check: flags every term in the scenario whose underscore
/// fragments are not all covered by the lexicon dictionary or the declared
/// vocabulary. Returned strings are report lines, not errors.
std::vector<std::string> vocabulary_warnings(const Scenario& s, const Lexicon& lex);

}  // namespace knowmesh

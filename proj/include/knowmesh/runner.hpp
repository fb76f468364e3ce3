#pragma once

#include <map>
#include <optional>
#include <string>

#include "knowmesh/scenario.hpp"
#include "knowmesh/smart_object.hpp"
#include "knowmesh/trace.hpp"

namespace knowmesh {

struct RunOptions {
    std::optional<std::uint64_t> seed;  // overrides the scenario seed
    std::optional<Tick> until;          // overrides the scenario duration
};

struct RunResult {
    std::map<std::string, KnowledgeStore> stores;            // per smart object
    std::map<std::string, std::map<TripleKey, Hypothesis>> hypotheses;
    std::string trace_text;
    TraceLog trace;
};

/// Executes the scenario: scheduled queries fan out over the simulated
/// links, replies merge knowledge, streams feed the stores, induction
/// promotes or rejects attributes, rejections trigger abduction, and
/// verification sweeps settle hypotheses. Identical inputs produce
/// byte-identical traces and store dumps.
RunResult run_scenario(const Scenario& scenario, const Lexicon& lexicon,
                       const RunOptions& options = {});

/// Canonical store text (same format the stores serialize to).
std::string dump_store(const KnowledgeStore& store);

}  // namespace knowmesh

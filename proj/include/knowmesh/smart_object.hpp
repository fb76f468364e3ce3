#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "knowmesh/lifecycle.hpp"
#include "knowmesh/message.hpp"

namespace knowmesh {

struct PendingRequest {
    MessageKind kind = MessageKind::QueryPrimary;
    std::vector<Term> terms;
};

struct PeerService {
    std::string peer;
    Term service;
    KnowledgeLevel level = KnowledgeLevel::Primary;
};

/// One autonomous agent: its knowledge store, hypothesis counters, induced
/// classifiers, outstanding request correlations, and what peers advertise.
struct SmartObject {
    std::string id;
    KnowledgeStore store;
    std::map<TripleKey, Hypothesis> hypotheses;  // mirrors the invented partition
    std::map<Term, IntervalRule> rules;
    std::map<std::uint64_t, PendingRequest> pending;
    std::vector<PeerService> peer_services;
    std::uint64_t next_correlation = 1;
    Tick now = 0;
};

struct HandleResult {
    std::vector<Message> outgoing;
    std::vector<std::string> notes;  // trace-worthy remarks (drops, merges)
};

/// Builds a primary-knowledge query for the given kinds and registers its
/// correlation so the replies are accepted later.
Message make_query_primary(SmartObject& so, std::vector<Term> kinds);

/// Builds an unsolicited secondary push (correlation 0) carrying the local
/// samples of the given attributes.
Message make_secondary_push(const SmartObject& so, const std::vector<Term>& attributes);

/// The per-message transition function:
///  - QueryPrimary: answer with every Primary (?, element_of, kind) triple.
///  - ReplyPrimary: merge into the ontology with source = sender, then query
///    the sender's secondary knowledge for newly learned sensor attributes.
///  - QuerySecondary: answer with matching local samples.
///  - ReplySecondary: record every sample quarantined.
///  - Advertise: remember the peer's services.
/// Replies without a matching pending correlation are dropped with a note.
HandleResult handle_message(SmartObject& so, const Message& m);

/// Advertisement of the store's services: promoted classifiers at Primary,
/// locally sampled attributes at Secondary, open hypotheses at Invented.
/// Nothing to advertise yields no message.
std::optional<Message> advertise_services(const KnowledgeStore& store, const std::string& sender);

}  // namespace knowmesh

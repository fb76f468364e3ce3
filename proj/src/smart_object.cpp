#include "knowmesh/smart_object.hpp"

#include <algorithm>

#include "knowmesh/errors.hpp"

namespace knowmesh {

namespace {
const Term kElementOf("element_of");
const Term kSensor("sensor");
const Term kClassifies("classifies");

Message reply_shell(const SmartObject& so, const Message& query, MessageKind kind) {
    Message reply;
    reply.kind = kind;
    reply.sender = so.id;
    reply.correlation = query.correlation;
    return reply;
}
}  // namespace

Message make_query_primary(SmartObject& so, std::vector<Term> kinds) {
    Message m;
    m.kind = MessageKind::QueryPrimary;
    m.sender = so.id;
    m.correlation = so.next_correlation++;
    m.level_tag = KnowledgeLevel::Primary;
    std::sort(kinds.begin(), kinds.end());
    kinds.erase(std::unique(kinds.begin(), kinds.end()), kinds.end());
    m.terms = kinds;
    so.pending[m.correlation] = PendingRequest{MessageKind::QueryPrimary, m.terms};
    return m;
}

Message make_secondary_push(const SmartObject& so, const std::vector<Term>& attributes) {
    Message m;
    m.kind = MessageKind::ReplySecondary;
    m.sender = so.id;
    m.correlation = 0;  // unsolicited
    m.level_tag = KnowledgeLevel::Secondary;
    for (const Observation& o : so.store.observations()) {
        if (o.quarantined) continue;
        if (std::find(attributes.begin(), attributes.end(), o.attribute) == attributes.end())
            continue;
        m.observations.push_back(o);
    }
    return m;
}

HandleResult handle_message(SmartObject& so, const Message& m) {
    HandleResult result;
    switch (m.kind) {
        case MessageKind::QueryPrimary: {
            Message reply = reply_shell(so, m, MessageKind::ReplyPrimary);
            reply.level_tag = KnowledgeLevel::Primary;
            for (const Term& kind : m.terms) {
                TriplePattern pattern;
                pattern.predicate = kElementOf;
                pattern.object = kind;
                for (const Triple& t : so.store.query(pattern, KnowledgeLevel::Primary))
                    reply.triples.push_back(t);
            }
            std::sort(reply.triples.begin(), reply.triples.end());
            reply.triples.erase(std::unique(reply.triples.begin(), reply.triples.end()),
                                reply.triples.end());
            result.outgoing.push_back(std::move(reply));
            break;
        }
        case MessageKind::ReplyPrimary: {
            auto it = so.pending.find(m.correlation);
            if (it == so.pending.end() || it->second.kind != MessageKind::QueryPrimary) {
                result.notes.push_back("dropped reply_primary from " + m.sender +
                                       ": unknown correlation " + std::to_string(m.correlation));
                break;
            }
            std::vector<Term> new_attributes;
            for (Triple t : m.triples) {
                TripleKey key(t);
                bool existed = so.store.contains(key);
                t.level = KnowledgeLevel::Primary;
                t.source = m.sender;
                t.asserted_at = so.now;
                try {
                    so.store.assert_triple(t);
                } catch (const LevelConflict&) {
                    result.notes.push_back("kept local level for (" + key.subject.text + ", " +
                                           key.predicate.text + ", " + key.object.text + ")");
                    continue;
                }
                if (!existed && t.predicate == kElementOf && t.object == kSensor)
                    new_attributes.push_back(t.subject);
            }
            result.notes.push_back("merged " + std::to_string(m.triples.size()) +
                                   " primary triples from " + m.sender);
            if (!new_attributes.empty()) {
                Message query;
                query.kind = MessageKind::QuerySecondary;
                query.sender = so.id;
                query.correlation = so.next_correlation++;
                query.level_tag = KnowledgeLevel::Secondary;
                std::sort(new_attributes.begin(), new_attributes.end());
                query.terms = std::move(new_attributes);
                so.pending[query.correlation] =
                    PendingRequest{MessageKind::QuerySecondary, query.terms};
                result.outgoing.push_back(std::move(query));
            }
            break;
        }
        case MessageKind::QuerySecondary: {
            Message reply = reply_shell(so, m, MessageKind::ReplySecondary);
            reply.level_tag = KnowledgeLevel::Secondary;
            for (const Observation& o : so.store.observations()) {
                if (o.quarantined) continue;  // never relay third-party samples
                if (std::find(m.terms.begin(), m.terms.end(), o.attribute) == m.terms.end())
                    continue;
                reply.observations.push_back(o);
            }
            result.outgoing.push_back(std::move(reply));
            break;
        }
        case MessageKind::ReplySecondary: {
            bool unsolicited = m.correlation == 0;
            auto it = so.pending.find(m.correlation);
            if (!unsolicited &&
                (it == so.pending.end() || it->second.kind != MessageKind::QuerySecondary)) {
                result.notes.push_back("dropped reply_secondary from " + m.sender +
                                       ": unknown correlation " + std::to_string(m.correlation));
                break;
            }
            for (Observation o : m.observations) {
                o.source = m.sender;
                o.quarantined = true;  // foreign values stay out of induction
                so.store.record_observation(std::move(o));
            }
            result.notes.push_back("quarantined " + std::to_string(m.observations.size()) +
                                   " samples from " + m.sender);
            break;
        }
        case MessageKind::Advertise: {
            for (const ServiceTag& s : m.services)
                so.peer_services.push_back(PeerService{m.sender, s.service, s.level});
            break;
        }
        default:
            throw UnknownKind("unhandled message kind");
    }
    return result;
}

std::optional<Message> advertise_services(const KnowledgeStore& store,
                                          const std::string& sender) {
    Message m;
    m.kind = MessageKind::Advertise;
    m.sender = sender;
    TriplePattern classifier_pattern;
    classifier_pattern.predicate = kClassifies;
    for (const Triple& t : store.query(classifier_pattern, KnowledgeLevel::Primary))
        m.services.push_back(
            {Term::checked("classify_" + t.object.text), KnowledgeLevel::Primary});
    std::set<Term> sampled;
    for (const Observation& o : store.observations())
        if (!o.quarantined) sampled.insert(o.attribute);
    for (const Term& attr : sampled) m.services.push_back({attr, KnowledgeLevel::Secondary});
    for (const auto& [key, t] : store.hypothesis_triples())
        m.services.push_back({Term::checked(key.subject.text + "_" + key.predicate.text + "_" +
                                            key.object.text),
                              KnowledgeLevel::Invented});
    if (m.services.empty()) return std::nullopt;
    std::sort(m.services.begin(), m.services.end());
    m.services.erase(std::unique(m.services.begin(), m.services.end()), m.services.end());
    m.level_tag = expected_level_tag(m);
    return m;
}

}  // namespace knowmesh

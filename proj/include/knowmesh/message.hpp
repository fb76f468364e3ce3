#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "knowmesh/knowledge.hpp"
#include "knowmesh/profiles.hpp"

namespace knowmesh {

enum class MessageKind { QueryPrimary, ReplyPrimary, QuerySecondary, ReplySecondary, Advertise };

const char* to_string(MessageKind kind);

struct ServiceTag {
    Term service;
    KnowledgeLevel level = KnowledgeLevel::Primary;

    auto operator<=>(const ServiceTag&) const = default;
};

/// A knowledge-exchange payload. Only the body field matching `kind` is
/// populated: `terms` for queries (knowledge kinds or attribute names),
/// `triples` for primary replies, `observations` for secondary replies,
/// `services` for advertisements. Replies echo the originating correlation;
/// correlation 0 marks an unsolicited push.
struct Message {
    MessageKind kind = MessageKind::QueryPrimary;
    std::string sender;
    std::uint64_t correlation = 0;
    KnowledgeLevel level_tag = KnowledgeLevel::Primary;
    std::vector<Term> terms;
    std::vector<Triple> triples;
    std::vector<Observation> observations;
    std::vector<ServiceTag> services;

    bool operator==(const Message&) const = default;
};

/// The level a message of this kind and body must be tagged with. Queries and
/// primary replies are Primary, secondary traffic is Secondary, and an
/// advertisement carries the highest level among its services.
KnowledgeLevel expected_level_tag(const Message& m);

/// One protocol-framed fragment of an encoded message. The wire form is
/// `header_bytes` of zero padding, then `id:<msg-id> frag:<i>/<n>\n`, then
/// the payload bytes.
struct Frame {
    std::string profile;  // profile name the frame was encoded under
    std::string message_id;
    std::size_t index = 0;
    std::size_t count = 1;
    std::string payload;

    bool operator==(const Frame&) const = default;
};

/// Deterministic wire id: `<sender>.<correlation>.<kind-code>`.
std::string wire_message_id(const Message& m);

/// Canonical body text: `<kind> <sender> <correlation> <level>` then one
/// sorted record line per term (K), triple (T), observation (O) or service
/// (S). Throws ValidationError when level_tag does not match the body.
std::string encode_body(const Message& m);
Message decode_body(const std::string& body);

/// Splits the length-prefixed body into at most frame_payload_bytes chunks.
/// Throws MessageTooLarge when the body exceeds the profile ceiling.
std::vector<Frame> encode_message(const Message& m, const ProtocolProfile& profile);

/// Reassembles fragments (any order) and decodes. Throws IncompleteMessage,
/// ProfileMismatch, ParseError.
Message decode_frames(const std::vector<Frame>& frames);

/// Gateway adaptation: decode under `from`, re-encode under `to`.
std::vector<Frame> bridge_frames(const std::vector<Frame>& frames, const ProtocolProfile& from,
                                 const ProtocolProfile& to);

/// Bit-exact wire form of one frame / its parse. The profile governs the
/// header padding and payload ceiling.
std::string frame_bytes(const Frame& frame, const ProtocolProfile& profile);
Frame parse_frame(const std::string& bytes, const ProtocolProfile& profile);
std::size_t frame_wire_size(const Frame& frame, const ProtocolProfile& profile);

}  // namespace knowmesh

#include <doctest.h>

#include <algorithm>
#include <random>

#include "knowmesh/errors.hpp"
#include "knowmesh/message.hpp"

using namespace knowmesh;

namespace {

const ProtocolProfile& profile(const std::string& name) {
    static const std::vector<ProtocolProfile> table = default_profiles();
    return find_profile(table, name);
}

Message query_primary_fixture() {
    Message m;
    m.kind = MessageKind::QueryPrimary;
    m.sender = "SO1";
    m.correlation = 1;
    m.level_tag = KnowledgeLevel::Primary;
    m.terms = {Term("event"), Term("sensor")};
    return m;
}

std::mt19937_64 g_rng(1234);

Term random_term() {
    static const std::vector<std::string> words = {
        "sensor", "device",  "user",   "person",     "event",  "normal",
        "fall",   "dormant", "active", "heart_rate", "driver", "patient"};
    return Term(words[g_rng() % words.size()]);
}

Message random_message() {
    Message m;
    m.kind = static_cast<MessageKind>(g_rng() % 5);
    m.sender = "SO" + std::to_string(g_rng() % 5);
    m.correlation = g_rng() % 1000;
    switch (m.kind) {
        case MessageKind::QueryPrimary:
        case MessageKind::QuerySecondary: {
            std::set<Term> terms;
            std::size_t n = g_rng() % 5;
            while (terms.size() < n) terms.insert(random_term());
            m.terms.assign(terms.begin(), terms.end());
            break;
        }
        case MessageKind::ReplyPrimary: {
            std::set<TripleKey> seen;
            std::size_t n = g_rng() % 8;
            std::vector<Term> preds(default_predicates().begin(), default_predicates().end());
            while (m.triples.size() < n) {
                Triple t{random_term(), preds[g_rng() % preds.size()], random_term(),
                         KnowledgeLevel::Primary, "SO" + std::to_string(g_rng() % 5),
                         static_cast<Tick>(g_rng() % 10000)};
                if (seen.insert(TripleKey(t)).second) m.triples.push_back(t);
            }
            std::sort(m.triples.begin(), m.triples.end());
            break;
        }
        case MessageKind::ReplySecondary: {
            std::size_t n = g_rng() % 8;
            for (std::size_t i = 0; i < n; ++i) {
                Observation o;
                o.attribute = random_term();
                o.number = static_cast<double>(g_rng() % 100000) / 713.0;
                if (g_rng() % 2) o.unit = Term("hour");
                if (g_rng() % 2) o.label = random_term();
                o.timestamp = static_cast<Tick>(g_rng() % 10000);
                o.source = "SO" + std::to_string(g_rng() % 5);
                o.quarantined = g_rng() % 2 == 0;
                m.observations.push_back(o);
            }
            std::sort(m.observations.begin(), m.observations.end());
            break;
        }
        case MessageKind::Advertise: {
            std::set<ServiceTag> tags;
            std::size_t n = g_rng() % 5;
            while (tags.size() < n)
                tags.insert(ServiceTag{random_term(), static_cast<KnowledgeLevel>(g_rng() % 3)});
            m.services.assign(tags.begin(), tags.end());
            break;
        }
    }
    m.level_tag = expected_level_tag(m);
    return m;
}

}  // namespace

TEST_CASE("a small query fits one frame with the 2-byte coap header") {
    auto frames = encode_message(query_primary_fixture(), profile("coap"));
    REQUIRE(frames.size() == 1);
    CHECK(profile("coap").header_bytes == 2);
    std::string wire = frame_bytes(frames[0], profile("coap"));
    CHECK(wire[0] == '\0');
    CHECK(wire[1] == '\0');
    CHECK(wire.substr(2, 3) == "id:");
    // wire layout survives a parse
    Frame back = parse_frame(wire, profile("coap"));
    CHECK(back == frames[0]);
    CHECK(frame_wire_size(frames[0], profile("coap")) == wire.size());
}

TEST_CASE("an empty advertisement still encodes to one frame") {
    Message m;
    m.kind = MessageKind::Advertise;
    m.sender = "SO2";
    m.correlation = 9;
    m.level_tag = KnowledgeLevel::Primary;
    auto frames = encode_message(m, profile("coap"));
    REQUIRE(frames.size() == 1);
    CHECK(decode_frames(frames) == m);
}

TEST_CASE("fragment counts follow the ceiling rule") {
    ProtocolProfile tiny{"coap", 2, 1 << 20, 64, true, 0};
    for (std::size_t target = 1; target <= 10 * tiny.frame_payload_bytes; target += 7) {
        Message m;
        m.kind = MessageKind::QuerySecondary;
        m.sender = "S";
        m.correlation = 1;
        m.level_tag = KnowledgeLevel::Secondary;
        // pad the body with terms until the encoded size passes `target`
        std::size_t i = 0;
        while (encode_body(m).size() < target)
            m.terms.push_back(Term("attr_" + std::to_string(i++)));
        std::sort(m.terms.begin(), m.terms.end());  // bodies are canonically sorted
        auto frames = encode_message(m, tiny);
        std::string encoded = std::to_string(encode_body(m).size()) + "\n" + encode_body(m);
        CHECK(frames.size() ==
              (encoded.size() + tiny.frame_payload_bytes - 1) / tiny.frame_payload_bytes);
        for (const Frame& f : frames) CHECK(f.payload.size() <= tiny.frame_payload_bytes);
        CHECK(decode_frames(frames) == m);
    }
}

TEST_CASE("oversized bodies are rejected") {
    ProtocolProfile cramped{"coap", 2, 64, 32, true, 0};
    Message m = query_primary_fixture();
    for (int i = 0; i < 20; ++i) m.terms.push_back(Term("padding_term_" + std::to_string(i)));
    CHECK_THROWS_AS(encode_message(m, cramped), MessageTooLarge);
}

TEST_CASE("decode tolerates arbitrary fragment order") {
    Message m;
    m.kind = MessageKind::ReplySecondary;
    m.sender = "SO2";
    m.correlation = 4;
    m.level_tag = KnowledgeLevel::Secondary;
    for (int i = 0; i < 120; ++i) {
        Observation o;
        o.attribute = Term("lying_time");
        o.number = i * 0.25;
        o.label = Term("normal");
        o.timestamp = i;
        o.source = "SO2";
        m.observations.push_back(o);
    }
    ProtocolProfile tiny{"coap", 2, 1 << 20, 128, true, 0};
    auto frames = encode_message(m, tiny);
    REQUIRE(frames.size() > 3);
    std::reverse(frames.begin(), frames.end());
    CHECK(decode_frames(frames) == m);

    std::mt19937_64 rng(5);
    std::shuffle(frames.begin(), frames.end(), rng);
    CHECK(decode_frames(frames) == m);

    frames.erase(frames.begin() + 1);
    CHECK_THROWS_AS(decode_frames(frames), IncompleteMessage);
}

TEST_CASE("decode detects profile mixtures") {
    Message m = query_primary_fixture();
    auto a = encode_message(m, profile("coap"));
    auto b = encode_message(m, profile("mqtt"));
    std::vector<Frame> mixed = {a[0], b[0]};
    mixed[1].count = a[0].count + 1;  // force multi-frame path
    mixed[0].count = a[0].count + 1;
    CHECK_THROWS_AS(decode_frames(mixed), ProfileMismatch);
}

TEST_CASE("codec round trip holds for 1000 random messages per profile") {
    for (const char* name : {"coap", "mqtt", "amqp", "http"}) {
        const ProtocolProfile& p = profile(name);
        for (int i = 0; i < 1000; ++i) {
            Message m = random_message();
            auto frames = encode_message(m, p);
            std::shuffle(frames.begin(), frames.end(), g_rng);
            CHECK(decode_frames(frames) == m);
        }
    }
}

TEST_CASE("bridging re-frames without changing the message") {
    Message m;
    m.kind = MessageKind::ReplyPrimary;
    m.sender = "SO2";
    m.correlation = 2;
    m.level_tag = KnowledgeLevel::Primary;
    for (const char* s : {"normal", "active", "dormant"})
        m.triples.push_back(Triple{Term(s), Term("element_of"), Term("event"),
                                   KnowledgeLevel::Primary, "SO2", 0});
    std::sort(m.triples.begin(), m.triples.end());

    ProtocolProfile small_coap{"coap", 2, 1 << 20, 64, true, 0};
    auto coap_frames = encode_message(m, small_coap);
    REQUIRE(coap_frames.size() == 3);

    auto mqtt_frames = bridge_frames(coap_frames, small_coap, profile("mqtt"));
    CHECK(mqtt_frames.size() == 1);  // mqtt payload swallows the whole body
    CHECK(decode_frames(mqtt_frames) == m);

    // bridging to the same profile is content-preserving
    auto again = bridge_frames(coap_frames, small_coap, small_coap);
    CHECK(decode_frames(again) == m);

    ProtocolProfile cramped{"mqtt", 16, 32, 16, true, 1};
    CHECK_THROWS_AS(bridge_frames(coap_frames, small_coap, cramped), MessageTooLarge);
}

TEST_CASE("profile table invariants") {
    auto table = default_profiles();
    REQUIRE(table.size() == 4);
    const ProtocolProfile& coap = find_profile(table, "coap");
    const ProtocolProfile& mqtt = find_profile(table, "mqtt");
    const ProtocolProfile& amqp = find_profile(table, "amqp");
    const ProtocolProfile& http = find_profile(table, "http");
    CHECK(coap.header_bytes == 2);
    CHECK(coap.max_message_bytes == 256u * 1024 * 1024);
    CHECK(coap.weight_class < mqtt.weight_class);
    CHECK(mqtt.weight_class <= amqp.weight_class);
    CHECK(amqp.weight_class < http.weight_class);
    for (const ProtocolProfile& p : table) {
        CHECK_NOTHROW(p.validate());
        CHECK(p.frame_payload_bytes <= p.max_message_bytes);
    }
    CHECK(lighter_profile(coap, http).name == "coap");
    CHECK(lighter_profile(amqp, mqtt).name == "mqtt");
    CHECK_THROWS_AS(find_profile(table, "smtp"), ValidationError);
}

TEST_CASE("level tags are enforced both ways") {
    Message m = query_primary_fixture();
    m.level_tag = KnowledgeLevel::Secondary;
    CHECK_THROWS_AS(encode_body(m), ValidationError);
    CHECK_THROWS_AS(decode_body("query_primary SO1 1 secondary\n"), ParseError);
    CHECK_THROWS_AS(decode_body("gossip SO1 1 primary\n"), UnknownKind);
}

#include "knowmesh/message.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "knowmesh/errors.hpp"

namespace knowmesh {

const char* to_string(MessageKind kind) {
    switch (kind) {
        case MessageKind::QueryPrimary: return "query_primary";
        case MessageKind::ReplyPrimary: return "reply_primary";
        case MessageKind::QuerySecondary: return "query_secondary";
        case MessageKind::ReplySecondary: return "reply_secondary";
        case MessageKind::Advertise: return "advertise";
    }
    return "?";
}

namespace {
MessageKind kind_from_string(const std::string& s) {
    if (s == "query_primary") return MessageKind::QueryPrimary;
    if (s == "reply_primary") return MessageKind::ReplyPrimary;
    if (s == "query_secondary") return MessageKind::QuerySecondary;
    if (s == "reply_secondary") return MessageKind::ReplySecondary;
    if (s == "advertise") return MessageKind::Advertise;
    throw UnknownKind("unknown message kind '" + s + "'");
}

const char* kind_code(MessageKind kind) {
    switch (kind) {
        case MessageKind::QueryPrimary: return "qp";
        case MessageKind::ReplyPrimary: return "rp";
        case MessageKind::QuerySecondary: return "qs";
        case MessageKind::ReplySecondary: return "rs";
        case MessageKind::Advertise: return "ad";
    }
    return "??";
}

int level_rank(KnowledgeLevel level) {
    switch (level) {
        case KnowledgeLevel::Primary: return 2;
        case KnowledgeLevel::Secondary: return 1;
        case KnowledgeLevel::Invented: return 0;
    }
    return 0;
}

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
}  // namespace

KnowledgeLevel expected_level_tag(const Message& m) {
    switch (m.kind) {
        case MessageKind::QueryPrimary:
        case MessageKind::ReplyPrimary: return KnowledgeLevel::Primary;
        case MessageKind::QuerySecondary:
        case MessageKind::ReplySecondary: return KnowledgeLevel::Secondary;
        case MessageKind::Advertise: {
            KnowledgeLevel best = KnowledgeLevel::Primary;
            bool any = false;
            for (const ServiceTag& s : m.services) {
                if (!any || level_rank(s.level) > level_rank(best)) best = s.level;
                any = true;
            }
            return any ? best : KnowledgeLevel::Primary;
        }
    }
    return KnowledgeLevel::Primary;
}

std::string wire_message_id(const Message& m) {
    return m.sender + "." + std::to_string(m.correlation) + "." + kind_code(m.kind);
}

std::string encode_body(const Message& m) {
    if (m.level_tag != expected_level_tag(m))
        throw ValidationError("level tag does not match message body");
    std::ostringstream head;
    head << to_string(m.kind) << ' ' << m.sender << ' ' << m.correlation << ' '
         << to_string(m.level_tag) << '\n';
    std::vector<std::string> records;
    for (const Term& t : m.terms) records.push_back("K\t" + t.text);
    for (const Triple& t : m.triples) records.push_back(triple_line(t));
    for (const Observation& o : m.observations) records.push_back(observation_line(o));
    for (const ServiceTag& s : m.services)
        records.push_back("S\t" + s.service.text + "\t" + to_string(s.level));
    std::sort(records.begin(), records.end());
    // terms, triples and services are sets; repeated samples are real data
    records.erase(std::unique(records.begin(), records.end(),
                              [](const std::string& a, const std::string& b) {
                                  return a == b && a.rfind("O\t", 0) != 0;
                              }),
                  records.end());
    std::string out = head.str();
    for (const std::string& r : records) {
        out += r;
        out.push_back('\n');
    }
    return out;
}

namespace {
Triple parse_triple_record(const std::vector<std::string>& f, std::size_t line_no) {
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
    std::int64_t tick = 0;
    auto [p, ec] = std::from_chars(f[6].data(), f[6].data() + f[6].size(), tick);
    if (ec != std::errc() || p != f[6].data() + f[6].size())
        throw ParseError(line_no, "bad tick '" + f[6] + "'");
    t.asserted_at = tick;
    return t;
}

Observation parse_observation_record(const std::vector<std::string>& f, std::size_t line_no) {
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
    std::int64_t tick = 0;
    auto [p, ec] = std::from_chars(f[5].data(), f[5].data() + f[5].size(), tick);
    if (ec != std::errc() || p != f[5].data() + f[5].size())
        throw ParseError(line_no, "bad tick '" + f[5] + "'");
    o.timestamp = tick;
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

Message decode_body(const std::string& body) {
    std::istringstream in(body);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(1, "empty message body");
    std::istringstream head(line);
    std::string kind_s, sender, corr_s, level_s;
    if (!(head >> kind_s >> sender >> corr_s >> level_s))
        throw ParseError(1, "message head needs '<kind> <sender> <correlation> <level>'");
    Message m;
    m.kind = kind_from_string(kind_s);
    m.sender = sender;
    auto [p, ec] = std::from_chars(corr_s.data(), corr_s.data() + corr_s.size(), m.correlation);
    if (ec != std::errc() || p != corr_s.data() + corr_s.size())
        throw ParseError(1, "bad correlation '" + corr_s + "'");
    auto level = level_from_string(level_s);
    if (!level) throw ParseError(1, "unknown level '" + level_s + "'");
    m.level_tag = *level;

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = split_tabs(line);
        if (fields[0] == "K") {
            if (fields.size() != 2) throw ParseError(line_no, "term record needs 2 fields");
            try {
                m.terms.push_back(Term::checked(fields[1]));
            } catch (const std::runtime_error& e) {
                throw ParseError(line_no, e.what());
            }
        } else if (fields[0] == "T") {
            m.triples.push_back(parse_triple_record(fields, line_no));
        } else if (fields[0] == "O") {
            m.observations.push_back(parse_observation_record(fields, line_no));
        } else if (fields[0] == "S") {
            if (fields.size() != 3) throw ParseError(line_no, "service record needs 3 fields");
            ServiceTag s;
            try {
                s.service = Term::checked(fields[1]);
            } catch (const std::runtime_error& e) {
                throw ParseError(line_no, e.what());
            }
            auto lv = level_from_string(fields[2]);
            if (!lv) throw ParseError(line_no, "unknown level '" + fields[2] + "'");
            s.level = *lv;
            m.services.push_back(s);
        } else {
            throw ParseError(line_no, "unknown record kind '" + fields[0] + "'");
        }
    }
    if (m.level_tag != expected_level_tag(m))
        throw ParseError(1, "level tag does not match message body");
    // in-memory canonical order is struct order, not line order
    std::sort(m.terms.begin(), m.terms.end());
    std::sort(m.triples.begin(), m.triples.end());
    std::sort(m.observations.begin(), m.observations.end());
    std::sort(m.services.begin(), m.services.end());
    return m;
}

std::vector<Frame> encode_message(const Message& m, const ProtocolProfile& profile) {
    std::string body = encode_body(m);
    if (body.size() > profile.max_message_bytes)
        throw MessageTooLarge("message body of " + std::to_string(body.size()) +
                              " bytes exceeds the " + profile.name + " ceiling");
    std::string encoded = std::to_string(body.size()) + "\n" + body;
    const std::size_t chunk = profile.frame_payload_bytes;
    const std::size_t count = (encoded.size() + chunk - 1) / chunk;  // encoded is never empty
    std::string id = wire_message_id(m);
    std::vector<Frame> frames;
    frames.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Frame f;
        f.profile = profile.name;
        f.message_id = id;
        f.index = i;
        f.count = count;
        f.payload = encoded.substr(i * chunk, chunk);
        frames.push_back(std::move(f));
    }
    return frames;
}

Message decode_frames(const std::vector<Frame>& frames) {
    if (frames.empty()) throw IncompleteMessage("no frames");
    const std::string& id = frames.front().message_id;
    const std::string& profile = frames.front().profile;
    const std::size_t count = frames.front().count;
    std::vector<const Frame*> slots(count, nullptr);
    for (const Frame& f : frames) {
        if (f.message_id != id) throw ParseError(0, "frames mix message ids");
        if (f.profile != profile)
            throw ProfileMismatch("frames mix profiles " + profile + " and " + f.profile);
        if (f.count != count || f.index >= count)
            throw IncompleteMessage("fragment index " + std::to_string(f.index) +
                                    " outside 0.." + std::to_string(count - 1));
        slots[f.index] = &f;
    }
    std::string encoded;
    for (std::size_t i = 0; i < count; ++i) {
        if (!slots[i])
            throw IncompleteMessage("missing fragment " + std::to_string(i) + " of " +
                                    std::to_string(count));
        encoded += slots[i]->payload;
    }
    std::size_t nl = encoded.find('\n');
    if (nl == std::string::npos) throw ParseError(0, "missing length prefix");
    std::size_t len = 0;
    auto [p, ec] = std::from_chars(encoded.data(), encoded.data() + nl, len);
    if (ec != std::errc() || p != encoded.data() + nl)
        throw ParseError(0, "bad length prefix");
    std::string body = encoded.substr(nl + 1);
    if (body.size() != len)
        throw ParseError(0, "body length " + std::to_string(body.size()) +
                                " does not match prefix " + std::to_string(len));
    Message m = decode_body(body);
    if (wire_message_id(m) != id) throw ParseError(0, "message id does not match body");
    return m;
}

std::vector<Frame> bridge_frames(const std::vector<Frame>& frames, const ProtocolProfile& from,
                                 const ProtocolProfile& to) {
    for (const Frame& f : frames)
        if (f.profile != from.name)
            throw ProfileMismatch("frame profile " + f.profile + " is not " + from.name);
    return encode_message(decode_frames(frames), to);
}

std::string frame_bytes(const Frame& frame, const ProtocolProfile& profile) {
    if (frame.profile != profile.name)
        throw ProfileMismatch("frame profile " + frame.profile + " is not " + profile.name);
    if (frame.payload.size() > profile.frame_payload_bytes)
        throw MessageTooLarge("payload exceeds " + profile.name + " frame size");
    std::string out(profile.header_bytes, '\0');
    out += "id:" + frame.message_id + " frag:" + std::to_string(frame.index) + "/" +
           std::to_string(frame.count) + "\n";
    out += frame.payload;
    return out;
}

Frame parse_frame(const std::string& bytes, const ProtocolProfile& profile) {
    if (bytes.size() < profile.header_bytes) throw ParseError(0, "frame shorter than header");
    for (std::size_t i = 0; i < profile.header_bytes; ++i)
        if (bytes[i] != '\0') throw ParseError(0, "frame header padding is not zeroed");
    std::size_t nl = bytes.find('\n', profile.header_bytes);
    if (nl == std::string::npos) throw ParseError(0, "missing fragment line");
    std::string frag_line = bytes.substr(profile.header_bytes, nl - profile.header_bytes);
    Frame f;
    f.profile = profile.name;
    std::istringstream in(frag_line);
    std::string id_part, frag_part;
    if (!(in >> id_part >> frag_part) || id_part.rfind("id:", 0) != 0 ||
        frag_part.rfind("frag:", 0) != 0)
        throw ParseError(0, "bad fragment line '" + frag_line + "'");
    f.message_id = id_part.substr(3);
    std::string counts = frag_part.substr(5);
    std::size_t slash = counts.find('/');
    if (slash == std::string::npos) throw ParseError(0, "bad fragment counter");
    f.index = std::stoull(counts.substr(0, slash));
    f.count = std::stoull(counts.substr(slash + 1));
    f.payload = bytes.substr(nl + 1);
    if (f.payload.size() > profile.frame_payload_bytes)
        throw ParseError(0, "payload exceeds frame size");
    return f;
}

std::size_t frame_wire_size(const Frame& frame, const ProtocolProfile& profile) {
    return profile.header_bytes + 3 + frame.message_id.size() + 6 +
           std::to_string(frame.index).size() + 1 + std::to_string(frame.count).size() + 1 +
           frame.payload.size();
}

}  // namespace knowmesh

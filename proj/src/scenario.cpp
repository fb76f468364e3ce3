#include "knowmesh/scenario.hpp"

#include <algorithm>
#include <charconv>
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

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, sep)) out.push_back(item);
    return out;
}

std::pair<std::string, std::string> parse_kv(const std::string& tok, std::size_t line_no) {
    std::size_t eq = tok.find('=');
    if (eq == std::string::npos || eq == 0) throw ParseError(line_no, "expected key=value");
    return {tok.substr(0, eq), tok.substr(eq + 1)};
}

std::int64_t parse_int(const std::string& s, std::size_t line_no, const char* what) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw ParseError(line_no, std::string("bad ") + what + " '" + s + "'");
    return v;
}

std::uint64_t parse_uint(const std::string& s, std::size_t line_no, const char* what) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw ParseError(line_no, std::string("bad ") + what + " '" + s + "'");
    return v;
}

double parse_double(const std::string& s, std::size_t line_no, const char* what) {
    auto v = parse_number(s);
    if (!v) throw ParseError(line_no, std::string("bad ") + what + " '" + s + "'");
    return *v;
}

Term parse_term(const std::string& s, std::size_t line_no) {
    try {
        return Term::checked(s);
    } catch (const std::runtime_error& e) {
        throw ParseError(line_no, e.what());
    }
}
}  // namespace

Scenario load_scenario(const std::string& text) {
    Scenario s;
    s.profiles = default_profiles();
    std::istringstream in(text);
    std::string raw;
    std::string section;
    std::size_t line_no = 0;
    Tick last_schedule_tick = 0;

    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError(line_no, "unterminated section header");
            section = line.substr(1, line.size() - 2);
            static const std::set<std::string> known = {
                "sim",     "nodes",    "links",   "profiles",   "predicates",
                "triples", "streams",  "schedule", "thresholds", "lexicon",
                "vocabulary"};
            if (!known.contains(section))
                throw ParseError(line_no, "unknown section [" + section + "]");
            continue;
        }
        if (section.empty()) throw ParseError(line_no, "content before the first section");

        if (section == "sim") {
            std::size_t eq = line.find('=');
            if (eq == std::string::npos) throw ParseError(line_no, "expected key = value");
            std::string key = trim(line.substr(0, eq));
            std::string value = trim(line.substr(eq + 1));
            if (key == "name")
                s.name = value;
            else if (key == "model")
                s.model = static_cast<int>(parse_int(value, line_no, "model"));
            else if (key == "seed")
                s.seed = parse_uint(value, line_no, "seed");
            else if (key == "duration")
                s.duration = parse_int(value, line_no, "duration");
            else
                throw ValidationError("unknown [sim] key '" + key + "'");
        } else if (section == "nodes") {
            auto toks = split_ws(line);
            if (toks.size() != 3) throw ParseError(line_no, "node line needs '<id> <role> <profile>'");
            NodeInfo n;
            n.id = toks[0];
            auto role = role_from_string(toks[1]);
            if (!role) throw ParseError(line_no, "unknown role '" + toks[1] + "'");
            n.role = *role;
            n.profile = toks[2];
            s.nodes.push_back(std::move(n));
        } else if (section == "links") {
            auto toks = split_ws(line);
            if (toks.size() < 3)
                throw ParseError(line_no, "link line needs '<a> <->|-> <b> [key=value ...]'");
            Link l;
            l.from = toks[0];
            l.to = toks[2];
            if (toks[1] == "<->")
                l.mode = LinkMode::Duplex;
            else if (toks[1] == "->")
                l.mode = LinkMode::Simplex;
            else
                throw ParseError(line_no, "link arrow must be '<->' or '->'");
            for (std::size_t i = 3; i < toks.size(); ++i) {
                auto [key, value] = parse_kv(toks[i], line_no);
                if (key == "latency")
                    l.latency = parse_int(value, line_no, "latency");
                else if (key == "bandwidth")
                    l.bandwidth = parse_int(value, line_no, "bandwidth");
                else if (key == "loss")
                    l.loss_probability = parse_double(value, line_no, "loss");
                else
                    throw ValidationError("unknown link key '" + key + "'");
            }
            s.links.push_back(std::move(l));
        } else if (section == "profiles") {
            auto toks = split_ws(line);
            if (toks.empty()) continue;
            ProtocolProfile* p = nullptr;
            for (ProtocolProfile& cand : s.profiles)
                if (cand.name == toks[0]) p = &cand;
            if (!p) throw ValidationError("unknown profile '" + toks[0] + "'");
            for (std::size_t i = 1; i < toks.size(); ++i) {
                auto [key, value] = parse_kv(toks[i], line_no);
                if (key == "header")
                    p->header_bytes = parse_uint(value, line_no, "header");
                else if (key == "max_message")
                    p->max_message_bytes = parse_uint(value, line_no, "max_message");
                else if (key == "frame_payload")
                    p->frame_payload_bytes = parse_uint(value, line_no, "frame_payload");
                else if (key == "duplex")
                    p->duplex = value == "1" || value == "true";
                else
                    throw ValidationError("unknown profile key '" + key + "'");
            }
        } else if (section == "predicates") {
            s.extra_predicates.insert(parse_term(line, line_no));
        } else if (section == "vocabulary") {
            for (const std::string& tok : split_ws(line))
                s.vocabulary.insert(parse_term(tok, line_no));
        } else if (section == "lexicon") {
            std::size_t eq = line.find('=');
            if (eq == std::string::npos) throw ParseError(line_no, "expected 'file = <path>'");
            std::string key = trim(line.substr(0, eq));
            if (key != "file") throw ValidationError("unknown [lexicon] key '" + key + "'");
            s.lexicon_file = trim(line.substr(eq + 1));
        } else if (section == "triples") {
            auto toks = split_ws(line);
            if (toks.size() < 5)
                throw ParseError(line_no,
                                 "triple line needs '<node> <level> <s> <p> <o> [at=N] [source=X]'");
            TripleInjection inj;
            inj.node = toks[0];
            auto level = level_from_string(toks[1]);
            if (!level) throw ParseError(line_no, "unknown level '" + toks[1] + "'");
            inj.triple.level = *level;
            inj.triple.subject = parse_term(toks[2], line_no);
            inj.triple.predicate = parse_term(toks[3], line_no);
            inj.triple.object = parse_term(toks[4], line_no);
            inj.triple.source = inj.node;
            for (std::size_t i = 5; i < toks.size(); ++i) {
                auto [key, value] = parse_kv(toks[i], line_no);
                if (key == "at")
                    inj.at = parse_int(value, line_no, "at");
                else if (key == "source")
                    inj.triple.source = value;
                else
                    throw ValidationError("unknown triple key '" + key + "'");
            }
            inj.triple.asserted_at = inj.at;
            s.triples.push_back(std::move(inj));
        } else if (section == "streams") {
            auto toks = split_ws(line);
            if (toks.size() < 3)
                throw ParseError(line_no,
                                 "stream line needs '<node> <attribute> count=N labels=...'");
            StreamSpec spec;
            spec.node = toks[0];
            spec.attribute = parse_term(toks[1], line_no);
            bool have_count = false, have_labels = false;
            for (std::size_t i = 2; i < toks.size(); ++i) {
                auto [key, value] = parse_kv(toks[i], line_no);
                if (key == "unit")
                    spec.unit = parse_term(value, line_no);
                else if (key == "count") {
                    spec.count = static_cast<int>(parse_int(value, line_no, "count"));
                    have_count = true;
                } else if (key == "start")
                    spec.start_tick = parse_int(value, line_no, "start");
                else if (key == "interval")
                    spec.interval = parse_int(value, line_no, "interval");
                else if (key == "labels") {
                    for (const std::string& part : split(value, ',')) {
                        auto fields = split(part, ':');
                        if (fields.size() != 3)
                            throw ParseError(line_no, "label range needs 'label:low:high'");
                        LabelRange r;
                        r.label = parse_term(fields[0], line_no);
                        r.low = parse_double(fields[1], line_no, "range low");
                        r.high = parse_double(fields[2], line_no, "range high");
                        spec.labels.push_back(std::move(r));
                    }
                    have_labels = true;
                } else {
                    throw ValidationError("unknown stream key '" + key + "'");
                }
            }
            if (!have_count || !have_labels)
                throw ParseError(line_no, "stream needs count= and labels=");
            s.streams.push_back(std::move(spec));
        } else if (section == "schedule") {
            auto toks = split_ws(line);
            if (toks.size() < 3)
                throw ParseError(line_no, "schedule line needs '<tick> <action> <node> [k=v ...]'");
            ScheduledActionSpec a;
            a.tick = parse_int(toks[0], line_no, "tick");
            a.action = toks[1];
            a.node = toks[2];
            for (std::size_t i = 3; i < toks.size(); ++i) {
                auto [key, value] = parse_kv(toks[i], line_no);
                a.args[key] = value;
            }
            if (!s.schedule.empty() && a.tick < last_schedule_tick)
                throw ValidationError("schedule ticks must be non-decreasing (line " +
                                      std::to_string(line_no) + ")");
            last_schedule_tick = a.tick;
            s.schedule.push_back(std::move(a));
        } else if (section == "thresholds") {
            std::size_t eq = line.find('=');
            if (eq == std::string::npos) throw ParseError(line_no, "expected key = value");
            std::string key = trim(line.substr(0, eq));
            std::string value = trim(line.substr(eq + 1));
            if (key == "theta_induction")
                s.thresholds.theta_induction = parse_double(value, line_no, key.c_str());
            else if (key == "p_min")
                s.thresholds.p_min = parse_double(value, line_no, key.c_str());
            else if (key == "z")
                s.thresholds.z = parse_double(value, line_no, key.c_str());
            else if (key == "n_min")
                s.thresholds.n_min = static_cast<int>(parse_int(value, line_no, key.c_str()));
            else if (key == "cv_max")
                s.thresholds.cv_max = parse_double(value, line_no, key.c_str());
            else if (key == "window")
                s.thresholds.window = static_cast<int>(parse_int(value, line_no, key.c_str()));
            else
                throw ValidationError("unknown threshold '" + key + "'");
        }
    }
    validate_scenario(s);
    return s;
}

namespace {
const std::set<std::string> kActions = {"broadcast_query", "run_induction",  "run_verification",
                                        "extract_events",  "push_secondary", "advertise"};
}

void validate_scenario(const Scenario& s) {
    if (s.model < 1 || s.model > 3) throw ValidationError("model must be 1, 2 or 3");
    if (s.duration < 0) throw ValidationError("duration must be non-negative");
    s.thresholds.validate();
    for (const ProtocolProfile& p : s.profiles) p.validate();

    std::map<std::string, NodeRole> roles;
    for (const NodeInfo& n : s.nodes) {
        if (roles.contains(n.id)) throw ValidationError("duplicate node id '" + n.id + "'");
        find_profile(s.profiles, n.profile);
        roles[n.id] = n.role;
    }
    auto require_node = [&](const std::string& id, const char* where) {
        if (!roles.contains(id))
            throw ValidationError(std::string(where) + " references undeclared node '" + id + "'");
    };

    for (const Link& l : s.links) {
        require_node(l.from, "link");
        require_node(l.to, "link");
        if (l.from == l.to) throw ValidationError("link endpoints must differ");
        if (l.latency < 0) throw ValidationError("link latency must be non-negative");
        if (l.bandwidth <= 0) throw ValidationError("link bandwidth must be positive");
        if (l.loss_probability < 0.0 || l.loss_probability > 1.0)
            throw ValidationError("link loss must be within [0,1]");
        bool from_device = roles[l.from] == NodeRole::Device;
        bool to_device = roles[l.to] == NodeRole::Device;
        if (s.model == 1 && (from_device || to_device)) {
            // upload-only devices: no path may carry frames toward a device
            if (!(l.mode == LinkMode::Simplex && from_device && !to_device))
                throw ValidationError("model 1 allows only simplex device-to-upstream links (" +
                                      l.from + " / " + l.to + ")");
        }
        if (s.model == 3) {
            auto ok_peer = [&](NodeRole r) {
                return r == NodeRole::Gateway || r == NodeRole::Edge;
            };
            if (from_device && !ok_peer(roles[l.to]) && roles[l.to] != NodeRole::Device)
                throw ValidationError("model 3 devices link only to gateways or edge nodes");
            if (to_device && !ok_peer(roles[l.from]) && roles[l.from] != NodeRole::Device)
                throw ValidationError("model 3 devices link only to gateways or edge nodes");
        }
    }

    std::set<Term> predicates = default_predicates();
    predicates.insert(s.extra_predicates.begin(), s.extra_predicates.end());
    for (const TripleInjection& inj : s.triples) {
        require_node(inj.node, "triple");
        if (roles[inj.node] == NodeRole::Gateway)
            throw ValidationError("gateway '" + inj.node + "' holds no knowledge store");
        if (!predicates.contains(inj.triple.predicate))
            throw ValidationError("triple predicate '" + inj.triple.predicate.text +
                                  "' not in the vocabulary");
        if (inj.at < 0) throw ValidationError("triple injection tick must be non-negative");
    }
    for (const StreamSpec& spec : s.streams) {
        require_node(spec.node, "stream");
        if (roles[spec.node] == NodeRole::Gateway)
            throw ValidationError("gateway '" + spec.node + "' holds no knowledge store");
        if (spec.count < 0) throw ValidationError("stream count must be non-negative");
        if (spec.interval < 1) throw ValidationError("stream interval must be at least 1");
        if (spec.start_tick < 0) throw ValidationError("stream start must be non-negative");
        if (spec.labels.empty()) throw ValidationError("stream needs label ranges");
        for (const LabelRange& r : spec.labels)
            if (r.high < r.low) throw ValidationError("label range for '" + r.label.text +
                                                      "' has negative spread");
    }
    for (const ScheduledActionSpec& a : s.schedule) {
        if (!kActions.contains(a.action))
            throw ValidationError("unknown schedule action '" + a.action + "'");
        require_node(a.node, "schedule");
        if (roles[a.node] == NodeRole::Gateway)
            throw ValidationError("gateway '" + a.node + "' cannot run lifecycle actions");
        if (a.tick < 0) throw ValidationError("schedule tick must be non-negative");
        for (const auto& [key, value] : a.args) {
            static const std::set<std::string> known = {"kinds", "attrs", "attr", "k"};
            if (!known.contains(key))
                throw ValidationError("unknown schedule argument '" + key + "'");
        }
    }
}

std::vector<std::string> vocabulary_warnings(const Scenario& s, const Lexicon& lex) {
    std::set<Term> words = lex.dictionary;
    words.insert(s.vocabulary.begin(), s.vocabulary.end());
    std::set<Term> checked;
    std::vector<std::string> out;
    auto check = [&](const Term& t) {
        if (t.empty() || !checked.insert(t).second) return;
        auto missing = unknown_fragments(t, words);
        if (missing.empty()) return;
        std::string detail = "term '" + t.text + "' has unknown fragments:";
        for (const std::string& frag : missing) detail += " " + frag;
        out.push_back(detail);
    };
    for (const TripleInjection& inj : s.triples) {
        check(inj.triple.subject);
        check(inj.triple.predicate);
        check(inj.triple.object);
    }
    for (const StreamSpec& spec : s.streams) {
        check(spec.attribute);
        for (const LabelRange& r : spec.labels) check(r.label);
    }
    return out;
}

}  // namespace knowmesh

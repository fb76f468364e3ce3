#include "knowmesh/runner.hpp"

#include <algorithm>
#include <sstream>

#include "knowmesh/errors.hpp"

namespace knowmesh {

namespace {

std::vector<Term> parse_term_list(const std::string& csv) {
    std::vector<Term> out;
    std::istringstream in(csv);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(Term::checked(item));
    return out;
}

std::string triple_text(const Triple& t) {
    return t.subject.text + " " + t.predicate.text + " " + t.object.text;
}

/// Per-run state shared by the event closures.
struct Runner {
    const Scenario& scenario;
    const Lexicon& lexicon;
    TraceLog trace;
    std::map<std::string, SmartObject> agents;
    // gateway plumbing: reassembly buffers + forwarded message ids
    std::map<std::string, std::map<std::string, std::map<std::size_t, Frame>>> reassembly;
    std::map<std::string, std::set<std::string>> forwarded;

    Runner(const Scenario& s, const Lexicon& lex) : scenario(s), lexicon(lex) {}

    bool is_gateway(const Simulation& sim, const std::string& id) const {
        return sim.node(id).role == NodeRole::Gateway;
    }

    const ProtocolProfile& node_profile(const Simulation& sim, const std::string& id) const {
        return find_profile(sim.profiles(), sim.node(id).profile);
    }

    // Fan-out for queries and advertisements: outgoing links only.
    void dispatch_broadcast(Simulation& sim, const std::string& from, const Message& m) {
        auto frames = encode_message(m, node_profile(sim, from));
        sim.broadcast(frames, from);
    }

    // Replies and pushes are directed attempts: they try every incident
    // link, and an attempt against a simplex direction is traced as a drop.
    void dispatch_directed(Simulation& sim, const std::string& from, const Message& m) {
        auto frames = encode_message(m, node_profile(sim, from));
        for (const Link* link : sim.incident_links(from)) {
            for (const Frame& frame : frames) {
                try {
                    sim.schedule_send(frame, *link, from);
                } catch (const SimplexViolation& e) {
                    trace.emit(sim.now(), TraceCategory::Drop, from,
                               std::string("simplex-violation ") + frame.message_id + " frag " +
                                   std::to_string(frame.index) + "/" +
                                   std::to_string(frame.count) + ": " + e.what());
                }
            }
        }
    }

    void dispatch(Simulation& sim, const std::string& from, const Message& m) {
        if (m.kind == MessageKind::QueryPrimary || m.kind == MessageKind::Advertise)
            dispatch_broadcast(sim, from, m);
        else
            dispatch_directed(sim, from, m);
    }

    void forward_via_gateway(Simulation& sim, const std::string& gateway, const Message& m,
                             const Link& arrival) {
        std::string id = wire_message_id(m);
        if (!forwarded[gateway].insert(id).second) return;  // already relayed
        for (const Link* link : sim.incident_links(gateway)) {
            if (link == &arrival) continue;
            const std::string& target = link->from == gateway ? link->to : link->from;
            // adapt to the protocol spoken on the far side
            const ProtocolProfile& out_profile = node_profile(sim, target);
            std::vector<Frame> frames;
            try {
                frames = encode_message(m, out_profile);
            } catch (const MessageTooLarge& e) {
                trace.emit(sim.now(), TraceCategory::Drop, gateway,
                           "bridge " + id + " to " + target + ": " + e.what());
                continue;
            }
            for (const Frame& frame : frames) {
                try {
                    sim.schedule_send(frame, *link, gateway);
                } catch (const SimplexViolation& e) {
                    trace.emit(sim.now(), TraceCategory::Drop, gateway,
                               std::string("simplex-violation ") + id + ": " + e.what());
                    break;
                }
            }
        }
    }

    void deliver(Simulation& sim, const std::string& node, const Frame& frame,
                 const Link& link) {
        auto& buffer = reassembly[node][frame.message_id];
        buffer[frame.index] = frame;
        if (buffer.size() < frame.count) return;
        std::vector<Frame> frames;
        frames.reserve(buffer.size());
        for (auto& [index, f] : buffer) frames.push_back(std::move(f));
        reassembly[node].erase(frame.message_id);
        Message m;
        try {
            m = decode_frames(frames);
        } catch (const std::runtime_error& e) {
            trace.emit(sim.now(), TraceCategory::Drop, node,
                       std::string("undecodable ") + frame.message_id + ": " + e.what());
            return;
        }
        if (is_gateway(sim, node)) {
            forward_via_gateway(sim, node, m, link);
            return;
        }
        SmartObject& so = agents.at(node);
        so.now = sim.now();
        HandleResult result = handle_message(so, m);
        for (const std::string& note : result.notes)
            trace.emit(sim.now(), TraceCategory::Store, node, note);
        for (const Message& out : result.outgoing) dispatch(sim, node, out);
    }

    // --- lifecycle actions -------------------------------------------------

    void assert_injection(Simulation& sim, const TripleInjection& inj) {
        SmartObject& so = agents.at(inj.node);
        Triple t = inj.triple;
        t.asserted_at = sim.now();
        try {
            so.store.assert_triple(t);
            trace.emit(sim.now(), TraceCategory::Store, inj.node,
                       "assert " + std::string(to_string(t.level)) + " " + triple_text(t) +
                           " source=" + t.source);
        } catch (const std::runtime_error& e) {
            trace.emit(sim.now(), TraceCategory::Store, inj.node,
                       "assert failed for " + triple_text(t) + ": " + e.what());
        }
    }

    void record_stream_observation(Simulation& sim, const std::string& node,
                                   const Observation& obs) {
        SmartObject& so = agents.at(node);
        so.store.record_observation(obs);
        trace.emit(sim.now(), TraceCategory::Store, node,
                   "observation " + obs.attribute.text + " " + format_number(obs.number) +
                       " label=" + (obs.label ? obs.label->text : "-"));
        auto rule_it = so.rules.find(obs.attribute);
        if (rule_it == so.rules.end()) return;
        bool consistent = classify(rule_it->second, obs.number).has_value();
        record_activations(sim, so, obs.attribute, consistent);
    }

    // An incoming classified (or unclassifiable) sample activates every
    // pending hypothesis that lies on some knowledge path from the attribute
    // to a terminal entity.
    void record_activations(Simulation& sim, SmartObject& so, const Term& attribute,
                            bool consistent) {
        constexpr int kMaxPathLen = 5;
        std::vector<Path> paths;
        for (const Term& terminal : so.store.reachable(attribute, kMaxPathLen)) {
            if (so.store.has_outgoing(terminal)) continue;
            for (Path& p : so.store.find_paths(attribute, terminal, kMaxPathLen))
                paths.push_back(std::move(p));
        }
        if (paths.empty()) return;
        for (auto& [key, hypothesis] : so.hypotheses) {
            if (hypothesis.state != HypothesisState::Pending) continue;
            for (const Path& path : paths) {
                bool touches = false;
                for (const Triple& edge : path)
                    if (edge.subject == key.subject || edge.object == key.subject ||
                        edge.subject == key.object || edge.object == key.object) {
                        touches = true;
                        break;
                    }
                if (!touches) continue;
                hypothesis = record_activation(hypothesis, path, consistent);
                trace.emit(sim.now(), TraceCategory::Lifecycle, so.id,
                           "activation " + key.subject.text + " " + key.predicate.text + " " +
                               key.object.text + " n=" + std::to_string(hypothesis.activations) +
                               " k=" + std::to_string(hypothesis.consistent));
                break;  // one activation per sample per hypothesis
            }
        }
    }

    void action_broadcast_query(Simulation& sim, const ScheduledActionSpec& spec) {
        SmartObject& so = agents.at(spec.node);
        auto it = spec.args.find("kinds");
        std::vector<Term> kinds =
            it != spec.args.end() ? parse_term_list(it->second)
                                  : std::vector<Term>{Term("event"), Term("sensor")};
        Message m = make_query_primary(so, std::move(kinds));
        std::string detail = "query_primary kinds=";
        for (std::size_t i = 0; i < m.terms.size(); ++i)
            detail += (i ? "," : "") + m.terms[i].text;
        trace.emit(sim.now(), TraceCategory::Store, spec.node, detail);
        dispatch_broadcast(sim, spec.node, m);
    }

    void action_push_secondary(Simulation& sim, const ScheduledActionSpec& spec) {
        SmartObject& so = agents.at(spec.node);
        auto it = spec.args.find("attrs");
        std::vector<Term> attrs;
        if (it != spec.args.end()) {
            attrs = parse_term_list(it->second);
        } else {
            std::set<Term> seen;
            for (const Observation& o : so.store.observations())
                if (!o.quarantined) seen.insert(o.attribute);
            attrs.assign(seen.begin(), seen.end());
        }
        Message m = make_secondary_push(so, attrs);
        if (m.observations.empty()) return;
        dispatch_directed(sim, spec.node, m);
    }

    void action_run_induction(Simulation& sim, const ScheduledActionSpec& spec) {
        SmartObject& so = agents.at(spec.node);
        std::vector<Term> attrs;
        if (auto it = spec.args.find("attrs"); it != spec.args.end()) {
            attrs = parse_term_list(it->second);
        } else {
            std::set<Term> seen;
            for (const Observation& o : so.store.observations())
                if (!o.quarantined && o.numeric && o.label) seen.insert(o.attribute);
            attrs.assign(seen.begin(), seen.end());
        }
        for (const Term& attr : attrs) {
            std::vector<Observation> samples = so.store.local_samples(attr);
            std::set<Term> labels;
            for (const Observation& o : samples) labels.insert(*o.label);
            if (samples.size() < 2 || labels.size() < 2) {
                trace.emit(sim.now(), TraceCategory::Lifecycle, spec.node,
                           "induction " + attr.text + " skipped: insufficient data");
                continue;
            }
            KnowledgeStore before = so.store;  // abduction reasons over the pre-gate view
            IntervalRule rule;
            try {
                rule = induce_interval_rules(samples, scenario.thresholds);
            } catch (const std::runtime_error& e) {
                trace.emit(sim.now(), TraceCategory::Lifecycle, spec.node,
                           "induction " + attr.text + " failed: " + e.what());
                continue;
            }
            PromotionOutcome outcome =
                evaluate_promotion(so.store, rule, scenario.thresholds, so.id, sim.now());
            std::ostringstream line;
            line << "induction " << attr.text << " accuracy=" << format_number(rule.training_accuracy)
                 << " intervals=" << rule.intervals.size();
            if (outcome == PromotionOutcome::Promoted) {
                so.rules[attr] = rule;
                trace.emit(sim.now(), TraceCategory::Lifecycle, spec.node,
                           line.str() + " promoted");
            } else {
                trace.emit(sim.now(), TraceCategory::Lifecycle, spec.node,
                           line.str() + " rejected");
                trace.emit(sim.now(), TraceCategory::Lifecycle, spec.node,
                           "abduction-trigger " + attr.text);
                run_abduction(sim, so, before, attr);
            }
        }
    }

    void run_abduction(Simulation& sim, SmartObject& so, const KnowledgeStore& before,
                       const Term& failing) {
        std::vector<Triple> peer;
        for (const Triple& t : before.all_triples())
            if (t.level != KnowledgeLevel::Invented && t.source != so.id) peer.push_back(t);
        std::vector<Hypothesis> speculated;
        try {
            speculated = abduce(before, failing, lexicon, peer);
        } catch (const std::invalid_argument& e) {
            trace.emit(sim.now(), TraceCategory::Lifecycle, so.id,
                       std::string("abduction failed: ") + e.what());
            return;
        }
        for (Hypothesis& h : speculated) {
            TripleKey key(h.triple);
            if (so.store.contains(key)) continue;
            h.triple.source = so.id;
            h.triple.asserted_at = sim.now();
            so.store.assert_triple(h.triple);
            so.hypotheses[key] = h;
            trace.emit(sim.now(), TraceCategory::Lifecycle, so.id,
                       "hypothesis " + triple_text(h.triple) + " invented");
        }
    }

    void action_run_verification(Simulation& sim, const ScheduledActionSpec& spec) {
        SmartObject& so = agents.at(spec.node);
        for (auto& [key, hypothesis] : so.hypotheses) {
            if (hypothesis.state != HypothesisState::Pending) continue;
            HypothesisState verdict = settle_hypothesis(so.store, hypothesis,
                                                        scenario.thresholds, so.id, sim.now());
            if (verdict == HypothesisState::Pending) continue;
            trace.emit(sim.now(), TraceCategory::Lifecycle, spec.node,
                       "hypothesis " + triple_text(hypothesis.triple) + " " +
                           to_string(verdict) + " n=" + std::to_string(hypothesis.activations) +
                           " k=" + std::to_string(hypothesis.consistent));
        }
        // convergence diagnostics over the locally sampled attributes
        std::map<Term, std::vector<std::pair<Tick, double>>> series;
        for (const Observation& o : so.store.observations())
            if (!o.quarantined && o.numeric) series[o.attribute].emplace_back(o.timestamp, o.number);
        for (auto& [attr, samples] : series) {
            std::stable_sort(samples.begin(), samples.end(),
                             [](const auto& a, const auto& b) { return a.first < b.first; });
            std::vector<double> values;
            values.reserve(samples.size());
            for (const auto& [tick, v] : samples) values.push_back(v);
            bool converged = distribution_converged(values, scenario.thresholds);
            trace.emit(sim.now(), TraceCategory::Lifecycle, spec.node,
                       "convergence " + attr.text + (converged ? " true" : " false"));
        }
    }

    void action_extract_events(Simulation& sim, const ScheduledActionSpec& spec) {
        SmartObject& so = agents.at(spec.node);
        auto attr_it = spec.args.find("attr");
        if (attr_it == spec.args.end()) return;
        Term attr = Term::checked(attr_it->second);
        int k = 0;
        if (auto k_it = spec.args.find("k"); k_it != spec.args.end()) k = std::stoi(k_it->second);
        std::vector<std::pair<Tick, double>> samples;
        for (const Observation& o : so.store.observations())
            if (!o.quarantined && o.numeric && o.attribute == attr)
                samples.emplace_back(o.timestamp, o.number);
        std::stable_sort(samples.begin(), samples.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [tick, transition] : extract_events(samples, k))
            trace.emit(sim.now(), TraceCategory::Store, spec.node,
                       "event " + attr.text + " at=" + std::to_string(tick) + " " + transition);
    }

    void action_advertise(Simulation& sim, const ScheduledActionSpec& spec) {
        SmartObject& so = agents.at(spec.node);
        if (auto ad = advertise_services(so.store, so.id)) dispatch_broadcast(sim, spec.node, *ad);
    }

    void run_action(Simulation& sim, const ScheduledActionSpec& spec) {
        if (spec.action == "broadcast_query")
            action_broadcast_query(sim, spec);
        else if (spec.action == "run_induction")
            action_run_induction(sim, spec);
        else if (spec.action == "run_verification")
            action_run_verification(sim, spec);
        else if (spec.action == "extract_events")
            action_extract_events(sim, spec);
        else if (spec.action == "push_secondary")
            action_push_secondary(sim, spec);
        else if (spec.action == "advertise")
            action_advertise(sim, spec);
    }
};

}  // namespace

RunResult run_scenario(const Scenario& scenario, const Lexicon& lexicon,
                       const RunOptions& options) {
    validate_scenario(scenario);
    Runner runner(scenario, lexicon);
    const std::uint64_t seed = options.seed.value_or(scenario.seed);
    Simulation sim(scenario.nodes, scenario.links, scenario.profiles, seed, runner.trace);

    for (const NodeInfo& n : scenario.nodes) {
        if (n.role == NodeRole::Gateway) continue;
        SmartObject so;
        so.id = n.id;
        so.store.extend_predicates(scenario.extra_predicates);
        runner.agents.emplace(n.id, std::move(so));
    }

    for (const std::string& warning : vocabulary_warnings(scenario, lexicon))
        runner.trace.emit(0, TraceCategory::Store, "-", warning);

    // initial knowledge, then scheduled injections
    for (const TripleInjection& inj : scenario.triples) {
        if (inj.at == 0) {
            runner.assert_injection(sim, inj);
        } else {
            sim.schedule_action(inj.at,
                                [&runner, inj](Simulation& s) { runner.assert_injection(s, inj); });
        }
    }

    // synthetic streams: generated up front (in declaration order) so the
    // seed fully determines every value, then fed in as timed events
    for (const StreamSpec& spec : scenario.streams) {
        for (const Observation& obs : generate_stream(spec, sim.rng())) {
            sim.schedule_action(obs.timestamp, [&runner, node = spec.node, obs](Simulation& s) {
                runner.record_stream_observation(s, node, obs);
            });
        }
    }

    for (const ScheduledActionSpec& spec : scenario.schedule)
        sim.schedule_action(spec.tick,
                            [&runner, spec](Simulation& s) { runner.run_action(s, spec); });

    sim.set_delivery_handler([&runner](Simulation& s, const std::string& node, const Frame& frame,
                                       const Link& link) { runner.deliver(s, node, frame, link); });

    sim.run_until(options.until.value_or(scenario.duration));

    RunResult result;
    for (auto& [id, so] : runner.agents) {
        result.stores.emplace(id, std::move(so.store));
        result.hypotheses.emplace(id, std::move(so.hypotheses));
    }
    result.trace = std::move(runner.trace);
    result.trace_text = result.trace.to_text();
    return result;
}

std::string dump_store(const KnowledgeStore& store) { return serialize_store(store); }

}  // namespace knowmesh

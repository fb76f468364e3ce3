#include "knowmesh/lifecycle.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "knowmesh/errors.hpp"

namespace knowmesh {

void Thresholds::validate() const {
    auto fraction = [](double v, const char* name) {
        if (!(v > 0.0 && v < 1.0))
            throw ValidationError(std::string(name) + " must be in (0,1)");
    };
    fraction(theta_induction, "theta_induction");
    fraction(p_min, "p_min");
    fraction(cv_max, "cv_max");
    if (!(z > 0.0)) throw ValidationError("z must be positive");
    if (n_min < 1) throw ValidationError("n_min must be at least 1");
    if (window < 1) throw ValidationError("window must be at least 1");
}

void IntervalRule::validate() const {
    if (intervals.empty()) throw ValidationError("rule has no intervals");
    if (!(training_accuracy >= 0.0 && training_accuracy <= 1.0))
        throw ValidationError("training_accuracy outside [0,1]");
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        if (intervals[i].low > intervals[i].high)
            throw ValidationError("interval low exceeds high");
        if (i > 0 && intervals[i - 1].high >= intervals[i].low)
            throw ValidationError("intervals overlap");
    }
}

namespace {
struct ValueGroup {
    double value = 0.0;
    std::map<Term, int> counts;
    int total = 0;
};

struct SegChoice {
    int correct = -1;
    int segments = 0;
    std::vector<double> boundaries;
};

// correct desc, fewer segments, then lower boundary values
bool better(const SegChoice& a, const SegChoice& b) {
    if (a.correct != b.correct) return a.correct > b.correct;
    if (a.segments != b.segments) return a.segments < b.segments;
    return a.boundaries < b.boundaries;
}
}  // namespace

IntervalRule induce_interval_rules(const std::vector<Observation>& observations,
                                   const Thresholds&) {
    if (observations.size() < 2) throw InsufficientData("need at least 2 observations");
    const Term& attribute = observations.front().attribute;
    std::set<Term> labels;
    for (const Observation& o : observations) {
        if (o.attribute != attribute)
            throw MixedAttributes("observations mix attributes '" + attribute.text + "' and '" +
                                  o.attribute.text + "'");
        if (!o.numeric) throw NonNumericValues("observation value is not numeric");
        if (!o.label) throw InsufficientData("observation lacks a label");
        labels.insert(*o.label);
    }
    if (labels.size() < 2) throw InsufficientData("need at least 2 distinct labels");
    if (labels.size() > 16) throw InsufficientData("more than 16 distinct labels");

    // group samples by distinct value
    std::map<double, ValueGroup> by_value;
    for (const Observation& o : observations) {
        ValueGroup& g = by_value[o.number];
        g.value = o.number;
        ++g.counts[*o.label];
        ++g.total;
    }
    std::vector<ValueGroup> groups;
    groups.reserve(by_value.size());
    for (auto& [v, g] : by_value) groups.push_back(std::move(g));
    const int m = static_cast<int>(groups.size());

    // a boundary may sit between adjacent values only when their labels differ
    std::vector<bool> cut_allowed(m, false);  // cut_allowed[i]: between groups i-1 and i
    for (int i = 1; i < m; ++i) {
        const auto& a = groups[i - 1].counts;
        const auto& b = groups[i].counts;
        bool both_pure_same =
            a.size() == 1 && b.size() == 1 && a.begin()->first == b.begin()->first;
        cut_allowed[i] = !both_pure_same;
    }
    auto cut_value = [&](int i) { return (groups[i - 1].value + groups[i].value) / 2.0; };

    // each label owns at most one contiguous interval, so a segmentation
    // assigns distinct labels to segments; count of label l in [j..i)
    std::vector<Term> label_list(labels.begin(), labels.end());
    const int n_labels = static_cast<int>(label_list.size());
    auto label_count = [&](int j, int i, int l) {
        int total = 0;
        for (int g = j; g < i; ++g) {
            auto it = groups[g].counts.find(label_list[l]);
            if (it != groups[g].counts.end()) total += it->second;
        }
        return total;
    };

    // dp[i][mask]: best segmentation of groups [0..i) whose segments use
    // exactly the labels in mask
    std::vector<std::vector<SegChoice>> dp(m + 1, std::vector<SegChoice>(1 << n_labels));
    std::vector<std::vector<std::vector<Term>>> dp_labels(
        m + 1, std::vector<std::vector<Term>>(1 << n_labels));
    dp[0][0] = SegChoice{0, 0, {}};
    for (int i = 1; i <= m; ++i) {
        for (int j = 0; j < i; ++j) {
            if (j > 0 && !cut_allowed[j]) continue;
            for (int mask = 0; mask < (1 << n_labels); ++mask) {
                if (dp[j][mask].correct < 0) continue;
                for (int l = 0; l < n_labels; ++l) {
                    if (mask & (1 << l)) continue;
                    SegChoice cand = dp[j][mask];
                    cand.correct += label_count(j, i, l);
                    cand.segments += 1;
                    if (j > 0) cand.boundaries.push_back(cut_value(j));
                    int next_mask = mask | (1 << l);
                    if (better(cand, dp[i][next_mask])) {
                        dp[i][next_mask] = std::move(cand);
                        dp_labels[i][next_mask] = dp_labels[j][mask];
                        dp_labels[i][next_mask].push_back(label_list[l]);
                    }
                }
            }
        }
    }
    SegChoice best;
    std::vector<Term> best_labels;
    for (int mask = 0; mask < (1 << n_labels); ++mask) {
        if (better(dp[m][mask], best)) {
            best = dp[m][mask];
            best_labels = dp_labels[m][mask];
        }
    }

    // rebuild the winning segments from the boundary list
    IntervalRule rule;
    rule.attribute = attribute;
    rule.training_accuracy =
        static_cast<double>(best.correct) / static_cast<double>(observations.size());
    const std::vector<double>& bounds = best.boundaries;
    int start = 0;
    for (std::size_t b = 0; b <= bounds.size(); ++b) {
        int end = m;
        if (b < bounds.size()) {
            end = start;
            while (end < m && groups[end].value < bounds[b]) ++end;
        }
        LabeledInterval iv;
        iv.event = best_labels[b];
        iv.low = groups[start].value;
        iv.high = b < bounds.size() ? bounds[b] : groups[end - 1].value;
        rule.intervals.push_back(iv);
        start = end;
    }
    rule.validate();
    return rule;
}

std::optional<Term> classify(const IntervalRule& rule, double value) {
    for (const LabeledInterval& iv : rule.intervals)
        if (value >= iv.low && value <= iv.high) return iv.event;
    return std::nullopt;
}

PromotionOutcome evaluate_promotion(KnowledgeStore& store, const IntervalRule& rule,
                                    const Thresholds& thresholds, const std::string& source,
                                    Tick tick) {
    static const Term kSensor("sensor");
    static const Term kEvent("event");
    static const Term kElementOf("element_of");
    static const Term kClassifies("classifies");
    TripleKey element_key(rule.attribute, kElementOf, kSensor);
    if (rule.training_accuracy >= thresholds.theta_induction) {
        store.move_triple(element_key, KnowledgeLevel::Primary, source, tick);
        store.move_triple(TripleKey(rule.attribute, kClassifies, kEvent), KnowledgeLevel::Primary,
                          source, tick);
        store.release_quarantine(rule.attribute);
        return PromotionOutcome::Promoted;
    }
    store.remove_triple(element_key);
    return PromotionOutcome::Rejected;
}

const char* to_string(HypothesisState state) {
    switch (state) {
        case HypothesisState::Pending: return "pending";
        case HypothesisState::Asserted: return "asserted";
        case HypothesisState::Refuted: return "refuted";
    }
    return "?";
}

namespace {
const Term kIsA("is_a");
const Term kSynonymousTo("synonymous_to");

// terms reachable from `base` through peer is_a knowledge: direct supertypes,
// siblings under a shared subject, and the supertype closure of both
std::set<Term> isa_candidates(const Term& base, const std::vector<Triple>& peer) {
    std::map<Term, std::set<Term>> up;    // subject -> objects of is_a
    std::map<Term, std::set<Term>> down;  // object -> subjects of is_a
    for (const Triple& t : peer) {
        if (t.predicate != kIsA) continue;
        up[t.subject].insert(t.object);
        down[t.object].insert(t.subject);
    }
    std::set<Term> start;
    if (auto it = up.find(base); it != up.end()) start.insert(it->second.begin(), it->second.end());
    if (auto it = down.find(base); it != down.end())
        for (const Term& witness : it->second)
            if (auto u = up.find(witness); u != up.end())
                start.insert(u->second.begin(), u->second.end());
    start.erase(base);
    // supertype closure
    std::vector<Term> frontier(start.begin(), start.end());
    std::set<Term> seen = start;
    while (!frontier.empty()) {
        Term at = frontier.back();
        frontier.pop_back();
        if (auto it = up.find(at); it != up.end())
            for (const Term& o : it->second)
                if (o != base && seen.insert(o).second) frontier.push_back(o);
    }
    return seen;
}
}  // namespace

std::vector<Hypothesis> abduce(const KnowledgeStore& store, const Term& failing,
                               const Lexicon& lex, const std::vector<Triple>& peer_knowledge) {
    if (!store.mentions(failing))
        throw std::invalid_argument("failing term '" + failing.text + "' not present in store");

    std::set<Term> appearing;
    for (const Triple& t : peer_knowledge) {
        appearing.insert(t.subject);
        appearing.insert(t.object);
    }
    for (const auto& [key, t] : store.ontology()) {
        appearing.insert(t.subject);
        appearing.insert(t.object);
    }

    std::set<TripleKey> emitted;
    std::vector<Hypothesis> out;
    auto emit = [&](Term s, Term p, Term o) {
        TripleKey key(s, p, o);
        if (emitted.contains(key)) return;
        if (store.contains(key)) return;  // never duplicate existing knowledge
        if (p == kSynonymousTo && store.contains(TripleKey(o, p, s))) return;
        emitted.insert(key);
        Hypothesis h;
        h.triple = Triple{std::move(s), std::move(p), std::move(o), KnowledgeLevel::Invented,
                          "", 0};
        out.push_back(std::move(h));
    };

    constexpr int kMaxPathLen = 5;
    for (const Term& terminal : store.reachable(failing, kMaxPathLen)) {
        if (store.has_outgoing(terminal)) continue;
        std::set<Term> syns = lookup_synonyms(lex, terminal);
        for (const Term& syn : syns) {
            if (!appearing.contains(syn)) continue;
            // symmetric relation: keep one orientation, smaller term first
            const Term& a = std::min(terminal, syn);
            const Term& b = std::max(terminal, syn);
            emit(a, kSynonymousTo, b);
            for (const Term& target : isa_candidates(syn, peer_knowledge)) {
                if (target == terminal || syns.contains(target)) continue;
                emit(terminal, kIsA, target);
            }
        }
    }

    // "[noun] are red" style expansion over the dictionary
    for (const auto& [key, rule] : store.ontology()) {
        auto category = lookup_category(lex, rule.object);
        if (!category) continue;
        auto subject_pos = lookup_pos(lex, rule.subject);
        if (!subject_pos) continue;
        for (const Term& word : lex.dictionary) {
            if (word == rule.subject) continue;
            if (lookup_pos(lex, word) != subject_pos) continue;
            emit(word, rule.predicate, rule.object);
        }
    }
    return out;
}

Hypothesis record_activation(Hypothesis h, const Path& sample_path, bool consistent) {
    if (h.state != HypothesisState::Pending)
        throw StateViolation("hypothesis already " + std::string(to_string(h.state)));
    bool touches = false;
    for (const Triple& edge : sample_path) {
        if (edge.subject == h.triple.subject || edge.object == h.triple.subject ||
            edge.subject == h.triple.object || edge.object == h.triple.object) {
            touches = true;
            break;
        }
    }
    if (!touches) return h;
    ++h.activations;
    if (consistent) ++h.consistent;
    return h;
}

WilsonInterval wilson_interval(int successes, int trials, double z) {
    if (trials <= 0) return {0.0, 1.0};
    double n = trials;
    double p = static_cast<double>(successes) / n;
    double z2 = z * z;
    double denom = 1.0 + z2 / n;
    double center = p + z2 / (2.0 * n);
    double radius = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    WilsonInterval w;
    w.lower = std::max(0.0, (center - radius) / denom);
    w.upper = std::min(1.0, (center + radius) / denom);
    return w;
}

HypothesisState verify_hypothesis(const Hypothesis& h, const Thresholds& thresholds) {
    if (h.state != HypothesisState::Pending) return h.state;
    if (h.activations < thresholds.n_min) return HypothesisState::Pending;
    WilsonInterval w = wilson_interval(h.consistent, h.activations, thresholds.z);
    if (w.lower >= thresholds.p_min) return HypothesisState::Asserted;
    if (w.upper < thresholds.p_min) return HypothesisState::Refuted;
    return HypothesisState::Pending;
}

HypothesisState settle_hypothesis(KnowledgeStore& store, Hypothesis& h,
                                  const Thresholds& thresholds, const std::string& source,
                                  Tick tick) {
    HypothesisState verdict = verify_hypothesis(h, thresholds);
    if (h.state != HypothesisState::Pending) return h.state;
    TripleKey key(h.triple);
    if (verdict == HypothesisState::Asserted) {
        store.move_triple(key, KnowledgeLevel::Secondary, source, tick);
        h.state = HypothesisState::Asserted;
    } else if (verdict == HypothesisState::Refuted) {
        store.remove_triple(key);
        h.state = HypothesisState::Refuted;
    }
    return verdict;
}

namespace {
double mean_of(const double* begin, std::size_t n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += begin[i];
    return n ? sum / static_cast<double>(n) : 0.0;
}

double stddev_of(const double* begin, std::size_t n, double mean) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = begin[i] - mean;
        sum += d * d;
    }
    return n ? std::sqrt(sum / static_cast<double>(n)) : 0.0;
}
}  // namespace

bool distribution_converged(const std::vector<double>& values, const Thresholds& thresholds) {
    const std::size_t w = static_cast<std::size_t>(thresholds.window);
    if (values.size() < 2 * w) return false;
    const double* last = values.data() + values.size() - w;
    const double* prev = values.data() + values.size() - 2 * w;
    double m_last = mean_of(last, w);
    double m_prev = mean_of(prev, w);
    double sd_last = stddev_of(last, w, m_last);
    bool cv_ok;
    if (std::abs(m_last) < 1e-12) {
        cv_ok = sd_last < 1e-12;
    } else {
        cv_ok = sd_last / std::abs(m_last) <= thresholds.cv_max;
    }
    double m_all = mean_of(values.data(), values.size());
    bool drift_ok = std::abs(m_last - m_prev) <= thresholds.cv_max * std::abs(m_all);
    return cv_ok && drift_ok;
}

}  // namespace knowmesh

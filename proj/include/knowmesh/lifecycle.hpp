#pragma once

#include <optional>
#include <vector>

#include "knowmesh/knowledge.hpp"
#include "knowmesh/lexicon.hpp"

namespace knowmesh {

struct Thresholds {
    double theta_induction = 0.8;  // induced rule accuracy needed for promotion
    double p_min = 0.8;            // hypothesis acceptance probability floor
    double z = 1.96;               // Wilson confidence parameter (95%)
    int n_min = 10;                // activations needed before a verdict
    double cv_max = 0.25;          // coefficient-of-variation ceiling
    int window = 20;               // convergence window length

    void validate() const;  // throws ValidationError
};

struct LabeledInterval {
    Term event;
    double low = 0.0;
    double high = 0.0;
};

/// A per-attribute classifier: disjoint closed value intervals, at most one
/// per event label. A value belongs to the interval with low <= value <=
/// high. Interval bounds come from segmenting the sorted training values at
/// midpoints between differently-labeled neighbours; each interval starts at
/// the smallest value of its segment and runs up to the boundary above it
/// (the last one stops at its largest value), so values far outside the
/// training data stay unclassified.
struct IntervalRule {
    Term attribute;
    std::vector<LabeledInterval> intervals;  // ascending
    double training_accuracy = 0.0;

    void validate() const;  // throws ValidationError
};

/// Learns an IntervalRule from labeled numeric samples of one attribute.
/// Boundaries are chosen among the midpoints between adjacent
/// differently-labeled values to maximize accuracy under the
/// one-interval-per-label constraint; ties prefer fewer intervals, then
/// lower boundary values. Throws InsufficientData, MixedAttributes,
/// NonNumericValues.
IntervalRule induce_interval_rules(const std::vector<Observation>& observations,
                                   const Thresholds& thresholds);

/// The event whose interval contains `value`; nullopt when no interval does
/// (no nearest-interval snapping).
std::optional<Term> classify(const IntervalRule& rule, double value);

enum class PromotionOutcome { Promoted, Rejected };

/// Applies the accept/reject gate. Promoted: (attribute, element_of, sensor)
/// and (attribute, classifies, event) move into the ontology and the
/// attribute's quarantined foreign samples are released. Rejected: the
/// element_of candidate is dropped from the ontology; the caller is expected
/// to trigger abduction.
PromotionOutcome evaluate_promotion(KnowledgeStore& store, const IntervalRule& rule,
                                    const Thresholds& thresholds,
                                    const std::string& source = "local", Tick tick = 0);

enum class HypothesisState { Pending, Asserted, Refuted };

const char* to_string(HypothesisState state);

/// A speculative triple (level Invented) with its verification counters.
/// State only ever moves Pending -> Asserted or Pending -> Refuted.
struct Hypothesis {
    Triple triple;
    int activations = 0;
    int consistent = 0;
    HypothesisState state = HypothesisState::Pending;
};

/// Speculates new Invented triples when `failing` could not be classified:
/// walks the asserted graph from `failing` to its terminal entities, then
/// matches each terminal's synonyms against peer knowledge. A synonym found
/// in peer or local knowledge yields (terminal, synonymous_to, synonym); a
/// term reached from such a synonym through peer is_a links (shared-subject
/// siblings and their supertypes) yields (terminal, is_a, term). Primary
/// rules whose object has a category expand over same-part-of-speech
/// dictionary words. Results are deduplicated against existing knowledge;
/// symmetric synonymy hypotheses are oriented with the smaller term first.
std::vector<Hypothesis> abduce(const KnowledgeStore& store, const Term& failing,
                               const Lexicon& lex, const std::vector<Triple>& peer_knowledge);

/// Bumps the counters when `sample_path` touches the hypothesis triple's
/// subject or object; `consistent` additionally counts when the sample
/// classified successfully. Throws StateViolation on a settled hypothesis.
Hypothesis record_activation(Hypothesis h, const Path& sample_path, bool consistent);

struct WilsonInterval {
    double lower = 0.0;
    double upper = 1.0;
};

/// Wilson score interval for `successes` out of `trials` at confidence z.
WilsonInterval wilson_interval(int successes, int trials, double z);

/// Pending below n_min activations; then Asserted when the Wilson lower bound
/// reaches p_min, Refuted when the upper bound stays below it.
HypothesisState verify_hypothesis(const Hypothesis& h, const Thresholds& thresholds);

/// Applies a verdict to the store: Asserted moves the triple to the
/// parameters partition at Secondary, Refuted removes it. Returns the verdict.
HypothesisState settle_hypothesis(KnowledgeStore& store, Hypothesis& h,
                                  const Thresholds& thresholds,
                                  const std::string& source = "local", Tick tick = 0);

/// True when at least 2*window samples exist, the last window's coefficient
/// of variation is at most cv_max, and the means of the last two windows
/// differ by at most cv_max * |overall mean|.
bool distribution_converged(const std::vector<double>& values, const Thresholds& thresholds);

}  // namespace knowmesh

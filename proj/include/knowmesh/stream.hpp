#pragma once

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "knowmesh/knowledge.hpp"

namespace knowmesh {

struct LabelRange {
    Term label;
    double low = 0.0;
    double high = 0.0;
};

/// Synthetic sensor stream: `count` samples of one attribute, labels cycling
/// round-robin through `labels` with values drawn uniformly from each label's
/// range, timestamped start_tick, start_tick + interval, ...
struct StreamSpec {
    std::string node;
    Term attribute;
    Term unit;
    std::vector<LabelRange> labels;
    int count = 0;
    Tick start_tick = 0;
    Tick interval = 1;
};

std::vector<Observation> generate_stream(const StreamSpec& spec, std::mt19937_64& rng);

/// Change-of-state extraction over a tick-ordered sample series: one event
/// wherever the value differs from its predecessor, reported as
/// "<prev>-><curr>". With periodic_k > 0 every k-th sample becomes an event
/// instead, regardless of value.
std::vector<std::pair<Tick, std::string>> extract_events(
    const std::vector<std::pair<Tick, double>>& samples, int periodic_k = 0);

}  // namespace knowmesh

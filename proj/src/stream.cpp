#include "knowmesh/stream.hpp"

#include "knowmesh/errors.hpp"
#include "knowmesh/netsim.hpp"

namespace knowmesh {

std::vector<Observation> generate_stream(const StreamSpec& spec, std::mt19937_64& rng) {
    if (spec.labels.empty()) throw ValidationError("stream needs at least one label range");
    std::vector<Observation> out;
    out.reserve(static_cast<std::size_t>(spec.count));
    for (int i = 0; i < spec.count; ++i) {
        const LabelRange& range = spec.labels[static_cast<std::size_t>(i) % spec.labels.size()];
        Observation o;
        o.attribute = spec.attribute;
        o.numeric = true;
        o.number = uniform_in(rng, range.low, range.high);
        o.unit = spec.unit;
        o.label = range.label;
        o.timestamp = spec.start_tick + static_cast<Tick>(i) * spec.interval;
        o.source = spec.node;
        o.quarantined = false;
        out.push_back(std::move(o));
    }
    return out;
}

std::vector<std::pair<Tick, std::string>> extract_events(
    const std::vector<std::pair<Tick, double>>& samples, int periodic_k) {
    std::vector<std::pair<Tick, std::string>> events;
    if (periodic_k > 0) {
        for (std::size_t i = periodic_k - 1; i < samples.size();
             i += static_cast<std::size_t>(periodic_k))
            events.emplace_back(samples[i].first, "periodic");
        return events;
    }
    for (std::size_t i = 1; i < samples.size(); ++i) {
        if (samples[i].second != samples[i - 1].second)
            events.emplace_back(samples[i].first, format_number(samples[i - 1].second) + "->" +
                                                      format_number(samples[i].second));
    }
    return events;
}

}  // namespace knowmesh

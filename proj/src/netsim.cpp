#include "knowmesh/netsim.hpp"

#include <algorithm>
#include <sstream>

#include "knowmesh/errors.hpp"

namespace knowmesh {

const char* to_string(NodeRole role) {
    switch (role) {
        case NodeRole::Device: return "device";
        case NodeRole::Gateway: return "gateway";
        case NodeRole::Edge: return "edge";
        case NodeRole::Cloud: return "cloud";
    }
    return "?";
}

std::optional<NodeRole> role_from_string(std::string_view s) {
    if (s == "device") return NodeRole::Device;
    if (s == "gateway") return NodeRole::Gateway;
    if (s == "edge") return NodeRole::Edge;
    if (s == "cloud") return NodeRole::Cloud;
    return std::nullopt;
}

double uniform_in(std::mt19937_64& rng, double lo, double hi) {
    double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * unit;
}

Simulation::Simulation(std::vector<NodeInfo> nodes, std::vector<Link> links,
                       std::vector<ProtocolProfile> profiles, std::uint64_t seed,
                       TraceLog& trace)
    : nodes_(std::move(nodes)),
      links_(std::move(links)),
      profiles_(std::move(profiles)),
      rng_(seed),
      trace_(trace) {}

const NodeInfo& Simulation::node(const std::string& id) const {
    for (const NodeInfo& n : nodes_)
        if (n.id == id) return n;
    throw ValidationError("unknown node '" + id + "'");
}

bool Simulation::has_node(const std::string& id) const {
    for (const NodeInfo& n : nodes_)
        if (n.id == id) return true;
    return false;
}

std::vector<const Link*> Simulation::outgoing_links(const std::string& id) const {
    std::vector<const Link*> out;
    for (const Link& l : links_)
        if (l.from == id || (l.mode == LinkMode::Duplex && l.to == id)) out.push_back(&l);
    return out;
}

std::vector<const Link*> Simulation::incident_links(const std::string& id) const {
    std::vector<const Link*> out;
    for (const Link& l : links_)
        if (l.from == id || l.to == id) out.push_back(&l);
    return out;
}

SendOutcome Simulation::schedule_send(const Frame& frame, const Link& link,
                                      const std::string& from) {
    if (link.from != from && link.to != from)
        throw ValidationError("node '" + from + "' is not an endpoint of the link");
    if (link.mode == LinkMode::Simplex && link.from != from)
        throw SimplexViolation("cannot send from '" + from + "' against the simplex link " +
                               link.from + "->" + link.to);
    const std::string to = link.from == from ? link.to : link.from;
    const ProtocolProfile& profile = find_profile(profiles_, frame.profile);
    const std::int64_t size = static_cast<std::int64_t>(frame_wire_size(frame, profile));
    std::size_t link_index = links_.size();
    if (&link >= links_.data() && &link < links_.data() + links_.size()) {
        link_index = static_cast<std::size_t>(&link - links_.data());
    } else {  // caller passed a copy; locate the matching stored link
        for (std::size_t i = 0; i < links_.size(); ++i)
            if (links_[i].from == link.from && links_[i].to == link.to) {
                link_index = i;
                break;
            }
        if (link_index == links_.size()) throw ValidationError("link is not part of this simulation");
    }
    std::ostringstream what;
    what << to << ' ' << frame.profile << ' ' << frame.message_id << " frag " << frame.index
         << '/' << frame.count << " bytes=" << size;
    ++sent_;
    trace_.emit(now_, TraceCategory::Send, from, what.str());
    // the transmission occupies the link direction even when the frame is lost
    Tick& busy_until = link_busy_until_[{link_index, link.from == from}];
    Tick start = std::max(now_, busy_until);
    Tick finish = start + (size + link.bandwidth - 1) / link.bandwidth;
    busy_until = finish;
    if (uniform_in(rng_, 0.0, 1.0) < link.loss_probability) {
        ++dropped_;
        trace_.emit(now_, TraceCategory::Drop, from, what.str() + " loss");
        return SendOutcome::Dropped;
    }
    Event e;
    e.time = finish + link.latency;
    e.delivery = Delivery{frame, link_index, to, from};
    push_event(std::move(e));
    return SendOutcome::Scheduled;
}

std::size_t Simulation::broadcast(const std::vector<Frame>& frames, const std::string& from) {
    std::size_t scheduled = 0;
    for (const Link* link : outgoing_links(from))
        for (const Frame& frame : frames)
            if (schedule_send(frame, *link, from) == SendOutcome::Scheduled) ++scheduled;
    return scheduled;
}

void Simulation::schedule_action(Tick at, Action action) {
    Event e;
    e.time = at;
    e.action = std::move(action);
    push_event(std::move(e));
}

void Simulation::push_event(Event e) {
    if (e.time < now_) e.time = now_;
    e.seq = next_seq_++;
    queue_.push(std::move(e));
}

void Simulation::run_until(Tick t_end) {
    while (!queue_.empty() && queue_.top().time <= t_end) {
        Event e = queue_.top();
        queue_.pop();
        now_ = e.time;
        if (e.delivery) {
            const Delivery& d = *e.delivery;
            ++delivered_;
            std::ostringstream what;
            what << d.from << ' ' << d.frame.profile << ' ' << d.frame.message_id << " frag "
                 << d.frame.index << '/' << d.frame.count;
            trace_.emit(now_, TraceCategory::Deliver, d.to, what.str());
            if (handler_) handler_(*this, d.to, d.frame, links_[d.link_index]);
        } else if (e.action) {
            e.action(*this);
        }
    }
    if (now_ < t_end) now_ = t_end;
}

}  // namespace knowmesh

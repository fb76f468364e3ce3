#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "knowmesh/message.hpp"
#include "knowmesh/trace.hpp"

namespace knowmesh {

enum class NodeRole { Device, Gateway, Edge, Cloud };
enum class LinkMode { Simplex, Duplex };

const char* to_string(NodeRole role);
std::optional<NodeRole> role_from_string(std::string_view s);

struct NodeInfo {
    std::string id;
    NodeRole role = NodeRole::Device;
    std::string profile;  // protocol profile name
};

struct Link {
    std::string from;
    std::string to;
    Tick latency = 0;
    std::int64_t bandwidth = 1;  // bytes per tick
    double loss_probability = 0.0;
    LinkMode mode = LinkMode::Duplex;

    bool connects(const std::string& a, const std::string& b) const {
        return (from == a && to == b) || (from == b && to == a);
    }
};

enum class SendOutcome { Scheduled, Dropped };

/// Deterministic discrete-event transport. A frame occupies its link
/// direction for ceil(size/bandwidth) ticks (transmissions queue behind each
/// other, which keeps every link FIFO) and then arrives after the link
/// latency; each transmission takes an independent seeded loss draw. Events
/// are processed strictly in (time, insertion) order, so a run is a pure
/// function of its inputs.
class Simulation {
public:
    using DeliveryHandler =
        std::function<void(Simulation&, const std::string& node, const Frame& frame,
                           const Link& link)>;
    using Action = std::function<void(Simulation&)>;

    Simulation(std::vector<NodeInfo> nodes, std::vector<Link> links,
               std::vector<ProtocolProfile> profiles, std::uint64_t seed, TraceLog& trace);

    void set_delivery_handler(DeliveryHandler handler) { handler_ = std::move(handler); }

    Tick now() const { return now_; }
    const std::vector<NodeInfo>& nodes() const { return nodes_; }
    const std::vector<Link>& links() const { return links_; }
    const NodeInfo& node(const std::string& id) const;
    bool has_node(const std::string& id) const;
    const std::vector<ProtocolProfile>& profiles() const { return profiles_; }
    std::mt19937_64& rng() { return rng_; }

    /// Links a frame can leave `id` on without violating a simplex direction.
    std::vector<const Link*> outgoing_links(const std::string& id) const;
    /// Every link touching `id`, regardless of direction.
    std::vector<const Link*> incident_links(const std::string& id) const;

    /// Queues a delivery of `frame` from `from` over `link`, or drops it on
    /// the loss draw. Throws SimplexViolation when `from` would have to send
    /// against the link direction.
    SendOutcome schedule_send(const Frame& frame, const Link& link, const std::string& from);

    /// Fan-out: schedules every frame on every outgoing link of `from`.
    /// Returns the number of scheduled (non-dropped) deliveries.
    std::size_t broadcast(const std::vector<Frame>& frames, const std::string& from);

    void schedule_action(Tick at, Action action);

    /// Processes queued events with time <= t_end in (time, sequence) order,
    /// then advances the clock to t_end.
    void run_until(Tick t_end);

    std::size_t sent() const { return sent_; }
    std::size_t delivered() const { return delivered_; }
    std::size_t dropped() const { return dropped_; }

private:
    struct Delivery {
        Frame frame;
        std::size_t link_index;
        std::string to;
        std::string from;
    };
    struct Event {
        Tick time = 0;
        std::uint64_t seq = 0;
        // exactly one of the two is set
        std::optional<Delivery> delivery;
        Action action;
    };
    struct EventAfter {
        bool operator()(const Event& a, const Event& b) const {
            if (a.time != b.time) return a.time > b.time;
            return a.seq > b.seq;
        }
    };

    void push_event(Event e);

    std::vector<NodeInfo> nodes_;
    std::vector<Link> links_;
    std::vector<ProtocolProfile> profiles_;
    std::mt19937_64 rng_;
    TraceLog& trace_;
    DeliveryHandler handler_;
    std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
    std::map<std::pair<std::size_t, bool>, Tick> link_busy_until_;  // (link, forward?)
    Tick now_ = 0;
    std::uint64_t next_seq_ = 0;
    std::size_t sent_ = 0, delivered_ = 0, dropped_ = 0;
};

/// Uniform double in [lo, hi) from the top 53 bits of the generator; avoids
/// std::uniform_real_distribution so streams are identical across platforms.
double uniform_in(std::mt19937_64& rng, double lo, double hi);

}  // namespace knowmesh

#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace knowmesh {

/// Resource envelope of an application protocol: header size, message size
/// ceiling, per-frame payload, duplex capability, and a lightness ordinal
/// (coap lightest ... http heaviest).
struct ProtocolProfile {
    std::string name;
    std::size_t header_bytes = 0;
    std::size_t max_message_bytes = 0;
    std::size_t frame_payload_bytes = 0;
    bool duplex = true;
    int weight_class = 0;

    void validate() const;  // throws ValidationError
};

/// The four built-in envelopes. CoAP carries a 2-byte header and a 256 MB
/// message ceiling; the others are documented defaults that preserve the
/// coap < mqtt <= amqp < http ordering. Scenarios may override fields.
std::vector<ProtocolProfile> default_profiles();

/// Looks up a profile by name in `table`; throws ValidationError when absent.
const ProtocolProfile& find_profile(const std::vector<ProtocolProfile>& table,
                                    const std::string& name);

/// The envelope a link between two endpoints runs under: the lighter
/// (more constrained) of the two profiles governs the exchange.
const ProtocolProfile& lighter_profile(const ProtocolProfile& a, const ProtocolProfile& b);

}  // namespace knowmesh

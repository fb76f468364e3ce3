#include "knowmesh/profiles.hpp"

#include "knowmesh/errors.hpp"

namespace knowmesh {

void ProtocolProfile::validate() const {
    if (name.empty()) throw ValidationError("profile needs a name");
    if (frame_payload_bytes == 0) throw ValidationError("frame_payload_bytes must be positive");
    if (frame_payload_bytes > max_message_bytes)
        throw ValidationError("frame payload exceeds the message ceiling of " + name);
}

std::vector<ProtocolProfile> default_profiles() {
    constexpr std::size_t kMiB = 1024 * 1024;
    return {
        {"coap", 2, 256 * kMiB, 1024, true, 0},
        {"mqtt", 16, 256 * kMiB, 65536, true, 1},
        {"amqp", 32, 256 * kMiB, 65536, true, 2},
        {"http", 256, 1024 * kMiB, kMiB, true, 3},
    };
}

const ProtocolProfile& find_profile(const std::vector<ProtocolProfile>& table,
                                    const std::string& name) {
    for (const ProtocolProfile& p : table)
        if (p.name == name) return p;
    throw ValidationError("unknown protocol profile '" + name + "'");
}

const ProtocolProfile& lighter_profile(const ProtocolProfile& a, const ProtocolProfile& b) {
    return b.weight_class < a.weight_class ? b : a;
}

}  // namespace knowmesh

#include "knowmesh/trace.hpp"

#include <sstream>

namespace knowmesh {

const char* to_string(TraceCategory category) {
    switch (category) {
        case TraceCategory::Send: return "send";
        case TraceCategory::Deliver: return "deliver";
        case TraceCategory::Drop: return "drop";
        case TraceCategory::Lifecycle: return "lifecycle";
        case TraceCategory::Store: return "store";
    }
    return "?";
}

void TraceLog::emit(Tick tick, TraceCategory category, const std::string& node,
                    const std::string& detail) {
    records_.push_back(TraceRecord{tick, category, node, detail});
}

std::size_t TraceLog::count(TraceCategory category) const {
    std::size_t n = 0;
    for (const TraceRecord& r : records_)
        if (r.category == category) ++n;
    return n;
}

std::string TraceLog::to_text() const {
    std::ostringstream os;
    for (const TraceRecord& r : records_)
        os << r.tick << '\t' << to_string(r.category) << '\t' << r.node << '\t' << r.detail
           << '\n';
    os << "# sent=" << count(TraceCategory::Send) << " delivered=" << count(TraceCategory::Deliver)
       << " dropped=" << count(TraceCategory::Drop) << '\n';
    return os.str();
}

}  // namespace knowmesh

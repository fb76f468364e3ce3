#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "knowmesh/knowledge.hpp"

namespace knowmesh {

enum class TraceCategory { Send, Deliver, Drop, Lifecycle, Store };

const char* to_string(TraceCategory category);

struct TraceRecord {
    Tick tick = 0;
    TraceCategory category = TraceCategory::Store;
    std::string node;
    std::string detail;
};

/// Append-only event log. Records stay in emission order; the text form is
/// one tab-separated line per record plus a sent/delivered/dropped footer.
class TraceLog {
public:
    void emit(Tick tick, TraceCategory category, const std::string& node,
              const std::string& detail);
    const std::vector<TraceRecord>& records() const { return records_; }
    std::size_t count(TraceCategory category) const;
    std::string to_text() const;

private:
    std::vector<TraceRecord> records_;
};

}  // namespace knowmesh

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace knowmesh {

// Text-format failures carry the 1-based line number of the offending line
// (0 when no line context exists, e.g. while reassembling frames).
struct ParseError : std::runtime_error {
    std::size_t line;
    ParseError(std::size_t line_, const std::string& what_)
        : std::runtime_error(line_ ? "line " + std::to_string(line_) + ": " + what_ : what_),
          line(line_) {}
};

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// term / store
struct EmptyTerm : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonCanonicalTerm : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct LevelConflict : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnknownPredicate : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// lifecycle
struct InsufficientData : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MixedAttributes : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonNumericValues : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct StateViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// exchange / framing
struct MessageTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IncompleteMessage : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ProfileMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnknownKind : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// netsim
struct SimplexViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace knowmesh

#pragma once

#include <stdexcept>
#include <string>

namespace skelbd {

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// File-format violation; carries the 1-based line number where parsing failed.
struct ParseError : Error {
    int line;
    ParseError(const std::string& msg, int line_number)
        : Error(msg + " (line " + std::to_string(line_number) + ")"), line(line_number) {}
};

struct IoError : Error {
    using Error::Error;
};

struct NotOnChain : Error {
    using Error::Error;
};
struct RootHasNoBone : Error {
    using Error::Error;
};
struct UnsupportedJointCount : Error {
    using Error::Error;
};
struct NonUnitAxis : Error {
    using Error::Error;
};
struct NonUnitQuaternion : Error {
    using Error::Error;
};
struct ChainMismatch : Error {
    using Error::Error;
};
struct NonFiniteTarget : Error {
    using Error::Error;
};
struct SequenceTooShort : Error {
    using Error::Error;
};
struct DegenerateBone : Error {
    using Error::Error;
};
struct UnknownTrigger : Error {
    using Error::Error;
};
struct EmptyDataset : Error {
    using Error::Error;
};
struct TargetClassEmpty : Error {
    using Error::Error;
};
struct LabelOutOfRange : Error {
    using Error::Error;
};
struct EmptyAngles : Error {
    using Error::Error;
};
struct BinMismatch : Error {
    using Error::Error;
};

}  // namespace skelbd

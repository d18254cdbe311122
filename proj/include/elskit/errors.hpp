#pragma once

#include <stdexcept>
#include <string>

namespace elskit {

// Base class for all library errors. Every message names the violated
// precondition so CLI output stays actionable.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct EncodingError : Error {
    using Error::Error;
};
struct EmptyTextError : Error {
    using Error::Error;
};
struct SectionError : Error {
    using Error::Error;
};
struct LayoutError : Error {
    using Error::Error;
};
struct NonCoprimeKeyError : Error {
    using Error::Error;
};
struct TractabilityError : Error {
    using Error::Error;
};
struct ComparisonError : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};
struct ScoreError : Error {
    using Error::Error;
};
struct RangeError : Error {
    using Error::Error;
};
struct IoError : Error {
    using Error::Error;
};
struct StaleCheckpointError : Error {
    using Error::Error;
};
struct PromotionError : Error {
    using Error::Error;
};

} // namespace elskit

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pcg {

// Stable error codes; mirrored one-to-one by the C API status enum.
enum class ErrorCode : int32_t {
    Ok           = 0,
    InvalidArg   = 1,
    Io           = 2,
    Format       = 3,
    Consistency  = 4,
    ZeroRow      = 5,
    Degenerate   = 6,
    Config       = 7,
    VerifyFailed = 8,
    Internal     = 9,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string & msg) : std::runtime_error(msg), code_(code) {}
    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

struct InvalidArgError : Error {
    explicit InvalidArgError(const std::string & msg) : Error(ErrorCode::InvalidArg, msg) {}
};

struct IoError : Error {
    explicit IoError(const std::string & msg) : Error(ErrorCode::Io, msg) {}
};

// Bad magic, bad version, unknown dtype/rule id, truncated payload.
struct FormatError : Error {
    explicit FormatError(const std::string & msg) : Error(ErrorCode::Format, msg) {}
};

// Structurally well-formed data that violates an index invariant.
struct ConsistencyError : Error {
    explicit ConsistencyError(const std::string & msg) : Error(ErrorCode::Consistency, msg) {}
};

struct ZeroRowError : Error {
    explicit ZeroRowError(uint64_t row)
        : Error(ErrorCode::ZeroRow, "embedding row " + std::to_string(row) + " has near-zero norm") {}
};

// A zero denominator in an acceptance ratio or an all-zero residual.
// Signals a caller contract violation, not a numerical event to be clamped.
struct DegenerateError : Error {
    explicit DegenerateError(const std::string & msg) : Error(ErrorCode::Degenerate, msg) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string & msg) : Error(ErrorCode::Config, msg) {}
};

} // namespace pcg

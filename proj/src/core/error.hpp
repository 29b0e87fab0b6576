#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace merank {

// Error taxonomy shared by the C++ core and the C API status codes.
enum class ErrorCode {
    InvalidArgument = 1,  // caller violated a precondition / bad flag
    Data = 2,             // malformed records, duplicate ids, range violations
    Backend = 3,          // unknown refs, protocol or transport failures
    Numeric = 4,          // solver or fit non-convergence
    Io = 5,               // filesystem problems
    Immutable = 6,        // mutation of a sealed anchor store
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, std::string message) {
    throw Error(code, std::move(message));
}

}  // namespace merank

#pragma once

#include <stdexcept>
#include <string>

namespace adstest {

// Error taxonomy shared across the library. The C API maps each family to a
// status code; inside the library everything throws.

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct CodecError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

struct TransportError : Error {
    enum class Kind { connect, timeout, protocol, closed };
    TransportError(Kind k, const std::string& what) : Error(what), kind(k) {}
    Kind kind;
};

struct InvalidArgument : Error {
    using Error::Error;
};

} // namespace adstest

#pragma once

#include <stdexcept>
#include <string>

namespace polyes {

enum class Errc {
    MalformedWav,
    UnsupportedFormat,
    IoError,
    InvalidSpec,
    InvalidSize,
    LengthMismatch,
    ConfigMismatch,
    InvalidBoundaries,
    InvalidConfig,
    ArityMismatch,
    InsufficientOffspring,
    ShapeMismatch,
    EmptySignal,
    MalformedReport,
};

const char* to_string(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it onto an exit status.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace polyes

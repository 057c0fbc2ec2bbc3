#include "polyes/error.hpp"

namespace polyes {

const char* to_string(Errc code) noexcept {
    switch (code) {
    case Errc::MalformedWav: return "MalformedWav";
    case Errc::UnsupportedFormat: return "UnsupportedFormat";
    case Errc::IoError: return "IoError";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::InvalidSize: return "InvalidSize";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::ConfigMismatch: return "ConfigMismatch";
    case Errc::InvalidBoundaries: return "InvalidBoundaries";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::ArityMismatch: return "ArityMismatch";
    case Errc::InsufficientOffspring: return "InsufficientOffspring";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::EmptySignal: return "EmptySignal";
    case Errc::MalformedReport: return "MalformedReport";
    }
    return "Unknown";
}

}  // namespace polyes

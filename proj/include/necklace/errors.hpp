#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace necklace {

enum class ErrorKind {
    PreconditionViolation,
    BadRadii,
    CenterOffPlane,
    CirclesIntersect,
    NonConvergent,
    Infeasible,
    Degenerate,
    ResolutionTooCoarse,
    DegenerateFit,
    Contradiction,
    CoverBroken,
    CollarFail,
    ParseError,
};

[[nodiscard]] std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above so
/// callers (and the CLI exit-code mapping) can branch without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& what) {
    if (!condition) throw Error(kind, what);
}

}  // namespace necklace

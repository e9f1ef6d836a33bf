#ifndef IRKA_ERROR_HPP
#define IRKA_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace irka
{

enum class ErrorCode
{
    SingularShift,
    NoConvergence,
    UnstableMatrix,
    RankDeficient,
    RankCollapse,
    SizeMismatch,
    EmptySet,
    BadSpec,
    NotConjugateClosed,
    ShiftCollision,
    ShiftEigCollision,
    PoleHit,
    DenominatorCollapse,
    CertificateInvalid,
    ZeroEigenvalue,
    ParseError,
    UnsupportedField,
    DimensionMismatch,
    IoError,
    InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

///
/// Single exception type for the library. The code identifies the failure
/// class; the message carries context (iteration index, file line, ...).
///
class Error : public std::runtime_error
{
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what),
          code_(code)
    {
    }

    ErrorCode code() const noexcept
    {
        return code_;
    }

private:
    ErrorCode code_;
};

} // namespace irka

#endif /* IRKA_ERROR_HPP */

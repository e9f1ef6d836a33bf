#include <irka/error.hpp>

namespace irka
{

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code)
    {
        case ErrorCode::SingularShift:       return "SingularShift";
        case ErrorCode::NoConvergence:       return "NoConvergence";
        case ErrorCode::UnstableMatrix:      return "UnstableMatrix";
        case ErrorCode::RankDeficient:       return "RankDeficient";
        case ErrorCode::RankCollapse:        return "RankCollapse";
        case ErrorCode::SizeMismatch:        return "SizeMismatch";
        case ErrorCode::EmptySet:            return "EmptySet";
        case ErrorCode::BadSpec:             return "BadSpec";
        case ErrorCode::NotConjugateClosed:  return "NotConjugateClosed";
        case ErrorCode::ShiftCollision:      return "ShiftCollision";
        case ErrorCode::ShiftEigCollision:   return "ShiftEigCollision";
        case ErrorCode::PoleHit:             return "PoleHit";
        case ErrorCode::DenominatorCollapse: return "DenominatorCollapse";
        case ErrorCode::CertificateInvalid:  return "CertificateInvalid";
        case ErrorCode::ZeroEigenvalue:      return "ZeroEigenvalue";
        case ErrorCode::ParseError:          return "ParseError";
        case ErrorCode::UnsupportedField:    return "UnsupportedField";
        case ErrorCode::DimensionMismatch:   return "DimensionMismatch";
        case ErrorCode::IoError:             return "IoError";
        case ErrorCode::InvalidArgument:     return "InvalidArgument";
    }
    return "Unknown";
}

} // namespace irka

#ifndef IRKA_LTI_HPP
#define IRKA_LTI_HPP

#include <cstdint>

#include <irka/linalg.hpp>

namespace irka
{

///
/// Real SISO state-space system `x' = A x + b u`, `y = c^T x`.
///
/// Stability is a query, not an invariant: intermediate reduced models of
/// the fixed-point iteration are allowed to be unstable.
///
struct LtiSystem
{
    RMatrix A;
    RVector b;
    RVector c;

    LtiSystem() = default;
    LtiSystem(RMatrix A_, RVector b_, RVector c_);

    Eigen::Index order() const noexcept
    {
        return A.rows();
    }
};

namespace lti
{

/// `H(s) = c^T (s I - A)^{-1} b`
Complex eval_transfer(const LtiSystem& sys, Complex s);

/// `H'(s) = -w^T v` with `v = (sI-A)^{-1} b`, `w = (sI-A)^{-T} c`.
Complex eval_transfer_deriv(const LtiSystem& sys, Complex s);

/// Strict: every eigenvalue of A has negative real part.
bool is_stable(const LtiSystem& sys);

/// `sqrt(c^T P c)` with `A P + P A^T + b b^T = 0`.
double h2_norm(const LtiSystem& sys);

/// H2 norm of `H - H_r`, through the block-diagonal difference system.
double h2_error(const LtiSystem& full, const LtiSystem& reduced);

/// Spectrum descriptor for the synthetic system generator.
struct SpectrumSpec
{
    enum class Kind
    {
        RealInterval, ///< real poles uniform in [-real_max, -real_min]
        CdLike,       ///< lightly damped complex pairs, log-spread frequencies
    };
    Kind kind       = Kind::RealInterval;
    double real_min = 1.0;
    double real_max = 10.0;
    double freq_min = 10.0;   ///< CdLike: natural frequency range
    double freq_max = 1e4;
    double damp_min = 0.005;  ///< CdLike: damping ratio range
    double damp_max = 0.05;
    bool scramble   = true;   ///< apply a seeded similarity transform

    static SpectrumSpec real_interval(double lo, double hi, bool scramble = true);
    static SpectrumSpec cd_like();
};

///
/// Seeded stable test system. The spectrum is drawn per `spec`, laid out in
/// real block-diagonal form and (optionally) scrambled by a well-conditioned
/// real similarity. Deterministic for a fixed seed.
///
LtiSystem synth_random_stable(Eigen::Index n, std::uint64_t seed,
                              const SpectrumSpec& spec);

} // namespace lti
} // namespace irka

#endif /* IRKA_LTI_HPP */

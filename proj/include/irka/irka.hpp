#ifndef IRKA_IRKA_HPP
#define IRKA_IRKA_HPP

///
/// \file irka.hpp
///
/// The fixed-point iteration `s <- -eig(A_r(s))` on interpolation points,
/// optionally blended with exact pole placement:
///
///     q_blend = alpha q + (1 - alpha) f,   f = feedback_vector(s)
///
/// so that `alpha = 1` is the plain iteration and `alpha = 0` leaves the
/// shifts unchanged.
///

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <irka/diagnostics.hpp>
#include <irka/interpolation.hpp>
#include <irka/lti.hpp>
#include <irka/placement.hpp>
#include <irka/shifts.hpp>

namespace irka
{

enum class UpdateMode
{
    Vanilla,
    Blended,
};

struct AlphaSchedule
{
    enum class Kind
    {
        Constant,
        /// Start at 1, halve when `d` grows between iterations, reset to 1
        /// after a decrease. A heuristic, not a convergence guarantee.
        Backoff,
    };
    Kind kind    = Kind::Constant;
    double value = 1.0;

    static AlphaSchedule constant(double alpha)
    {
        return {Kind::Constant, alpha};
    }
    static AlphaSchedule backoff()
    {
        return {Kind::Backoff, 1.0};
    }
};

enum class StopRule
{
    Matching,              ///< d <= tol max|s|
    HausdorffThenMatching, ///< h <= tol max|s|, then d <= tol max|s|
    Certificate,           ///< eps_bullet <= tol
};

enum class InitMode
{
    Logspace, ///< real points, log-spaced between min and max |eig(A)|
    Random,   ///< seeded moduli in the same range, paired up off the axis
};

struct IrkaConfig
{
    std::size_t r     = 1;
    double tol        = 1e-8;
    int max_iter      = 100;
    UpdateMode update_mode = UpdateMode::Vanilla;
    AlphaSchedule alpha;
    StopRule stop_rule   = StopRule::Matching;
    int cycle_max_period = 4;
    std::uint64_t seed   = 0;
    InitMode init        = InitMode::Logspace;
    /// Evaluate the blend identity on every iteration (`kv_residual`).
    bool verify = false;

    /// Throws `BadSpec` (or `InvalidArgument` for `r > n`).
    void validate(std::size_t n) const;
};

struct IterationRecord
{
    int k = 0;
    ShiftSet sigma_in;
    std::vector<Complex> mu_out;
    double q_norm     = 0.0;
    double d          = 0.0;
    double h          = 0.0;
    double kappa_C    = 0.0;
    double kappa_V    = 0.0;
    double cos_angle  = 0.0;
    double eps        = 0.0;
    double eps_bullet = 0.0;
    int flipped       = 0;
    double alpha_used = 1.0;

    double cond_L             = 0.0;
    double companion_residual = 0.0;
    double eigvec_residual    = 0.0;
    /// max_i |H(s_i) - H_r(s_i)| / (1 + |H(s_i)|), H_r in pole-residue form.
    double hermite_value_residual = 0.0;
    /// Same for the derivatives.
    double hermite_deriv_residual = 0.0;
    /// NaN unless the configuration asks for verification.
    double kv_residual = 0.0;

    bool degenerate_q   = false;
    bool unstable_poles = false; ///< some mu with Re >= 0
    bool eps_collapsed  = false; ///< eps, eps_bullet not defined this step
};

struct StepResult
{
    PrimitiveBases bases;
    ReducedModel model;
    ShiftSet candidate; ///< -mu, before any stabilizing flip
    IterationRecord record;
};

StepResult irka_step(const LtiSystem& sys, const ShiftSet& shifts);

struct BlendResult
{
    ShiftSet candidate;
    CVector q_blend;
    double alpha = 1.0;
};

///
/// Candidate `-eig(Sigma - q_blend e^T)`. Entries flagged in `exclude`
/// (aligned with `sigma.values()`) keep `q_i`. With `alpha == 1` the
/// feedback vector is not formed at all.
///
BlendResult blended_update(const ShiftSet& sigma, const CVector& q, double alpha,
                           const std::vector<bool>& exclude = {});

/// Largest scaled residual of
/// `secular(s, q_blend, z) = alpha secular(s, q, z) + (1 - alpha) secular(s, f, z)`.
double kv_equivalence_check(const ShiftSet& sigma, const CVector& q, double alpha,
                            std::span<const Complex> z_samples);

ShiftSet default_init(const LtiSystem& sys, const IrkaConfig& config);

enum class StatusKind
{
    Converged,
    MaxIter,
    Cycle,
    Failed,
};

struct RunStatus
{
    StatusKind kind = StatusKind::MaxIter;
    int period      = 0; ///< for Cycle
    std::string reason;  ///< for Failed
};

std::string to_string(const RunStatus& status);

using StepFunction = std::function<StepResult(const ShiftSet&)>;

struct FixedPointResult
{
    std::vector<IterationRecord> history;
    RunStatus status;
    std::optional<StepResult> final; ///< last step, or the best one on a cycle
};

///
/// The iteration loop with a pluggable step; `run_irka` supplies
/// `irka_step`. The next working set is the (blended) candidate passed
/// through `flip_unstable` and `enforce_separation`.
///
FixedPointResult run_fixed_point(const StepFunction& step, const ShiftSet& init,
                                 const IrkaConfig& config);

/// Real block-diagonal realization of the pole-residue form of `model`.
LtiSystem realify(const ReducedModel& model);

struct IrkaResult
{
    std::optional<ReducedModel> model;
    std::optional<LtiSystem> realified;
    std::vector<IterationRecord> history;
    RunStatus status;
    std::optional<BackwardCertificate> certificate;
};

IrkaResult run_irka(const LtiSystem& sys, const IrkaConfig& config,
                    const std::optional<ShiftSet>& init = std::nullopt);

} // namespace irka

#endif /* IRKA_IRKA_HPP */

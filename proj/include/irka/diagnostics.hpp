#ifndef IRKA_DIAGNOSTICS_HPP
#define IRKA_DIAGNOSTICS_HPP

///
/// \file diagnostics.hpp
///
/// Perturbation bounds and backward-error certificates for a reduced model
/// computed by the fixed-point iteration before exact convergence.
///
/// With the computed poles matched to the reflected shifts, `mu_k = -s_k + e_k`,
/// the computed input vector differs from the exact placement vector
/// `q* = feedback_vector(s)` by `dq = q - q*`, and
///
///     eps*  = max_i | prod_k (1 - e_k / (s_i + s_k)) - 1 |
///     eps   = max_i | prod_k (1 + e_k / (s_i - mu_k)) - 1 |
///
/// bound it relative to `q*` and `q`. A rank-one change `(dA, db)` of the
/// full system then projects exactly onto `Sigma - q* e^T`.
///

#include <span>
#include <vector>

#include <irka/interpolation.hpp>
#include <irka/linalg.hpp>
#include <irka/lti.hpp>
#include <irka/shifts.hpp>

namespace irka
{

struct EpsilonQuantities
{
    double eps_bullet = 0.0;
    double eps        = 0.0;
    std::vector<Complex> eps_k;      ///< aligned with sigma
    std::vector<Complex> mu_matched; ///< mu_matched[k] pairs with sigma[k]
    std::vector<double> eta;         ///< |prod_k (1 - e_k/(s_i + s_k)) - 1|
};

struct ReducedBackward
{
    CVector q_bullet;
    CVector dq;
    EpsilonQuantities eps;
    double dq_norm      = 0.0;
    double q_norm       = 0.0;
    double q_bullet_norm = 0.0;
    double placement_residual = 0.0; ///< matching(eig(Sigma - q* e^T), -s) / max|s|
    double dAr_norm     = 0.0;       ///< ||dq e^T||_2 = sqrt(r) ||dq||
    double Ar_bullet_norm = 0.0;
    bool bound_q_holds       = true; ///< ||dq|| <= eps ||q|| (1 + 10 u r), when eps < 1
    bool bound_qbullet_holds = true; ///< ||dq|| <= eps* ||q*|| (1 + 10 u r), when eps* < 1
};

struct SystemBackward
{
    RVector db;
    RMatrix dA;
    RVector dc; ///< reported only
    double db_norm = 0.0;
    double dA_norm = 0.0;
    double db_bound = 0.0;
    double dA_bound = 0.0;
    double projection_residual    = 0.0;
    double interpolation_residual = 0.0;
    double dA_rank_ratio = 0.0; ///< s_2(dA) / s_1(dA)
    double imag_residual = 0.0; ///< discarded imaginary parts of db and dA, relative
    double kappa_V   = 0.0;
    double cos_angle = 0.0;
};

struct PerturbationBound
{
    double lhs        = 0.0;
    double rhs        = 0.0;
    double rhs_remark = 0.0;
};

struct ConditionReport
{
    double kappa_C   = 0.0;
    double kappa_V   = 0.0;
    double cos_angle = 0.0;
    double q_norm    = 0.0;
};

struct BackwardCertificate
{
    double eps        = 0.0;
    double eps_bullet = 0.0;
    std::vector<double> eta;
    double dq_norm_bound_q       = 0.0;
    double dq_norm_bound_qbullet = 0.0;
    double dAr_bound = 0.0;
    double db_bound  = 0.0;
    double dA_bound  = 0.0;
    double kappa_C   = 0.0;
    double kappa_V   = 0.0;
    double cos_angle = 0.0;
    double q_norm    = 0.0;
    bool valid       = false;
};

namespace diag
{

/// `C_{il} = 1 / (s_i - mu_l)`.
CMatrix cauchy_matrix(std::span<const Complex> sigma, std::span<const Complex> mu);

/// `prod_k (1 + z_k) - 1` through `log1p`/`expm1`, accurate for small `z_k`
/// and free of intermediate overflow.
Complex product_minus_one(std::span<const Complex> z);

EpsilonQuantities epsilon_quantities(std::span<const Complex> sigma,
                                     std::span<const Complex> mu);
EpsilonQuantities epsilon_quantities(const ShiftSet& sigma, std::span<const Complex> mu);

ReducedBackward backward_reduced_perturbation(const ReducedModel& model);

/// Throws `CertificateInvalid` when `eps* >= 1/2`.
SystemBackward backward_system_perturbation(const LtiSystem& sys,
                                            const PrimitiveBases& bases,
                                            const ReducedModel& model);

/// The optimal sum-of-squares matching is used for the left-hand side.
PerturbationBound eigenvalue_perturbation_bound(std::span<const Complex> sigma,
                                                const CVector& q, const CVector& dq);

ConditionReport condition_report(const PrimitiveBases& bases, const ReducedModel& model);

/// Never throws on a failed gate: non-applicable bounds become infinity
/// and `valid` is false.
BackwardCertificate certify(const LtiSystem& sys, const PrimitiveBases& bases,
                            const ReducedModel& model);

} // namespace diag
} // namespace irka

#endif /* IRKA_DIAGNOSTICS_HPP */

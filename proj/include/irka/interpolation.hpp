#ifndef IRKA_INTERPOLATION_HPP
#define IRKA_INTERPOLATION_HPP

///
/// \file interpolation.hpp
///
/// Primitive rational Krylov bases and the reduced model they induce.
///
/// With `V = [(s_1 I - A)^{-1} b, ...]` and `W = [(s_1 I - A)^{-T} c, ...]`
/// the projected state matrix is the generalized companion matrix
/// `A_r = Sigma - q e^T`, `Sigma = diag(s_i)`, with `q = (W^T V)^{-1} W^T b`.
/// Its eigenvectors are the columns of `D_q C`, where `C` is the Cauchy
/// matrix `C_{il} = 1 / (s_i - mu_l)`, and its characteristic polynomial is
/// the secular function `omega(z) (1 + sum_i q_i / (z - s_i))`.
///

#include <span>
#include <string>
#include <vector>

#include <irka/linalg.hpp>
#include <irka/lti.hpp>
#include <irka/shifts.hpp>

namespace irka
{

/// Gate above which the structural identities are reported, not asserted.
inline constexpr double cond_gate = 1e8;

struct PrimitiveBases
{
    ShiftSet shifts;
    std::vector<Complex> sigma; ///< `shifts.values()`, column order of V, W
    CMatrix V;
    CMatrix W;
    CMatrix L; ///< W^T V (Loewner matrix)
    CMatrix M; ///< W^T A V
    double cond_L = 0.0;
};

///
/// Generalized companion realization `(Sigma - q e^T, q, c_r)` together with
/// its eigen data. `A_r` is never stored densely; `dense_state()` builds it
/// on request.
///
struct ReducedModel
{
    ShiftSet shifts;
    std::vector<Complex> sigma; ///< aligned with q, c_r and the rows of X
    CVector q;
    CVector c_r;
    std::vector<Complex> mu;    ///< eigenvalues, canonical conjugate-closed order
    CMatrix X;                  ///< right eigenvectors, column l for mu[l]
    CVector residues;           ///< residue of H_r at mu[l]
    std::vector<bool> degenerate; ///< per shift: q_i negligible, s_i is a pole
    double companion_residual = 0.0; ///< ||L^{-1}M - A_r||_F / ||L^{-1}M||_F
    double eigvec_residual    = 0.0; ///< ||A_r X - X diag(mu)|| / (||A_r|| ||X||)
    std::vector<std::string> warnings;

    std::size_t order() const noexcept
    {
        return sigma.size();
    }
    CMatrix dense_state() const;
};

namespace interp
{

/// Any number of working shifts; `cond_L` is reported, not checked.
PrimitiveBases build_primitive_bases(const LtiSystem& sys, const ShiftSet& shifts);

/// Divided difference `[s_i, s_j]H`, `H'(s_i)` when the points coincide.
Complex loewner_entry(const LtiSystem& sys, Complex si, Complex sj);

/// `q = L^{-1} W^T b`, `c_r = V^T c`, followed by `assemble_model`.
/// Throws `RankCollapse` once `cond_L` exceeds `1 / (1e3 u)`.
ReducedModel project_reduced(const LtiSystem& sys, const PrimitiveBases& bases);

///
/// Builds the eigen data of `Sigma - q e^T` for given shifts and input
/// vector; `q` and `c_r` are symmetrized to the conjugation structure of
/// `shifts` first.
///
ReducedModel assemble_model(const ShiftSet& shifts, CVector q, CVector c_r);

struct CompanionEigen
{
    std::vector<Complex> mu;
    CMatrix X;
    std::vector<bool> degenerate;
};

CompanionEigen companion_eig(std::span<const Complex> sigma, const CVector& q);

/// `omega(z) (1 + sum_i q_i / (z - s_i))`, equal to `det(z I - A_r)`.
Complex secular_eval(std::span<const Complex> sigma, const CVector& q, Complex z);

struct Nodal
{
    Complex omega;                    ///< prod (z - s_i)
    std::vector<Complex> omega_prime; ///< prod_{j != i} (s_i - s_j)
};

Nodal nodal_eval(std::span<const Complex> sigma, Complex z);

/// `(c_r^T x_l)(y_l^T q) / (y_l^T x_l)`
CVector residues(const ReducedModel& model);

struct LeftEigen
{
    CVector y;  ///< y_i = 1 / (s_i - mu_l)
    Complex nu; ///< residue * p'(mu_l) / omega(mu_l)
};

LeftEigen left_eigvector(const ReducedModel& model, std::size_t l);

/// Pole-residue form of H_r.
Complex reduced_transfer_eval(const ReducedModel& model, Complex s);

/// `c_r^T (s I - Sigma + q e^T)^{-1} q` by a dense solve.
Complex reduced_transfer_eval_companion(const ReducedModel& model, Complex s);

Complex reduced_transfer_deriv(const ReducedModel& model, Complex s);

} // namespace interp
} // namespace irka

#endif /* IRKA_INTERPOLATION_HPP */

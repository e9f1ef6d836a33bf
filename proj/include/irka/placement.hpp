#ifndef IRKA_PLACEMENT_HPP
#define IRKA_PLACEMENT_HPP

///
/// \file placement.hpp
///
/// Explicit single-input pole placement for `Sigma - q e^T`.
///
/// For distinct shifts `s` and a target spectrum `m`,
///
///     q_i = prod_j (s_i - m_j) / prod_{j != i} (s_i - s_j)
///
/// is the unique vector with `eig(Sigma - q e^T) = m`. Choosing `m = -s`
/// gives the feedback vector `f_i = 2 s_i prod_{j != i} (s_i + s_j) / (s_i - s_j)`
/// which reflects every shift across the imaginary axis.
///

#include <span>

#include <irka/linalg.hpp>
#include <irka/shifts.hpp>

namespace irka::placement
{

/// Aligned with `sigma`; throws `ShiftCollision` for coincident shifts.
CVector placement_q(std::span<const Complex> sigma, std::span<const Complex> mu_target);

/// Aligned with `sigma.values()`, symmetrized to its conjugation structure.
CVector placement_q(const ShiftSet& sigma, std::span<const Complex> mu_target);

CVector feedback_vector(std::span<const Complex> sigma);
CVector feedback_vector(const ShiftSet& sigma);

} // namespace irka::placement

#endif /* IRKA_PLACEMENT_HPP */

#ifndef IRKA_LINALG_HPP
#define IRKA_LINALG_HPP

///
/// \file linalg.hpp
///
/// Dense real/complex kernels shared by every other module. Storage is
/// Eigen's default column-major layout throughout.
///

#include <complex>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

namespace irka
{

using Complex = std::complex<double>;
using RMatrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;

inline constexpr double unit_roundoff = std::numeric_limits<double>::epsilon() / 2;
inline constexpr double infinity      = std::numeric_limits<double>::infinity();

/// Relative tolerance under which an eigenvalue is snapped onto the real axis
/// and conjugate partners are symmetrized.
inline constexpr double pair_tol = 1e-10;

namespace linalg
{

///
/// LU factorization of `(sigma I - A)` for a real `A`, reused for both
/// `(sigma I - A) x = rhs` and `(sigma I - A)^T x = rhs`.
///
/// Construction throws `SingularShift` when a pivot of the factorization is
/// negligible relative to `||sigma I - A||`, i.e. `sigma` is numerically an
/// eigenvalue of `A`.
///
class ShiftedResolvent
{
public:
    ShiftedResolvent(const RMatrix& A, Complex sigma);

    CVector solve(const CVector& rhs) const;
    CVector solve_transposed(const CVector& rhs) const;

    Complex shift() const noexcept
    {
        return sigma_;
    }

private:
    Complex sigma_;
    Eigen::PartialPivLU<CMatrix> lu_;
};

CVector shifted_solve(const RMatrix& A, Complex sigma, const RVector& rhs);

struct EigenPairs
{
    std::vector<Complex> values;
    CMatrix vectors; // column i belongs to values[i]
};

/// Eigenvalues and right eigenvectors of a general complex matrix.
EigenPairs eig_dense(const CMatrix& M);

/// Eigenvalues of a real matrix; complex ones come out as exact conjugates.
std::vector<Complex> eigenvalues(const RMatrix& A);

///
/// Conjugate pairing pass for the spectrum of a matrix known to be similar
/// to a real one. Entries with `|Im| < tol (1 + |z|)` become real; the rest
/// are paired or snapped to the real axis, cheapest move first, and
/// symmetrized in place, so the result is
/// closed under conjugation bit for bit. Returns the largest relative
/// mismatch `|z - conj(z')| / (1 + |z|)` seen over the matched pairs.
///
double pair_conjugates(std::span<Complex> values, double tol = pair_tol);

/// Singular values in decreasing order.
RVector singular_values(const CMatrix& M);

/// Spectral norm.
double norm2(const CMatrix& M);

/// `sigma_max / sigma_min`, or +inf once `sigma_min` drops below
/// `1e2 u sigma_max max(rows, cols)`.
double cond2(const CMatrix& M);

/// Solves `A P + P A^T + Q = 0` for stable real `A` (complex Schur based
/// Bartels-Stewart). Throws `UnstableMatrix` otherwise.
RMatrix lyapunov_solve(const RMatrix& A, const RMatrix& Q);

///
/// Factor `L` with `L L^H = P`, `A P + P A^T + b b^T = 0`, computed directly
/// (Hammarling's method on the complex Schur form) so that quadratic forms
/// `c^T P c = ||L^H c||^2` do not suffer cancellation.
///
CMatrix lyapunov_factor(const RMatrix& A, const RVector& b);

/// Cosine of the largest principal angle between `Range(V)` and `Range(W)`.
double subspace_cos_angle(const CMatrix& V, const CMatrix& W);

/// Minimum-norm solution of the underdetermined full-row-rank system
/// `B x = rhs` (`B` is r x n with r <= n).
CVector min_norm_solve(const CMatrix& B, const CVector& rhs);

} // namespace linalg
} // namespace irka

#endif /* IRKA_LINALG_HPP */

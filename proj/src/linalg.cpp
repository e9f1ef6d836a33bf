#include <irka/linalg.hpp>

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <irka/error.hpp>

namespace irka::linalg
{

ShiftedResolvent::ShiftedResolvent(const RMatrix& A, Complex sigma)
    : sigma_(sigma)
{
    const auto n = A.rows();
    if (n == 0 || A.cols() != n)
    {
        throw Error(ErrorCode::DimensionMismatch,
                    "shifted solve needs a nonempty square matrix");
    }
    CMatrix shifted = -A.cast<Complex>();
    shifted.diagonal().array() += sigma;
    const double scale = shifted.cwiseAbs().colwise().sum().maxCoeff();
    lu_.compute(shifted);

    // Partial pivoting never reports breakdown by itself; inspect U.
    const auto& lu      = lu_.matrixLU();
    double min_pivot    = infinity;
    for (Eigen::Index i = 0; i < n; ++i)
    {
        min_pivot = std::min(min_pivot, std::abs(lu(i, i)));
    }
    if (!(min_pivot > static_cast<double>(n) * unit_roundoff * scale))
    {
        throw Error(ErrorCode::SingularShift,
                    "sigma I - A is numerically singular at sigma = (" +
                        std::to_string(sigma.real()) + ", " +
                        std::to_string(sigma.imag()) + ")");
    }
}

CVector ShiftedResolvent::solve(const CVector& rhs) const
{
    return lu_.solve(rhs);
}

CVector ShiftedResolvent::solve_transposed(const CVector& rhs) const
{
    return lu_.transpose().solve(rhs);
}

CVector shifted_solve(const RMatrix& A, Complex sigma, const RVector& rhs)
{
    if (rhs.size() != A.rows())
    {
        throw Error(ErrorCode::DimensionMismatch, "rhs length != order of A");
    }
    return ShiftedResolvent(A, sigma).solve(rhs.cast<Complex>());
}

EigenPairs eig_dense(const CMatrix& M)
{
    if (M.rows() == 0 || M.rows() != M.cols())
    {
        throw Error(ErrorCode::DimensionMismatch,
                    "eigensolver needs a nonempty square matrix");
    }
    Eigen::ComplexEigenSolver<CMatrix> solver(M, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success)
    {
        throw Error(ErrorCode::NoConvergence, "complex QR iteration failed");
    }
    EigenPairs out;
    out.values.assign(solver.eigenvalues().data(),
                      solver.eigenvalues().data() + M.rows());
    out.vectors = solver.eigenvectors();
    return out;
}

std::vector<Complex> eigenvalues(const RMatrix& A)
{
    if (A.rows() == 0 || A.rows() != A.cols())
    {
        throw Error(ErrorCode::DimensionMismatch,
                    "eigensolver needs a nonempty square matrix");
    }
    Eigen::EigenSolver<RMatrix> solver(A, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
    {
        throw Error(ErrorCode::NoConvergence, "real QR iteration failed");
    }
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

double pair_conjugates(std::span<Complex> values, double tol)
{
    std::vector<std::size_t> upper;
    std::vector<std::size_t> lower;
    for (std::size_t i = 0; i < values.size(); ++i)
    {
        auto& z = values[i];
        if (std::abs(z.imag()) < tol * (1.0 + std::abs(z)))
        {
            z = Complex(z.real(), 0.0);
        }
        else if (z.imag() > 0)
        {
            upper.push_back(i);
        }
        else
        {
            lower.push_back(i);
        }
    }

    // Cheapest first over all pairings and snaps to the real axis. A snap
    // costs the distance from z to its own conjugate.
    struct Option
    {
        double cost;
        std::size_t a;
        std::size_t b;
    };
    std::vector<Option> options;
    for (auto i : upper)
    {
        options.push_back({2.0 * std::abs(values[i].imag()), i, i});
    }
    for (auto i : lower)
    {
        options.push_back({2.0 * std::abs(values[i].imag()), i, i});
    }
    for (auto iu : upper)
    {
        for (auto il : lower)
        {
            options.push_back({std::abs(values[iu] - std::conj(values[il])), iu, il});
        }
    }
    std::stable_sort(options.begin(), options.end(),
                     [](const Option& x, const Option& y) { return x.cost < y.cost; });

    double worst = 0.0;
    std::vector<bool> done(values.size(), false);
    for (const auto& o : options)
    {
        if (done[o.a] || done[o.b])
        {
            continue;
        }
        done[o.a] = done[o.b] = true;
        if (o.a == o.b)
        {
            values[o.a] = Complex(values[o.a].real(), 0.0);
            continue;
        }
        const Complex m = 0.5 * (values[o.a] + std::conj(values[o.b]));
        worst           = std::max(worst, o.cost / (1.0 + std::abs(m)));
        values[o.a]     = m;
        values[o.b]     = std::conj(m);
    }
    return worst;
}

RVector singular_values(const CMatrix& M)
{
    Eigen::JacobiSVD<CMatrix> svd(M);
    return svd.singularValues();
}

double norm2(const CMatrix& M)
{
    if (M.size() == 0)
    {
        return 0.0;
    }
    return singular_values(M)(0);
}

double cond2(const CMatrix& M)
{
    if (M.size() == 0)
    {
        throw Error(ErrorCode::InvalidArgument, "cond2 of an empty matrix");
    }
    const RVector s   = singular_values(M);
    const double smax = s(0);
    const double smin = s(s.size() - 1);
    const double dim  = static_cast<double>(std::max(M.rows(), M.cols()));
    if (!(smax > 0.0) || smin <= 1e2 * unit_roundoff * smax * dim)
    {
        return infinity;
    }
    return smax / smin;
}

RMatrix lyapunov_solve(const RMatrix& A, const RMatrix& Q)
{
    const auto n = A.rows();
    if (n == 0 || A.cols() != n || Q.rows() != n || Q.cols() != n)
    {
        throw Error(ErrorCode::DimensionMismatch, "lyapunov_solve dimensions");
    }
    Eigen::ComplexSchur<CMatrix> schur(A.cast<Complex>());
    if (schur.info() != Eigen::Success)
    {
        throw Error(ErrorCode::NoConvergence, "Schur decomposition failed");
    }
    const CMatrix& T = schur.matrixT();
    const CMatrix& U = schur.matrixU();
    for (Eigen::Index i = 0; i < n; ++i)
    {
        if (!(T(i, i).real() < 0.0))
        {
            throw Error(ErrorCode::UnstableMatrix,
                        "Lyapunov equation needs a stable matrix");
        }
    }

    // T Y + Y T^H = F, solved column by column from the last one.
    const CMatrix F = -(U.adjoint() * Q.cast<Complex>() * U);
    CMatrix Y       = CMatrix::Zero(n, n);
    for (Eigen::Index j = n - 1; j >= 0; --j)
    {
        CVector rhs = F.col(j);
        for (Eigen::Index k = j + 1; k < n; ++k)
        {
            rhs -= std::conj(T(j, k)) * Y.col(k);
        }
        CMatrix Tj = T;
        Tj.diagonal().array() += std::conj(T(j, j));
        Y.col(j) = Tj.triangularView<Eigen::Upper>().solve(rhs);
    }
    RMatrix P = (U * Y * U.adjoint()).real();
    return 0.5 * (P + P.transpose());
}

CMatrix lyapunov_factor(const RMatrix& A, const RVector& b)
{
    const auto n = A.rows();
    if (n == 0 || A.cols() != n || b.size() != n)
    {
        throw Error(ErrorCode::DimensionMismatch, "lyapunov_factor dimensions");
    }
    Eigen::ComplexSchur<CMatrix> schur(A.cast<Complex>());
    if (schur.info() != Eigen::Success)
    {
        throw Error(ErrorCode::NoConvergence, "Schur decomposition failed");
    }
    const CMatrix& T = schur.matrixT();
    const CMatrix& Q = schur.matrixU();
    for (Eigen::Index i = 0; i < n; ++i)
    {
        if (!(T(i, i).real() < 0.0))
        {
            throw Error(ErrorCode::UnstableMatrix,
                        "Lyapunov equation needs a stable matrix");
        }
    }

    // Peel off the trailing row/column: with P = U U^H, U upper triangular,
    // the last column of U follows from one shifted triangular solve and the
    // leading block satisfies the same equation with an updated rhs vector.
    CVector y = Q.adjoint() * b.cast<Complex>();
    CMatrix U = CMatrix::Zero(n, n);
    for (Eigen::Index j = n - 1; j >= 0; --j)
    {
        const Complex tau  = T(j, j);
        const Complex beta = y(j);
        const double nu    = std::abs(beta) / std::sqrt(-2.0 * tau.real());
        U(j, j)            = nu;
        if (j == 0 || nu == 0.0)
        {
            continue;
        }
        const CVector rhs = -(T.col(j).head(j) * nu + y.head(j) * (std::conj(beta) / nu));
        CMatrix T1        = T.topLeftCorner(j, j);
        T1.diagonal().array() += std::conj(tau);
        const CVector u   = T1.triangularView<Eigen::Upper>().solve(rhs);
        U.col(j).head(j)  = u;
        y.head(j)        -= (beta / nu) * u;
    }
    return Q * U;
}

double subspace_cos_angle(const CMatrix& V, const CMatrix& W)
{
    if (V.rows() != W.rows() || V.cols() != W.cols() || V.cols() == 0 ||
        V.cols() > V.rows())
    {
        throw Error(ErrorCode::DimensionMismatch,
                    "subspace_cos_angle needs two n x r bases with r <= n");
    }
    if (cond2(V) == infinity || cond2(W) == infinity)
    {
        throw Error(ErrorCode::RankDeficient,
                    "basis lost rank numerically");
    }
    const auto n = V.rows();
    const auto r = V.cols();
    const CMatrix qv =
        Eigen::HouseholderQR<CMatrix>(V).householderQ() * CMatrix::Identity(n, r);
    const CMatrix qw =
        Eigen::HouseholderQR<CMatrix>(W).householderQ() * CMatrix::Identity(n, r);
    const RVector s = singular_values(qv.adjoint() * qw);
    return std::clamp(s(s.size() - 1), 0.0, 1.0);
}

CVector min_norm_solve(const CMatrix& B, const CVector& rhs)
{
    const auto r = B.rows();
    const auto n = B.cols();
    if (r > n || rhs.size() != r)
    {
        throw Error(ErrorCode::DimensionMismatch, "min_norm_solve dimensions");
    }
    // B^H = Q R  =>  B = R^H Q^H  and  x = Q R^{-H} rhs.
    Eigen::HouseholderQR<CMatrix> qr(B.adjoint());
    const CMatrix R = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
    const CVector y = R.adjoint().triangularView<Eigen::Lower>().solve(rhs);
    return qr.householderQ() * (CMatrix::Identity(n, r) * y);
}

} // namespace irka::linalg

#include <doctest.h>

#include <algorithm>
#include <random>

#include <irka/error.hpp>
#include <irka/linalg.hpp>

using namespace irka;

namespace
{

RMatrix diag2(double a, double b)
{
    RMatrix A = RMatrix::Zero(2, 2);
    A(0, 0)   = a;
    A(1, 1)   = b;
    return A;
}

bool contains(const std::vector<Complex>& v, Complex z, double tol)
{
    return std::any_of(v.begin(), v.end(), [&](Complex w) { return std::abs(w - z) <= tol; });
}

} // namespace

TEST_CASE("shifted solve on scalar and diagonal systems")
{
    const RMatrix A = RMatrix::Constant(1, 1, -1.0);
    const RVector one = RVector::Ones(1);
    CHECK(std::abs(linalg::shifted_solve(A, 1.0, one)(0) - 0.5) < 1e-15);

    const auto x = linalg::shifted_solve(diag2(-1, -2), 1.0, RVector::Ones(2));
    CHECK(std::abs(x(0) - 0.5) < 1e-15);
    CHECK(std::abs(x(1) - 1.0 / 3.0) < 1e-15);
}

TEST_CASE("shift on an eigenvalue is singular")
{
    const RMatrix A = RMatrix::Constant(1, 1, -1.0);
    try
    {
        linalg::shifted_solve(A, -1.0, RVector::Ones(1));
        FAIL("expected SingularShift");
    }
    catch (const Error& e)
    {
        CHECK(e.code() == ErrorCode::SingularShift);
    }
}

TEST_CASE("resolvent transposed solve")
{
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    RMatrix A(5, 5);
    for (Eigen::Index i = 0; i < 25; ++i)
    {
        A.data()[i] = g(rng);
    }
    const Complex s(0.3, 1.7);
    linalg::ShiftedResolvent R(A, s);
    CVector rhs = CVector::Random(5);
    const CMatrix K = s * CMatrix::Identity(5, 5) - A.cast<Complex>();
    CHECK((K * R.solve(rhs) - rhs).norm() < 1e-12 * rhs.norm() * K.norm());
    CHECK((K.transpose() * R.solve_transposed(rhs) - rhs).norm() < 1e-12 * rhs.norm() * K.norm());
}

TEST_CASE("dense eigenvalues")
{
    CMatrix M(2, 2);
    M << 7, 6, -12, -10;
    const auto ev = linalg::eig_dense(M);
    CHECK(contains(ev.values, -1.0, 1e-12));
    CHECK(contains(ev.values, -2.0, 1e-12));
    for (std::size_t l = 0; l < 2; ++l)
    {
        const CVector x = ev.vectors.col(static_cast<Eigen::Index>(l));
        CHECK((M * x - ev.values[l] * x).norm() < 1e-12 * x.norm());
    }

    const auto id = linalg::eig_dense(CMatrix::Identity(3, 3));
    for (const auto& v : id.values)
    {
        CHECK(std::abs(v - 1.0) < 1e-15);
    }

    CMatrix D = CMatrix::Zero(2, 2);
    D(0, 0)   = Complex(1, 1);
    D(1, 1)   = Complex(1, -1);
    const auto dv = linalg::eig_dense(D);
    CHECK(contains(dv.values, Complex(1, 1), 1e-15));
    CHECK(contains(dv.values, Complex(1, -1), 1e-15));
}

TEST_CASE("real matrix eigenvalues come out as exact conjugates")
{
    RMatrix A(2, 2);
    A << -1, 3, -3, -1;
    auto ev = linalg::eigenvalues(A);
    REQUIRE(ev.size() == 2);
    CHECK(ev[0] == std::conj(ev[1]));
    CHECK(contains(ev, Complex(-1, 3), 1e-12));
}

TEST_CASE("pairing pass")
{
    std::vector<Complex> v{Complex(1, 1e-14), Complex(2, 3), Complex(2 + 1e-13, -3)};
    linalg::pair_conjugates(v);
    CHECK(std::count_if(v.begin(), v.end(), [](Complex z) { return z.imag() == 0.0; }) == 1);
    const auto it = std::find_if(v.begin(), v.end(), [](Complex z) { return z.imag() > 0; });
    REQUIRE(it != v.end());
    CHECK(std::find(v.begin(), v.end(), std::conj(*it)) != v.end());

    // Almost-real values whose loose imaginary parts escape the snap must not
    // be matched against a genuine pair.
    std::vector<Complex> w{Complex(-4.644, 5.6e-7), Complex(-7.3997, -0.7004),
                           Complex(-7.3997, 0.7004), Complex(-10.964, -7.6e-7)};
    linalg::pair_conjugates(w);
    CHECK(w[0] == -4.644);
    CHECK(w[3] == -10.964);
    CHECK(w[1] == std::conj(w[2]));
    CHECK(std::abs(w[2] - Complex(-7.3997, 0.7004)) < 1e-15);
}

TEST_CASE("2-norm condition number")
{
    CHECK(linalg::cond2(CMatrix::Identity(3, 3)) == doctest::Approx(1.0));
    CMatrix D = CMatrix::Zero(2, 2);
    D(0, 0)   = 10;
    D(1, 1)   = 1;
    CHECK(linalg::cond2(D) == doctest::Approx(10.0));

    // Hilbert 2x2: eigenvalues (13 +- sqrt(160)) / 24.
    CMatrix H(2, 2);
    H << 0.5, 1.0 / 3, 1.0 / 3, 0.25;
    const double lmax = (0.75 + std::sqrt(0.75 * 0.75 - 4 * (0.125 - 1.0 / 9))) / 2;
    const double lmin = (0.75 - std::sqrt(0.75 * 0.75 - 4 * (0.125 - 1.0 / 9))) / 2;
    CHECK(std::abs(linalg::cond2(H) - lmax / lmin) < 1e-6 * lmax / lmin);
    CHECK(linalg::cond2(H) == doctest::Approx(38.5).epsilon(1e-2));

    CMatrix S = CMatrix::Ones(2, 2);
    CHECK(linalg::cond2(S) == infinity);
}

TEST_CASE("Lyapunov solver")
{
    const RMatrix A1 = RMatrix::Constant(1, 1, -1.0);
    CHECK(linalg::lyapunov_solve(A1, RMatrix::Ones(1, 1))(0, 0) == doctest::Approx(0.5));

    CHECK(linalg::lyapunov_solve(diag2(-1, -2), RMatrix::Zero(2, 2)).norm() == 0.0);

    const RMatrix P = linalg::lyapunov_solve(diag2(-1, -2), RMatrix::Ones(2, 2));
    CHECK(P(0, 0) == doctest::Approx(0.5));
    CHECK(P(0, 1) == doctest::Approx(1.0 / 3));
    CHECK(P(1, 0) == doctest::Approx(1.0 / 3));
    CHECK(P(1, 1) == doctest::Approx(0.25));

    try
    {
        linalg::lyapunov_solve(diag2(1, -1), RMatrix::Ones(2, 2));
        FAIL("expected UnstableMatrix");
    }
    catch (const Error& e)
    {
        CHECK(e.code() == ErrorCode::UnstableMatrix);
    }
}

TEST_CASE("Lyapunov factor matches the dense solution")
{
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    const Eigen::Index n = 9;
    RMatrix A(n, n);
    for (Eigen::Index i = 0; i < n * n; ++i)
    {
        A.data()[i] = g(rng);
    }
    while (true)
    {
        const auto ev = linalg::eigenvalues(A);
        const double m =
            std::max_element(ev.begin(), ev.end(), [](Complex a, Complex b) {
                return a.real() < b.real();
            })->real();
        if (m < -0.1)
        {
            break;
        }
        A -= (m + 0.5) * RMatrix::Identity(n, n);
    }
    RVector b(n);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        b(i) = g(rng);
    }
    const RMatrix P = linalg::lyapunov_solve(A, b * b.transpose());
    const CMatrix L = linalg::lyapunov_factor(A, b);
    CHECK((L * L.adjoint() - P.cast<Complex>()).norm() < 1e-12 * P.norm());
    CHECK((A * P + P * A.transpose() + b * b.transpose()).norm() < 1e-12 * A.norm() * P.norm());
}

TEST_CASE("principal angle cosine")
{
    CMatrix V = CMatrix::Random(6, 3);
    CHECK(linalg::subspace_cos_angle(V, V) == doctest::Approx(1.0));

    CMatrix e1 = CMatrix::Zero(2, 1);
    e1(0, 0)   = 1;
    CMatrix e2 = CMatrix::Zero(2, 1);
    e2(1, 0)   = 1;
    CHECK(linalg::subspace_cos_angle(e1, e2) == doctest::Approx(0.0));
    CHECK(linalg::subspace_cos_angle(e1, (e1 + e2) / std::sqrt(2.0)) ==
          doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("minimum norm solution")
{
    CMatrix B = CMatrix::Random(3, 7);
    CVector y = CVector::Random(3);
    const CVector x = linalg::min_norm_solve(B, y);
    CHECK((B * x - y).norm() < 1e-12 * y.norm() * B.norm());
    // x lies in the row space: orthogonal to the null space of B.
    const CVector ref = B.adjoint() * (B * B.adjoint()).partialPivLu().solve(y);
    CHECK((x - ref).norm() < 1e-10 * ref.norm());
}

TEST_CASE("singular values are sorted")
{
    CMatrix M = CMatrix::Random(5, 3);
    const RVector s = linalg::singular_values(M);
    CHECK(std::is_sorted(s.data(), s.data() + s.size(), std::greater<>()));
    CHECK(linalg::norm2(M) == doctest::Approx(s(0)));
}

#include <doctest.h>

#include <random>

#include <irka/interpolation.hpp>
#include <irka/lti.hpp>

#include "oracles.hpp"

using namespace irka;
using C = Complex;

namespace
{

LtiSystem unit_scalar()
{
    return LtiSystem(RMatrix::Constant(1, 1, -1.0), RVector::Ones(1), RVector::Ones(1));
}

ShiftSet set(std::vector<Complex> v)
{
    return ShiftSet::from_values_checked(v);
}

CVector vec(std::initializer_list<Complex> v)
{
    CVector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (const auto& z : v)
    {
        out(i++) = z;
    }
    return out;
}

// Random conjugation-closed q aligned with sigma.
CVector closed_q(std::mt19937_64& rng, const ShiftSet& s)
{
    std::normal_distribution<double> g;
    const auto v   = s.values();
    const auto idx = s.conjugate_index();
    CVector q(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i)
    {
        if (idx[i] == i)
        {
            q(static_cast<Eigen::Index>(i)) = g(rng);
        }
        else if (idx[i] > i)
        {
            const Complex z(g(rng), g(rng));
            q(static_cast<Eigen::Index>(i))      = z;
            q(static_cast<Eigen::Index>(idx[i])) = std::conj(z);
        }
    }
    return q;
}

} // namespace

TEST_CASE("scalar primitive bases")
{
    const auto b = interp::build_primitive_bases(unit_scalar(), set({1.0}));
    CHECK(std::abs(b.V(0, 0) - 0.5) < 1e-15);
    CHECK(std::abs(b.W(0, 0) - 0.5) < 1e-15);
    CHECK(std::abs(b.L(0, 0) - 0.25) < 1e-15);
    CHECK(std::abs(b.M(0, 0) + 0.25) < 1e-15);
}

TEST_CASE("Loewner matrix is the negated divided difference table")
{
    const auto sys = unit_scalar();
    const auto b   = interp::build_primitive_bases(sys, set({1.0, 2.0}));
    // [s_i, s_j]H for H = 1/(s+1): H'(1) = -1/4, [1,2]H = -1/6, H'(2) = -1/9.
    CHECK(std::abs(interp::loewner_entry(sys, 1.0, 2.0) + 1.0 / 6) < 1e-15);
    CHECK(std::abs(interp::loewner_entry(sys, 1.0, 1.0) + 0.25) < 1e-15);
    const auto i1 = b.sigma[0] == 1.0 ? 0 : 1;
    const auto i2 = 1 - i1;
    CHECK(std::abs(b.L(i1, i1) - 0.25) < 1e-15);
    CHECK(std::abs(b.L(i1, i2) - 1.0 / 6) < 1e-15);
    CHECK(std::abs(b.L(i2, i2) - 1.0 / 9) < 1e-15);
}

TEST_CASE("bases on a random system")
{
    const auto sys = lti::synth_random_stable(10, 3, lti::SpectrumSpec::real_interval(1, 10));
    const auto s   = set({C(0.7, 1.5), C(0.7, -1.5), 2.0, 5.0});
    const auto b   = interp::build_primitive_bases(sys, s);
    const CMatrix A = sys.A.cast<Complex>();
    for (Eigen::Index j = 0; j < b.V.cols(); ++j)
    {
        const Complex sj = b.sigma[static_cast<std::size_t>(j)];
        const CMatrix K  = sj * CMatrix::Identity(10, 10) - A;
        CHECK((K * b.V.col(j) - sys.b.cast<Complex>()).norm() < 1e-12 * K.norm() * b.V.col(j).norm());
        CHECK((K.transpose() * b.W.col(j) - sys.c.cast<Complex>()).norm() <
              1e-12 * K.norm() * b.W.col(j).norm());
    }
    CHECK((b.L - b.L.transpose()).norm() <= 1e-12 * b.L.norm());
    CHECK((b.M - b.M.transpose()).norm() <= 1e-12 * b.M.norm());
    for (Eigen::Index i = 0; i < 4; ++i)
    {
        for (Eigen::Index j = 0; j < 4; ++j)
        {
            const Complex ref = -interp::loewner_entry(sys, b.sigma[static_cast<std::size_t>(i)],
                                                        b.sigma[static_cast<std::size_t>(j)]);
            CHECK(std::abs(b.L(i, j) - ref) <= 1e-10 * std::abs(ref));
        }
    }
}

TEST_CASE("symmetric system gives identical bases")
{
    RMatrix A = RMatrix::Zero(3, 3);
    A.diagonal() << -1, -2, -3;
    A(0, 1) = A(1, 0) = 0.3;
    const LtiSystem sys(A, RVector::Ones(3), RVector::Ones(3));
    const auto b = interp::build_primitive_bases(sys, set({1.0, 3.0}));
    CHECK(b.V == b.W);
}

TEST_CASE("scalar projection recovers the system")
{
    const auto sys = unit_scalar();
    for (double s : {0.1, 1.0, 3.5, 40.0})
    {
        const auto b = interp::build_primitive_bases(sys, set({s}));
        const auto m = interp::project_reduced(sys, b);
        CHECK(std::abs(m.q(0) - (s + 1)) < 1e-13 * (s + 1));
        CHECK(std::abs(m.dense_state()(0, 0) + 1.0) < 1e-13 * (s + 1));
        REQUIRE(m.mu.size() == 1);
        CHECK(std::abs(m.mu[0] + 1.0) < 1e-13 * (s + 1));
        CHECK(std::abs(m.residues(0) - 1.0) < 1e-12);
    }
    const auto b = interp::build_primitive_bases(sys, set({1.0}));
    const auto m = interp::project_reduced(sys, b);
    CHECK(std::abs(m.c_r(0) - 0.5) < 1e-15);
    CHECK(std::abs(interp::reduced_transfer_eval(m, 1.0) - 0.5) < 1e-15);
}

TEST_CASE("full order projection is exact")
{
    RMatrix A = RMatrix::Zero(4, 4);
    A.diagonal() << -1, -3, -10, -30;
    A(0, 1)       = 0.5;
    A(2, 3)       = -2.0;
    RVector b(4);
    RVector c(4);
    b << 1, -2, 0.5, 3;
    c << 2, 1, -1, 0.25;
    const LtiSystem sys(A, b, c);
    const auto bases = interp::build_primitive_bases(sys, set({0.7, 4.0, C(12, 5), C(12, -5)}));
    const auto m     = interp::project_reduced(sys, bases);
    for (const Complex z : {C(0.3, 0), C(1, 4), C(-0.2, 7)})
    {
        const Complex h = lti::eval_transfer(sys, z);
        CHECK(std::abs(interp::reduced_transfer_eval(m, z) - h) < 1e-9 * std::abs(h));
    }
}

TEST_CASE("companion eigen data on the 2x2 fixture")
{
    const std::vector<Complex> sigma{1.0, 2.0};
    const auto e = interp::companion_eig(sigma, vec({-6.0, 12.0}));
    REQUIRE(e.mu.size() == 2);
    const CMatrix Ar = oracle::companion_dense(sigma, vec({-6.0, 12.0}));
    CMatrix ref(2, 2);
    ref << 7, 6, -12, -10;
    CHECK((Ar - ref).norm() == 0.0);
    for (std::size_t l = 0; l < 2; ++l)
    {
        const CVector x = e.X.col(static_cast<Eigen::Index>(l));
        CHECK((Ar * x - e.mu[l] * x).norm() < 1e-13 * x.norm() * Ar.norm());
        const Complex mu = e.mu[l];
        CHECK((std::abs(mu + 1.0) < 1e-13 || std::abs(mu + 2.0) < 1e-13));
        // Columns are D_q C: x_i = q_i / (s_i - mu).
        CHECK(std::abs(x(0) - (-6.0) / (1.0 - mu)) < 1e-13);
        CHECK(std::abs(x(1) - 12.0 / (2.0 - mu)) < 1e-13);
    }

    const auto one = interp::companion_eig(std::vector<Complex>{3.0}, vec({6.0}));
    CHECK(std::abs(one.mu[0] + 3.0) < 1e-15);
    CHECK(std::abs(one.X(0, 0)) > 0.0);
}

TEST_CASE("companion eigenvalues are conjugation closed")
{
    std::mt19937_64 rng(17);
    for (int t = 0; t < 20; ++t)
    {
        const auto s = ShiftSet::from_values(oracle::random_closed_set(rng, 6));
        const auto q = closed_q(rng, s);
        const auto m = interp::assemble_model(s, q, closed_q(rng, s));
        for (const auto& mu : m.mu)
        {
            CHECK(std::find(m.mu.begin(), m.mu.end(), std::conj(mu)) != m.mu.end());
        }
    }
}

TEST_CASE("secular function")
{
    const std::vector<Complex> sigma{1.0, 2.0};
    CHECK(std::abs(interp::secular_eval(sigma, vec({-6.0, 12.0}), 0.0) - 2.0) < 1e-14);
    const Complex z(0.3, 0.8);
    CHECK(std::abs(interp::secular_eval(sigma, vec({0.0, 0.0}), z) - (z - 1.0) * (z - 2.0)) < 1e-15);

    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int t = 0; t < 30; ++t)
    {
        const auto s  = ShiftSet::from_values(oracle::random_closed_set(rng, 1 + t % 6));
        const auto q  = closed_q(rng, s);
        const auto sv = s.values();
        const Complex w(u(rng), u(rng));
        const Complex ref = oracle::companion_det(sv, q, w);
        CHECK(std::abs(interp::secular_eval(sv, q, w) - ref) <= 1e-10 * std::abs(ref));
    }
}

TEST_CASE("nodal polynomial")
{
    const auto n = interp::nodal_eval(std::vector<Complex>{1.0, 2.0}, 0.0);
    CHECK(std::abs(n.omega - 2.0) < 1e-15);
    CHECK(std::abs(n.omega_prime[0] + 1.0) < 1e-15);
    CHECK(std::abs(n.omega_prime[1] - 1.0) < 1e-15);
    CHECK(std::abs(interp::nodal_eval(std::vector<Complex>{3.0}, 1.0).omega_prime[0] - 1.0) == 0.0);
    const Complex z(0.4, -1.1);
    const auto a = interp::nodal_eval(std::vector<Complex>{1.0, C(2, 1), C(2, -1)}, z);
    const auto b = interp::nodal_eval(std::vector<Complex>{C(2, -1), 1.0, C(2, 1)}, z);
    CHECK(std::abs(std::abs(a.omega) - std::abs(b.omega)) < 1e-14);
}

TEST_CASE("residues and left eigenvectors")
{
    std::mt19937_64 rng(31);
    for (int t = 0; t < 20; ++t)
    {
        const auto s = ShiftSet::from_values(oracle::random_closed_set(rng, 1 + t % 6));
        const auto m = interp::assemble_model(s, closed_q(rng, s), closed_q(rng, s));
        const Complex markov = m.c_r.transpose() * m.q;
        CHECK(std::abs(m.residues.sum() - markov) <= 1e-10 * std::max(1.0, std::abs(markov)));

        const CMatrix Ar = m.dense_state();
        for (std::size_t l = 0; l < m.order(); ++l)
        {
            const auto le = interp::left_eigvector(m, l);
            CHECK((le.y.transpose() * Ar - m.mu[l] * le.y.transpose()).norm() <=
                  1e-10 * Ar.norm() * le.y.norm());
        }
        for (const Complex z : {C(0.1, 0.2), C(3, -5), C(-2, 1)})
        {
            const Complex a = interp::reduced_transfer_eval(m, z);
            const Complex b = interp::reduced_transfer_eval_companion(m, z);
            CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(b)));
        }
        const double big = 1e7;
        CHECK(std::abs(big * interp::reduced_transfer_eval(m, big) - markov) <=
              1e-5 * std::max(1.0, std::abs(markov)) * (1 + m.q.norm() * m.c_r.norm()));
    }
}

TEST_CASE("left eigenvector fixture")
{
    const auto m  = interp::assemble_model(set({1.0, 2.0}), vec({-6.0, 12.0}), vec({1.0, 1.0}));
    const auto it = std::find_if(m.mu.begin(), m.mu.end(),
                                 [](Complex z) { return std::abs(z + 1.0) < 1e-12; });
    REQUIRE(it != m.mu.end());
    const auto le = interp::left_eigvector(m, static_cast<std::size_t>(it - m.mu.begin()));
    CHECK(std::abs(le.y(0) - 0.5) < 1e-13);
    CHECK(std::abs(le.y(1) - 1.0 / 3) < 1e-13);

    const auto one = interp::assemble_model(set({3.0}), vec({6.0}), vec({1.0}));
    CHECK(std::abs(interp::left_eigvector(one, 0).y(0) - 1.0 / 6) < 1e-15);
}

TEST_CASE("reduced derivative by finite differences")
{
    std::mt19937_64 rng(41);
    const auto s = ShiftSet::from_values(oracle::random_closed_set(rng, 5));
    const auto m = interp::assemble_model(s, closed_q(rng, s), closed_q(rng, s));
    const Complex z(0.5, 0.5);
    const double h = 1e-5;
    const Complex fd =
        (interp::reduced_transfer_eval(m, z + h) - interp::reduced_transfer_eval(m, z - h)) / (2 * h);
    const Complex d = interp::reduced_transfer_deriv(m, z);
    CHECK(std::abs(fd - d) <= 1e-6 * std::max(1.0, std::abs(d)));
}

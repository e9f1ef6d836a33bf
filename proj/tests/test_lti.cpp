#include <doctest.h>

#include <random>

#include <irka/error.hpp>
#include <irka/linalg.hpp>
#include <irka/lti.hpp>

#include "oracles.hpp"

using namespace irka;

namespace
{

LtiSystem scalar(double a, double b = 1.0, double c = 1.0)
{
    return LtiSystem(RMatrix::Constant(1, 1, a), RVector::Constant(1, b),
                     RVector::Constant(1, c));
}

LtiSystem two_state()
{
    RMatrix A = RMatrix::Zero(2, 2);
    A(0, 0)   = -1;
    A(1, 1)   = -2;
    return LtiSystem(A, RVector::Ones(2), RVector::Ones(2));
}

} // namespace

TEST_CASE("transfer function values")
{
    const auto h = scalar(-1);
    CHECK(std::abs(lti::eval_transfer(h, 0.0) - 1.0) < 1e-15);
    CHECK(std::abs(lti::eval_transfer(h, 1.0) - 0.5) < 1e-15);
    CHECK(std::abs(lti::eval_transfer(two_state(), 0.0) - 1.5) < 1e-15);
}

TEST_CASE("transfer derivative")
{
    const auto h = scalar(-1);
    CHECK(std::abs(lti::eval_transfer_deriv(h, 1.0) + 0.25) < 1e-15);
    CHECK(std::abs(lti::eval_transfer_deriv(h, 0.0) + 1.0) < 1e-15);

    const auto sys = lti::synth_random_stable(8, 5, lti::SpectrumSpec::real_interval(1, 10));
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int t = 0; t < 10; ++t)
    {
        const Complex s(u(rng) + 3.0, u(rng));
        const double step = 1e-4;
        const Complex fd  = (lti::eval_transfer(sys, s + step) - lti::eval_transfer(sys, s - step)) /
                           (2 * step);
        const Complex d = lti::eval_transfer_deriv(sys, s);
        CHECK(std::abs(fd - d) < 1e-6 * (1 + std::abs(d)));
    }
}

TEST_CASE("stability predicate")
{
    CHECK(lti::is_stable(scalar(-1)));
    RMatrix A = RMatrix::Zero(2, 2);
    A(0, 0)   = 1;
    A(1, 1)   = -1;
    CHECK_FALSE(lti::is_stable(LtiSystem(A, RVector::Ones(2), RVector::Ones(2))));
    RMatrix R(2, 2);
    R << 0, 1, -1, 0;
    CHECK_FALSE(lti::is_stable(LtiSystem(R, RVector::Ones(2), RVector::Ones(2))));
}

TEST_CASE("H2 norm")
{
    CHECK(lti::h2_norm(scalar(-1)) == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(lti::h2_norm(scalar(-2)) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(lti::h2_norm(scalar(-1, 1, 2)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

    const auto sys = lti::synth_random_stable(12, 9, lti::SpectrumSpec::cd_like());
    const double ref = oracle::h2_norm_pr(oracle::pole_residue(sys));
    CHECK(lti::h2_norm(sys) == doctest::Approx(ref).epsilon(1e-8));
}

TEST_CASE("H2 error")
{
    CHECK(lti::h2_error(scalar(-1), scalar(-1)) < 1e-15);
    CHECK(lti::h2_error(scalar(-1), scalar(-2)) ==
          doctest::Approx(std::sqrt(1.0 / 12)).epsilon(1e-14));
    CHECK(lti::h2_error(scalar(-2), scalar(-1)) ==
          doctest::Approx(std::sqrt(1.0 / 12)).epsilon(1e-14));

    const auto full = lti::synth_random_stable(20, 4, lti::SpectrumSpec::cd_like());
    CHECK(lti::h2_error(full, full) <= 1e-12 * lti::h2_norm(full));

    const auto red = lti::synth_random_stable(4, 8, lti::SpectrumSpec::cd_like());
    const double ref =
        oracle::h2_error_pr(oracle::pole_residue(full), oracle::pole_residue(red));
    CHECK(lti::h2_error(full, red) == doctest::Approx(ref).epsilon(1e-7));
    CHECK(lti::h2_error(full, red) == doctest::Approx(lti::h2_error(red, full)).epsilon(1e-12));
}

TEST_CASE("H2 error rejects unstable input")
{
    try
    {
        lti::h2_error(scalar(-1), scalar(1));
        FAIL("expected UnstableMatrix");
    }
    catch (const Error& e)
    {
        CHECK(e.code() == ErrorCode::UnstableMatrix);
    }
}

TEST_CASE("synthetic systems")
{
    const auto a = lti::synth_random_stable(2, 7, lti::SpectrumSpec::real_interval(1, 10));
    CHECK(lti::is_stable(a));
    const auto b = lti::synth_random_stable(2, 7, lti::SpectrumSpec::real_interval(1, 10));
    CHECK(a.A == b.A);
    CHECK(a.b == b.b);
    CHECK(a.c == b.c);

    const auto big = lti::synth_random_stable(120, 1, lti::SpectrumSpec::cd_like());
    for (const auto& z : linalg::eigenvalues(big.A))
    {
        CHECK(z.real() < 0);
    }
}

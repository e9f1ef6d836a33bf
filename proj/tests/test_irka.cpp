#include <doctest.h>

#include <random>

#include <irka/error.hpp>
#include <irka/irka.hpp>

#include "oracles.hpp"

using namespace irka;
using C = Complex;

namespace
{

LtiSystem unit_scalar()
{
    return LtiSystem(RMatrix::Constant(1, 1, -1.0), RVector::Ones(1), RVector::Ones(1));
}

LtiSystem two_state()
{
    RMatrix A = RMatrix::Zero(2, 2);
    A(0, 0)   = -1;
    A(1, 1)   = -2;
    return LtiSystem(A, RVector::Ones(2), RVector::Ones(2));
}

ShiftSet set(std::vector<Complex> v)
{
    return ShiftSet::from_values_checked(v);
}

CVector closed_q(std::mt19937_64& rng, const ShiftSet& s)
{
    std::normal_distribution<double> g;
    const auto idx = s.conjugate_index();
    CVector q(static_cast<Eigen::Index>(s.size()));
    for (std::size_t i = 0; i < s.size(); ++i)
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

// Step that sends {1,2} to {3,4} and back.
StepResult oscillating_step(const ShiftSet& s)
{
    const auto v = s.values();
    const bool low = v[0].real() < 2.5;
    const std::vector<Complex> target = low ? std::vector<Complex>{-3.0, -4.0}
                                            : std::vector<Complex>{-1.0, -2.0};
    StepResult out;
    out.model     = interp::assemble_model(s, placement::placement_q(s, target), CVector::Ones(2));
    out.candidate = shifts::reflect(ShiftSet::from_values(out.model.mu));
    out.record.sigma_in = s;
    out.record.mu_out   = out.model.mu;
    out.record.d        = shifts::matching_distance(out.candidate, s);
    out.record.h        = shifts::hausdorff_distance(out.candidate, s);
    return out;
}

} // namespace

TEST_CASE("scalar step lands on the fixed point")
{
    for (double s0 : {0.2, 1.0, 7.0})
    {
        const auto st = irka_step(unit_scalar(), set({s0}));
        CHECK(std::abs(st.candidate.values()[0] - 1.0) < 1e-13 * (1 + s0));
    }
    const auto fixed = irka_step(unit_scalar(), set({1.0}));
    CHECK(fixed.record.d < 1e-15);
    CHECK(fixed.record.h <= fixed.record.d);
}

TEST_CASE("step record carries structural residuals")
{
    const auto sys = lti::synth_random_stable(12, 4, lti::SpectrumSpec::cd_like());
    const auto st  = irka_step(sys, set({C(1, 30), C(1, -30), 50.0, 200.0}));
    const auto& r  = st.record;
    CHECK(r.cond_L > 0);
    if (r.cond_L <= cond_gate)
    {
        CHECK(r.hermite_value_residual <= 1e-8);
        CHECK(r.hermite_deriv_residual <= 1e-6);
        CHECK(r.companion_residual <= 1e-8);
        CHECK(r.eigvec_residual <= 1e-8);
    }
    CHECK(std::isnan(r.kv_residual));
    CHECK(r.h <= r.d);
}

TEST_CASE("blend endpoints")
{
    std::mt19937_64 rng(2);
    const auto s = ShiftSet::from_values(oracle::random_closed_set(rng, 5));
    const auto q = closed_q(rng, s);

    const auto one     = blended_update(s, q, 1.0);
    const auto vanilla = shifts::reflect(
        ShiftSet::from_values(interp::companion_eig(s.values(), q).mu));
    CHECK(one.candidate == vanilla);
    CHECK(one.q_blend == q);

    const auto spread = ShiftSet::from_values(oracle::random_spread_set(rng, 5));
    const auto zero   = blended_update(spread, closed_q(rng, spread), 0.0);
    CHECK(shifts::matching_distance(zero.candidate, spread) <= 1e-8 * spread.max_abs());

    const auto sys  = two_state();
    const auto st   = irka_step(sys, set({1.0, 2.0}));
    const auto half = blended_update(st.model.shifts, st.model.q, 0.5);
    for (const auto& z : half.candidate.values())
    {
        CHECK(std::isfinite(z.real()));
        CHECK(std::isfinite(z.imag()));
    }
    CHECK(half.candidate.size() == 2);
}

TEST_CASE("excluded entries keep their q")
{
    const auto s = set({1.0, 2.0, 3.0});
    CVector q(3);
    q << 1.0, 2.0, 3.0;
    const auto b = blended_update(s, q, 0.5, std::vector<bool>{false, true, false});
    CHECK(b.q_blend(1) == q(1));
    CHECK(b.q_blend(0) != q(0));
}

TEST_CASE("blend identity of the secular function")
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-4, 4);
    std::vector<Complex> z;
    for (int i = 0; i < 20; ++i)
    {
        z.emplace_back(u(rng), u(rng));
    }
    for (double alpha : {1.0, 0.0, 0.37})
    {
        const auto s = ShiftSet::from_values(oracle::random_closed_set(rng, 5));
        CHECK(kv_equivalence_check(s, closed_q(rng, s), alpha, z) < 1e-12);
    }
}

TEST_CASE("configuration validation")
{
    IrkaConfig c;
    c.r = 3;
    CHECK_THROWS_AS(c.validate(2), Error);
    c.r   = 1;
    c.tol = 0;
    CHECK_THROWS_AS(c.validate(2), Error);
    c.tol   = 1e-8;
    c.alpha = AlphaSchedule::constant(1.5);
    CHECK_THROWS_AS(c.validate(2), Error);
    c.alpha = AlphaSchedule::constant(0.5);
    CHECK_NOTHROW(c.validate(2));

    const auto res = run_irka(two_state(), [] {
        IrkaConfig k;
        k.r = 5;
        return k;
    }());
    CHECK(res.status.kind == StatusKind::Failed);
    CHECK_FALSE(res.model.has_value());
}

TEST_CASE("default initial shifts")
{
    const auto sys = lti::synth_random_stable(20, 3, lti::SpectrumSpec::cd_like());
    IrkaConfig c;
    c.r = 6;
    const auto lg = default_init(sys, c);
    CHECK(lg.size() == 6);
    CHECK(lg.is_working());
    for (const auto& z : lg.values())
    {
        CHECK(z.imag() == 0.0);
    }
    c.init = InitMode::Random;
    c.r    = 7;
    c.seed = 12;
    const auto rd = default_init(sys, c);
    CHECK(rd.size() == 7);
    CHECK(rd.is_working());
    CHECK(rd == default_init(sys, c));
    c.seed = 13;
    CHECK_FALSE(rd == default_init(sys, c));

    c.r    = 1;
    c.init = InitMode::Logspace;
    CHECK(std::abs(default_init(unit_scalar(), c).values()[0] - 1.0) < 1e-15);
}

TEST_CASE("status strings")
{
    CHECK(to_string(RunStatus{StatusKind::Converged, 0, {}}) == "Converged");
    CHECK(to_string(RunStatus{StatusKind::MaxIter, 0, {}}) == "MaxIter");
    CHECK(to_string(RunStatus{StatusKind::Cycle, 2, {}}) == "Cycle(2)");
    CHECK(to_string(RunStatus{StatusKind::Failed, 0, "x"}) == "Failed(x)");
}

TEST_CASE("scalar run")
{
    IrkaConfig c;
    c.tol = 1e-10;
    for (double s0 : {0.05, 0.5, 3.0, 30.0})
    {
        const auto res = run_irka(unit_scalar(), c, set({s0}));
        REQUIRE(res.status.kind == StatusKind::Converged);
        REQUIRE(res.model.has_value());
        CHECK(std::abs(res.model->sigma[0] - 1.0) < 1e-12);
        CHECK(std::abs(res.model->q(0) - 2.0) < 1e-12);
        REQUIRE(res.realified.has_value());
        CHECK(lti::h2_error(unit_scalar(), *res.realified) < 1e-12);
    }
}

TEST_CASE("symmetric two-state fixture matches the brute-force optimum")
{
    const auto opt = oracle::symmetric_fixture_optimum();
    IrkaConfig c;
    c.tol = 1e-12;
    const auto res = run_irka(two_state(), c, set({0.5}));
    REQUIRE(res.status.kind == StatusKind::Converged);
    CHECK(std::abs(res.model->mu[0] - opt.pole) < 1e-6);
    CHECK(lti::h2_error(two_state(), *res.realified) <= opt.error * (1 + 1e-8));

    // Monotone decrease of d along the way.
    for (std::size_t k = 1; k < res.history.size(); ++k)
    {
        CHECK(res.history[k].d <= res.history[k - 1].d);
    }
}

TEST_CASE("full order run recovers the system")
{
    const auto sys = lti::synth_random_stable(6, 21, lti::SpectrumSpec::cd_like());
    std::vector<Complex> init;
    for (const auto& z : linalg::eigenvalues(sys.A))
    {
        init.emplace_back(-z.real() * 1.3, -z.imag() * 0.8);
    }
    IrkaConfig c;
    c.r        = 6;
    c.max_iter = 30;
    const auto res = run_irka(sys, c, ShiftSet::from_values(init));
    REQUIRE(res.status.kind == StatusKind::Converged);
    CHECK(lti::h2_error(sys, *res.realified) <= 1e-8 * lti::h2_norm(sys));
}

TEST_CASE("realification preserves the transfer function")
{
    std::mt19937_64 rng(14);
    const auto s = ShiftSet::from_values(oracle::random_closed_set(rng, 6));
    const auto m = interp::assemble_model(s, closed_q(rng, s), closed_q(rng, s));
    const auto real = realify(m);
    for (const Complex z : {C(0.2, 0.1), C(1, 3), C(4, -2)})
    {
        const Complex a = interp::reduced_transfer_eval(m, z);
        CHECK(std::abs(lti::eval_transfer(real, z) - a) <= 1e-10 * std::max(1.0, std::abs(a)));
    }
}

TEST_CASE("blended and backoff runs converge on the two-state fixture")
{
    for (const auto sched : {AlphaSchedule::constant(0.5), AlphaSchedule::backoff()})
    {
        IrkaConfig c;
        c.update_mode = UpdateMode::Blended;
        c.alpha       = sched;
        c.tol         = 1e-10;
        c.verify      = true;
        const auto res = run_irka(two_state(), c, set({4.0}));
        REQUIRE(res.status.kind == StatusKind::Converged);
        for (const auto& rec : res.history)
        {
            CHECK(rec.kv_residual < 1e-12);
        }
    }
}

TEST_CASE("stopping on the certificate")
{
    IrkaConfig c;
    c.stop_rule = StopRule::Certificate;
    c.tol       = 1e-6;
    const auto res = run_irka(two_state(), c, set({0.5}));
    REQUIRE(res.status.kind == StatusKind::Converged);
    CHECK(res.history.back().eps_bullet <= 1e-6);
}

TEST_CASE("period-two oscillation is reported as a cycle")
{
    IrkaConfig c;
    c.r        = 2;
    c.max_iter = 20;
    const auto res = run_fixed_point(oscillating_step, set({1.0, 2.0}), c);
    CHECK(res.status.kind == StatusKind::Cycle);
    CHECK(res.status.period == 2);
    CHECK(res.history.size() <= 20);
}

TEST_CASE("max iterations")
{
    IrkaConfig c;
    c.max_iter = 2;
    c.tol      = 1e-300;
    const auto res = run_irka(two_state(), c, set({0.1}));
    CHECK(res.status.kind == StatusKind::MaxIter);
    CHECK(res.history.size() == 2);
    CHECK(res.model.has_value());
}

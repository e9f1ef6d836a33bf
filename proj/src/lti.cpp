#include <irka/lti.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/QR>

#include <irka/error.hpp>

namespace irka
{

LtiSystem::LtiSystem(RMatrix A_, RVector b_, RVector c_)
    : A(std::move(A_)), b(std::move(b_)), c(std::move(c_))
{
    const auto n = A.rows();
    if (n == 0 || A.cols() != n || b.size() != n || c.size() != n)
    {
        throw Error(ErrorCode::DimensionMismatch,
                    "LtiSystem needs square A (n x n) and b, c of length n");
    }
    if (!A.allFinite() || !b.allFinite() || !c.allFinite())
    {
        throw Error(ErrorCode::InvalidArgument, "LtiSystem entries must be finite");
    }
}

namespace lti
{

Complex eval_transfer(const LtiSystem& sys, Complex s)
{
    const CVector v = linalg::shifted_solve(sys.A, s, sys.b);
    return sys.c.cast<Complex>().dot(v);
}

Complex eval_transfer_deriv(const LtiSystem& sys, Complex s)
{
    const linalg::ShiftedResolvent res(sys.A, s);
    const CVector v = res.solve(sys.b.cast<Complex>());
    const CVector w = res.solve_transposed(sys.c.cast<Complex>());
    // Eigen's dot() conjugates its first argument; we need the plain w^T v.
    return -(w.transpose() * v)(0);
}

bool is_stable(const LtiSystem& sys)
{
    const auto ev = linalg::eigenvalues(sys.A);
    return std::all_of(ev.begin(), ev.end(),
                       [](Complex z) { return z.real() < 0.0; });
}

double h2_norm(const LtiSystem& sys)
{
    if (!is_stable(sys))
    {
        throw Error(ErrorCode::UnstableMatrix, "H2 norm of an unstable system");
    }
    const RMatrix P = linalg::lyapunov_solve(sys.A, sys.b * sys.b.transpose());
    return std::sqrt(std::max(0.0, sys.c.dot(P * sys.c)));
}

double h2_error(const LtiSystem& full, const LtiSystem& reduced)
{
    const auto n = full.order();
    const auto r = reduced.order();
    RMatrix A    = RMatrix::Zero(n + r, n + r);
    A.topLeftCorner(n, n)     = full.A;
    A.bottomRightCorner(r, r) = reduced.A;
    RVector b(n + r);
    b << full.b, reduced.b;
    RVector c(n + r);
    c << full.c, -reduced.c;
    if (!is_stable(full) || !is_stable(reduced))
    {
        throw Error(ErrorCode::UnstableMatrix, "H2 error with an unstable system");
    }
    // ||L^H c|| rather than sqrt(c^T P c): the error is a small difference of
    // large terms, and forming the quadratic form would lose half the digits.
    const CMatrix L = linalg::lyapunov_factor(A, b);
    return (L.adjoint() * c.cast<Complex>()).norm();
}

SpectrumSpec SpectrumSpec::real_interval(double lo, double hi, bool scramble)
{
    SpectrumSpec spec;
    spec.kind     = Kind::RealInterval;
    spec.real_min = lo;
    spec.real_max = hi;
    spec.scramble = scramble;
    return spec;
}

SpectrumSpec SpectrumSpec::cd_like()
{
    SpectrumSpec spec;
    spec.kind = Kind::CdLike;
    return spec;
}

namespace
{

// Distribution helpers written out so that the generated systems do not
// depend on the standard library's distribution implementations.
struct Rng
{
    explicit Rng(std::uint64_t seed) : engine(seed) {}

    double uniform()
    {
        return static_cast<double>(engine() >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi)
    {
        return lo + (hi - lo) * uniform();
    }
    double normal()
    {
        double u1 = uniform();
        while (u1 <= 0.0)
        {
            u1 = uniform();
        }
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    std::mt19937_64 engine;
};

void validate(Eigen::Index n, const SpectrumSpec& spec)
{
    if (n < 1)
    {
        throw Error(ErrorCode::BadSpec, "order must be at least 1");
    }
    const bool finite = std::isfinite(spec.real_min) &&
                        std::isfinite(spec.real_max) &&
                        std::isfinite(spec.freq_min) &&
                        std::isfinite(spec.freq_max) &&
                        std::isfinite(spec.damp_min) && std::isfinite(spec.damp_max);
    if (!finite || !(spec.real_min > 0.0) || spec.real_max < spec.real_min)
    {
        throw Error(ErrorCode::BadSpec, "real pole interval must satisfy 0 < min <= max");
    }
    if (spec.kind == SpectrumSpec::Kind::CdLike &&
        (!(spec.freq_min > 0.0) || spec.freq_max < spec.freq_min ||
         !(spec.damp_min > 0.0) || spec.damp_max < spec.damp_min ||
         !(spec.damp_max < 1.0)))
    {
        throw Error(ErrorCode::BadSpec,
                    "cd-like spectrum needs 0 < freq_min <= freq_max and "
                    "0 < damp_min <= damp_max < 1");
    }
}

} // namespace

LtiSystem synth_random_stable(Eigen::Index n, std::uint64_t seed,
                              const SpectrumSpec& spec)
{
    validate(n, spec);
    Rng rng(seed);

    RMatrix blocks = RMatrix::Zero(n, n);
    Eigen::Index i = 0;
    if (spec.kind == SpectrumSpec::Kind::CdLike)
    {
        const double lf0 = std::log(spec.freq_min);
        const double lf1 = std::log(spec.freq_max);
        for (; i + 1 < n; i += 2)
        {
            const double omega = std::exp(rng.uniform(lf0, lf1));
            const double zeta  = rng.uniform(spec.damp_min, spec.damp_max);
            const double re    = -zeta * omega;
            const double im    = omega * std::sqrt(1.0 - zeta * zeta);
            blocks(i, i)         = re;
            blocks(i + 1, i + 1) = re;
            blocks(i, i + 1)     = im;
            blocks(i + 1, i)     = -im;
        }
        if (i < n)
        {
            blocks(i, i) = -spec.freq_min * rng.uniform(0.5, 1.0);
        }
    }
    else
    {
        for (; i < n; ++i)
        {
            blocks(i, i) = -rng.uniform(spec.real_min, spec.real_max);
        }
    }

    RMatrix A = blocks;
    if (spec.scramble && n > 1)
    {
        RMatrix G(n, n);
        for (Eigen::Index k = 0; k < G.size(); ++k)
        {
            G.data()[k] = rng.normal();
        }
        const RMatrix Q = Eigen::HouseholderQR<RMatrix>(G).householderQ();
        RVector d(n);
        for (Eigen::Index k = 0; k < n; ++k)
        {
            d(k) = rng.uniform(1.0, 2.0);
        }
        // T = Q D, T^{-1} = D^{-1} Q^T; cond(T) <= 2.
        const RMatrix T    = Q * d.asDiagonal();
        const RMatrix Tinv = d.cwiseInverse().asDiagonal() * Q.transpose();
        A                  = T * blocks * Tinv;
    }

    RVector b(n);
    RVector c(n);
    for (Eigen::Index k = 0; k < n; ++k)
    {
        b(k) = rng.normal();
    }
    for (Eigen::Index k = 0; k < n; ++k)
    {
        c(k) = rng.normal();
    }
    return LtiSystem(std::move(A), std::move(b), std::move(c));
}

} // namespace lti
} // namespace irka

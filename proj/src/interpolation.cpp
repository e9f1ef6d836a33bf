#include <irka/interpolation.hpp>

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

#include <irka/error.hpp>

namespace irka
{

CMatrix ReducedModel::dense_state() const
{
    const auto r = static_cast<Eigen::Index>(sigma.size());
    CMatrix Ar   = -q * CVector::Ones(r).transpose();
    for (Eigen::Index i = 0; i < r; ++i)
    {
        Ar(i, i) += sigma[static_cast<std::size_t>(i)];
    }
    return Ar;
}

namespace interp
{

namespace
{

bool is_symmetric_system(const LtiSystem& sys)
{
    return sys.b == sys.c && sys.A == sys.A.transpose();
}

void symmetrize(CVector& v, const std::vector<std::size_t>& partner,
                std::span<const Complex> points)
{
    for (std::size_t i = 0; i < partner.size(); ++i)
    {
        const auto j  = partner[i];
        const auto ei = static_cast<Eigen::Index>(i);
        const auto ej = static_cast<Eigen::Index>(j);
        if (j == i)
        {
            if (points[i].imag() == 0.0)
            {
                v(ei) = Complex(v(ei).real(), 0.0);
            }
        }
        else if (i < j)
        {
            const Complex m = 0.5 * (v(ei) + std::conj(v(ej)));
            v(ei)           = m;
            v(ej)           = std::conj(m);
        }
    }
}

// |1 + sum q_i/(z - s_i)| over 1 + sum |q_i/(z - s_i)|.
double scaled_secular_residual(std::span<const Complex> sigma, const CVector& q, Complex z)
{
    Complex g    = 1.0;
    double scale = 1.0;
    for (std::size_t i = 0; i < sigma.size(); ++i)
    {
        if (z == sigma[i])
        {
            return infinity;
        }
        const Complex t = q(static_cast<Eigen::Index>(i)) / (z - sigma[i]);
        g += t;
        scale += std::abs(t);
    }
    return std::abs(g) / scale;
}

// Aberth iteration on omega(z) (1 + sum q_i / (z - s_i)) from the dense
// eigenvalues. A refined root replaces its start only if it lowers the
// scaled residual.
std::vector<Complex> refine_secular_roots(std::span<const Complex> sigma, const CVector& q,
                                          std::vector<Complex> z0)
{
    const std::size_t r = z0.size();
    std::vector<Complex> z = z0;
    for (int it = 0; it < 60; ++it)
    {
        double largest = 0.0;
        for (std::size_t l = 0; l < r; ++l)
        {
            Complex g  = 1.0;
            Complex dg = 0.0;
            Complex dw = 0.0;
            bool hit   = false;
            for (std::size_t i = 0; i < sigma.size(); ++i)
            {
                const Complex d = z[l] - sigma[i];
                if (d == 0.0)
                {
                    hit = true;
                    break;
                }
                const Complex t = q(static_cast<Eigen::Index>(i)) / d;
                g += t;
                dg -= t / d;
                dw += 1.0 / d;
            }
            if (hit || g == 0.0)
            {
                continue;
            }
            const Complex newton = 1.0 / (dw + dg / g);
            Complex repel        = 0.0;
            for (std::size_t m = 0; m < r; ++m)
            {
                if (m != l && z[m] != z[l])
                {
                    repel += 1.0 / (z[l] - z[m]);
                }
            }
            const Complex step = newton / (1.0 - newton * repel);
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag()))
            {
                continue;
            }
            z[l] -= step;
            largest = std::max(largest, std::abs(step) / std::max(1.0, std::abs(z[l])));
        }
        if (largest < unit_roundoff)
        {
            break;
        }
    }
    for (std::size_t l = 0; l < r; ++l)
    {
        const bool finite = std::isfinite(z[l].real()) && std::isfinite(z[l].imag());
        if (!finite || scaled_secular_residual(sigma, q, z[l]) >=
                           scaled_secular_residual(sigma, q, z0[l]))
        {
            z[l] = z0[l];
        }
    }
    return z;
}

std::vector<std::size_t> exact_partners(std::span<const Complex> z)
{
    std::vector<std::size_t> partner(z.size());
    for (std::size_t i = 0; i < z.size(); ++i)
    {
        partner[i] = i;
        if (z[i].imag() == 0.0)
        {
            continue;
        }
        for (std::size_t j = 0; j < z.size(); ++j)
        {
            if (j != i && z[j] == std::conj(z[i]))
            {
                partner[i] = j;
                break;
            }
        }
    }
    return partner;
}

void check_pole(std::span<const Complex> poles, Complex s, const char* what)
{
    for (const auto& p : poles)
    {
        if (std::abs(s - p) <= 4.0 * unit_roundoff * std::abs(p))
        {
            throw Error(ErrorCode::PoleHit, what);
        }
    }
}

} // namespace

PrimitiveBases build_primitive_bases(const LtiSystem& sys, const ShiftSet& shifts)
{
    if (shifts.empty())
    {
        throw Error(ErrorCode::EmptySet, "no shifts");
    }
    if (!shifts.is_working())
    {
        throw Error(ErrorCode::InvalidArgument,
                    "bases need shifts in the open right half-plane");
    }
    PrimitiveBases out;
    out.shifts = shifts;
    out.sigma  = shifts.values();
    const auto n = sys.order();
    const auto r = static_cast<Eigen::Index>(out.sigma.size());
    out.V.resize(n, r);
    out.W.resize(n, r);

    const bool symmetric = is_symmetric_system(sys);
    const CVector b      = sys.b.cast<Complex>();
    const CVector c      = sys.c.cast<Complex>();
    Eigen::Index col     = 0;
    for (const auto& e : shifts.entries())
    {
        const linalg::ShiftedResolvent res(sys.A, e.value);
        out.V.col(col) = res.solve(b);
        out.W.col(col) = symmetric ? CVector(out.V.col(col)) : res.solve_transposed(c);
        if (e.pair)
        {
            // The conjugate shift's columns are the conjugated columns.
            out.V.col(col + 1) = out.V.col(col).conjugate();
            out.W.col(col + 1) = out.W.col(col).conjugate();
        }
        col += e.pair ? 2 : 1;
    }

    out.L      = out.W.transpose() * out.V;
    out.M      = out.W.transpose() * (sys.A.cast<Complex>() * out.V);
    out.cond_L = linalg::cond2(out.L);
    return out;
}

Complex loewner_entry(const LtiSystem& sys, Complex si, Complex sj)
{
    if (std::abs(si - sj) >= sep_tol * std::max(std::abs(si), std::abs(sj)) &&
        si != sj)
    {
        return (lti::eval_transfer(sys, si) - lti::eval_transfer(sys, sj)) / (si - sj);
    }
    return lti::eval_transfer_deriv(sys, si);
}

ReducedModel project_reduced(const LtiSystem& sys, const PrimitiveBases& bases)
{
    if (bases.V.cols() > sys.order())
    {
        throw Error(ErrorCode::InvalidArgument, "more shifts than states");
    }
    if (bases.cond_L > 1.0 / (1e3 * unit_roundoff))
    {
        throw Error(ErrorCode::RankCollapse, "Loewner matrix numerically singular (cond2 = " +
                                                 std::to_string(bases.cond_L) + ")");
    }
    const Eigen::PartialPivLU<CMatrix> lu(bases.L);
    const CVector q   = lu.solve(bases.W.transpose() * sys.b.cast<Complex>());
    const CVector c_r = bases.V.transpose() * sys.c.cast<Complex>();
    ReducedModel model = assemble_model(bases.shifts, q, c_r);

    const CMatrix projected = lu.solve(bases.M);
    const double scale      = projected.norm();
    model.companion_residual =
        scale > 0.0 ? (projected - model.dense_state()).norm() / scale : 0.0;
    return model;
}

ReducedModel assemble_model(const ShiftSet& shifts, CVector q, CVector c_r)
{
    ReducedModel model;
    model.shifts = shifts;
    model.sigma  = shifts.values();
    if (static_cast<std::size_t>(q.size()) != model.sigma.size() ||
        static_cast<std::size_t>(c_r.size()) != model.sigma.size())
    {
        throw Error(ErrorCode::SizeMismatch, "q and c_r must match the shift count");
    }
    const auto partner = shifts.conjugate_index();
    symmetrize(q, partner, model.sigma);
    symmetrize(c_r, partner, model.sigma);
    model.q   = std::move(q);
    model.c_r = std::move(c_r);

    auto eig         = companion_eig(model.sigma, model.q);
    model.mu         = std::move(eig.mu);
    model.X          = std::move(eig.X);
    model.degenerate = std::move(eig.degenerate);
    if (std::any_of(model.degenerate.begin(), model.degenerate.end(),
                    [](bool d) { return d; }))
    {
        model.warnings.emplace_back("DegenerateQ: a shift is itself a reduced pole");
    }

    const CMatrix Ar   = model.dense_state();
    const auto r       = static_cast<Eigen::Index>(model.mu.size());
    const CVector mu_v = Eigen::Map<const CVector>(model.mu.data(), r);
    const double denom = linalg::norm2(Ar) * linalg::norm2(model.X);
    model.eigvec_residual =
        denom > 0.0 ? linalg::norm2(Ar * model.X - model.X * mu_v.asDiagonal()) / denom
                    : 0.0;

    model.residues = residues(model);
    symmetrize(model.residues, exact_partners(model.mu), model.mu);

    for (std::size_t l = 0; l < model.mu.size(); ++l)
    {
        for (std::size_t j = 0; j < l; ++j)
        {
            if (std::abs(model.mu[l] - model.mu[j]) <
                sep_tol * std::max(std::abs(model.mu[l]), 1e-300))
            {
                model.warnings.emplace_back(
                    "near-collision of reduced poles; p'(mu) is ill-conditioned");
            }
        }
    }
    return model;
}

CompanionEigen companion_eig(std::span<const Complex> sigma, const CVector& q)
{
    const auto r = static_cast<Eigen::Index>(sigma.size());
    if (q.size() != r || r == 0)
    {
        throw Error(ErrorCode::SizeMismatch, "q must match the shift count");
    }
    CMatrix Ar = -q * CVector::Ones(r).transpose();
    for (Eigen::Index i = 0; i < r; ++i)
    {
        Ar(i, i) += sigma[static_cast<std::size_t>(i)];
    }
    auto values = refine_secular_roots(sigma, q, linalg::eig_dense(Ar).values);

    CompanionEigen out;
    const double qmax = q.cwiseAbs().maxCoeff();
    out.degenerate.assign(sigma.size(), false);
    for (std::size_t i = 0; i < sigma.size(); ++i)
    {
        out.degenerate[i] = std::abs(q(static_cast<Eigen::Index>(i))) < 1e-14 * qmax;
    }

    // A negligible q_i makes s_i an exact eigenvalue: pin the nearest one.
    std::vector<bool> pinned(values.size(), false);
    for (std::size_t i = 0; i < sigma.size(); ++i)
    {
        if (!out.degenerate[i])
        {
            continue;
        }
        std::size_t best = values.size();
        double dist      = infinity;
        for (std::size_t l = 0; l < values.size(); ++l)
        {
            if (!pinned[l] && std::abs(values[l] - sigma[i]) < dist)
            {
                dist = std::abs(values[l] - sigma[i]);
                best = l;
            }
        }
        values[best] = sigma[i];
        pinned[best] = true;
    }
    out.mu = ShiftSet::from_values(values).values();

    std::vector<std::size_t> degenerate_col(out.mu.size(), sigma.size());
    for (std::size_t i = 0; i < sigma.size(); ++i)
    {
        for (std::size_t l = 0; l < out.mu.size() && out.degenerate[i]; ++l)
        {
            if (out.mu[l] == sigma[i] && degenerate_col[l] == sigma.size())
            {
                degenerate_col[l] = i;
                break;
            }
        }
    }
    for (std::size_t i = 0; i < sigma.size(); ++i)
    {
        if (out.degenerate[i])
        {
            continue;
        }
        for (std::size_t l = 0; l < out.mu.size(); ++l)
        {
            if (std::abs(sigma[i] - out.mu[l]) < sep_tol * std::abs(sigma[i]))
            {
                throw Error(ErrorCode::ShiftEigCollision,
                            "reduced pole collides with shift " + std::to_string(i));
            }
        }
    }

    out.X.resize(r, r);
    for (Eigen::Index l = 0; l < r; ++l)
    {
        const auto lu  = static_cast<std::size_t>(l);
        const auto deg = degenerate_col[lu];
        if (deg == sigma.size())
        {
            for (Eigen::Index i = 0; i < r; ++i)
            {
                out.X(i, l) = q(i) / (sigma[static_cast<std::size_t>(i)] - out.mu[lu]);
            }
            continue;
        }
        // mu_l = s_d exactly: x_k = q_k / (s_k - s_d), x_d closes e^T x = 1.
        Complex acc = 0.0;
        for (Eigen::Index k = 0; k < r; ++k)
        {
            if (static_cast<std::size_t>(k) == deg)
            {
                continue;
            }
            out.X(k, l) = q(k) / (sigma[static_cast<std::size_t>(k)] - sigma[deg]);
            acc += out.X(k, l);
        }
        out.X(static_cast<Eigen::Index>(deg), l) = 1.0 - acc;
    }
    return out;
}

Complex secular_eval(std::span<const Complex> sigma, const CVector& q, Complex z)
{
    if (static_cast<std::size_t>(q.size()) != sigma.size())
    {
        throw Error(ErrorCode::SizeMismatch, "q must match the shift count");
    }
    check_pole(sigma, z, "secular function evaluated at a shift");
    Complex omega = 1.0;
    Complex sum   = 1.0;
    for (std::size_t i = 0; i < sigma.size(); ++i)
    {
        omega *= z - sigma[i];
        sum += q(static_cast<Eigen::Index>(i)) / (z - sigma[i]);
    }
    return omega * sum;
}

Nodal nodal_eval(std::span<const Complex> sigma, Complex z)
{
    Nodal out{1.0, std::vector<Complex>(sigma.size(), 1.0)};
    for (std::size_t i = 0; i < sigma.size(); ++i)
    {
        out.omega *= z - sigma[i];
        for (std::size_t j = 0; j < sigma.size(); ++j)
        {
            if (j != i)
            {
                out.omega_prime[i] *= sigma[i] - sigma[j];
            }
        }
    }
    return out;
}

namespace
{

// Index of the shift pinned to mu_l, or sigma.size() when mu_l is regular.
std::size_t degenerate_shift_of(const ReducedModel& model, std::size_t l)
{
    for (std::size_t i = 0; i < model.sigma.size(); ++i)
    {
        if (!model.degenerate.empty() && model.degenerate[i] &&
            model.sigma[i] == model.mu[l])
        {
            return i;
        }
    }
    return model.sigma.size();
}

CVector left_vector(const ReducedModel& model, std::size_t l)
{
    const auto r = static_cast<Eigen::Index>(model.sigma.size());
    CVector y    = CVector::Zero(r);
    const auto d = degenerate_shift_of(model, l);
    if (d != model.sigma.size())
    {
        y(static_cast<Eigen::Index>(d)) = 1.0;
        return y;
    }
    for (Eigen::Index i = 0; i < r; ++i)
    {
        const Complex gap = model.sigma[static_cast<std::size_t>(i)] - model.mu[l];
        if (gap == Complex(0.0))
        {
            throw Error(ErrorCode::ShiftEigCollision, "left eigenvector at a shift");
        }
        y(i) = 1.0 / gap;
    }
    return y;
}

} // namespace

CVector residues(const ReducedModel& model)
{
    const auto r = static_cast<Eigen::Index>(model.mu.size());
    CVector phi(r);
    for (Eigen::Index l = 0; l < r; ++l)
    {
        const CVector y  = left_vector(model, static_cast<std::size_t>(l));
        const auto x     = model.X.col(l);
        const Complex cx = (model.c_r.transpose() * x)(0);
        const Complex yq = (y.transpose() * model.q)(0);
        const Complex yx = (y.transpose() * x)(0);
        phi(l)           = cx * yq / yx;
    }
    return phi;
}

LeftEigen left_eigvector(const ReducedModel& model, std::size_t l)
{
    if (l >= model.mu.size())
    {
        throw Error(ErrorCode::InvalidArgument, "eigenvalue index out of range");
    }
    LeftEigen out;
    out.y            = left_vector(model, l);
    const auto nodal = nodal_eval(model.sigma, model.mu[l]);
    Complex dp       = 1.0;
    for (std::size_t j = 0; j < model.mu.size(); ++j)
    {
        if (j != l)
        {
            dp *= model.mu[l] - model.mu[j];
        }
    }
    out.nu = model.residues(static_cast<Eigen::Index>(l)) * dp / nodal.omega;
    return out;
}

Complex reduced_transfer_eval(const ReducedModel& model, Complex s)
{
    check_pole(model.mu, s, "reduced transfer function evaluated at a pole");
    Complex h = 0.0;
    for (std::size_t l = 0; l < model.mu.size(); ++l)
    {
        h += model.residues(static_cast<Eigen::Index>(l)) / (s - model.mu[l]);
    }
    return h;
}

Complex reduced_transfer_eval_companion(const ReducedModel& model, Complex s)
{
    check_pole(model.mu, s, "reduced transfer function evaluated at a pole");
    CMatrix shifted = -model.dense_state();
    shifted.diagonal().array() += s;
    const CVector x = Eigen::PartialPivLU<CMatrix>(shifted).solve(model.q);
    return (model.c_r.transpose() * x)(0);
}

Complex reduced_transfer_deriv(const ReducedModel& model, Complex s)
{
    check_pole(model.mu, s, "reduced transfer derivative evaluated at a pole");
    Complex h = 0.0;
    for (std::size_t l = 0; l < model.mu.size(); ++l)
    {
        const Complex d = s - model.mu[l];
        h -= model.residues(static_cast<Eigen::Index>(l)) / (d * d);
    }
    return h;
}

} // namespace interp
} // namespace irka

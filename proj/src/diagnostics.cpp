#include <irka/diagnostics.hpp>

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include <irka/error.hpp>
#include <irka/placement.hpp>

namespace irka::diag
{

namespace
{

Complex log1p_c(Complex z)
{
    if (std::abs(z) > 0.5)
    {
        return std::log(1.0 + z);
    }
    const double x = z.real();
    const double y = z.imag();
    // |1 + z|^2 - 1 without cancellation.
    const double m = std::max(-1.0, 2.0 * x + x * x + y * y);
    return {0.5 * std::log1p(m), std::atan2(y, 1.0 + x)};
}

Complex expm1_c(Complex w)
{
    if (std::abs(w) > 0.5)
    {
        return std::exp(w) - 1.0;
    }
    const double a = w.real();
    const double b = w.imag();
    const double s = std::sin(0.5 * b);
    return {std::expm1(a) * std::cos(b) - 2.0 * s * s, std::exp(a) * std::sin(b)};
}

double max_abs(std::span<const Complex> z)
{
    double m = 0.0;
    for (const auto& v : z)
    {
        m = std::max(m, std::abs(v));
    }
    return m;
}

// NaN from an overflowing product is reported as infinity.
double finite_or_inf(double v)
{
    return std::isnan(v) ? infinity : v;
}

} // namespace

CMatrix cauchy_matrix(std::span<const Complex> sigma, std::span<const Complex> mu)
{
    const auto r = static_cast<Eigen::Index>(sigma.size());
    const auto m = static_cast<Eigen::Index>(mu.size());
    CMatrix C(r, m);
    for (Eigen::Index i = 0; i < r; ++i)
    {
        for (Eigen::Index l = 0; l < m; ++l)
        {
            C(i, l) = 1.0 / (sigma[static_cast<std::size_t>(i)] - mu[static_cast<std::size_t>(l)]);
        }
    }
    return C;
}

Complex product_minus_one(std::span<const Complex> z)
{
    Complex s = 0.0;
    for (const auto& v : z)
    {
        s += log1p_c(v);
    }
    if (s.real() > 700.0)
    {
        return {infinity, 0.0};
    }
    return expm1_c(s);
}

EpsilonQuantities epsilon_quantities(std::span<const Complex> sigma,
                                     std::span<const Complex> mu)
{
    if (sigma.size() != mu.size())
    {
        throw Error(ErrorCode::SizeMismatch, "epsilon quantities need |sigma| = |mu|");
    }
    if (sigma.empty())
    {
        throw Error(ErrorCode::EmptySet, "epsilon quantities of an empty set");
    }
    const std::size_t r = sigma.size();
    const double floor  = sep_tol * max_abs(sigma);

    std::vector<Complex> neg(r);
    std::transform(sigma.begin(), sigma.end(), neg.begin(), [](Complex z) { return -z; });
    const auto asg = shifts::bottleneck_assignment(mu, neg);

    EpsilonQuantities out;
    out.mu_matched.resize(r);
    out.eps_k.resize(r);
    for (std::size_t k = 0; k < r; ++k)
    {
        out.mu_matched[k] = mu[asg.perm[k]];
        out.eps_k[k]      = out.mu_matched[k] + sigma[k];
    }
    for (std::size_t i = 0; i < r; ++i)
    {
        for (std::size_t k = 0; k < r; ++k)
        {
            if (std::abs(sigma[i] + sigma[k]) < floor ||
                std::abs(sigma[i] - out.mu_matched[k]) < floor)
            {
                throw Error(ErrorCode::DenominatorCollapse,
                            "a shift is too close to a reflected shift or a pole");
            }
        }
    }

    std::vector<Complex> terms(r);
    out.eta.resize(r);
    for (std::size_t i = 0; i < r; ++i)
    {
        for (std::size_t k = 0; k < r; ++k)
        {
            terms[k] = -out.eps_k[k] / (sigma[i] + sigma[k]);
        }
        out.eta[i]     = finite_or_inf(std::abs(product_minus_one(terms)));
        out.eps_bullet = std::max(out.eps_bullet, out.eta[i]);

        for (std::size_t k = 0; k < r; ++k)
        {
            terms[k] = out.eps_k[k] / (sigma[i] - out.mu_matched[k]);
        }
        out.eps = std::max(out.eps, finite_or_inf(std::abs(product_minus_one(terms))));
    }
    return out;
}

EpsilonQuantities epsilon_quantities(const ShiftSet& sigma, std::span<const Complex> mu)
{
    const auto vals = sigma.values();
    return epsilon_quantities(std::span<const Complex>(vals), mu);
}

ReducedBackward backward_reduced_perturbation(const ReducedModel& model)
{
    const auto& sigma = model.sigma;
    const auto r      = static_cast<Eigen::Index>(sigma.size());

    ReducedBackward out;
    out.q_bullet = placement::feedback_vector(model.shifts);
    out.dq       = model.q - out.q_bullet;
    out.eps      = epsilon_quantities(std::span<const Complex>(sigma),
                                      std::span<const Complex>(model.mu));

    out.dq_norm       = out.dq.norm();
    out.q_norm        = model.q.norm();
    out.q_bullet_norm = out.q_bullet.norm();
    out.dAr_norm      = std::sqrt(static_cast<double>(r)) * out.dq_norm;

    CMatrix Ab = -out.q_bullet * CVector::Ones(r).transpose();
    for (Eigen::Index i = 0; i < r; ++i)
    {
        Ab(i, i) += sigma[static_cast<std::size_t>(i)];
    }
    out.Ar_bullet_norm = linalg::norm2(Ab);
    const auto placed  = linalg::eig_dense(Ab).values;
    std::vector<Complex> neg(sigma.size());
    std::transform(sigma.begin(), sigma.end(), neg.begin(), [](Complex z) { return -z; });
    out.placement_residual = shifts::matching_distance(placed, neg) / model.shifts.max_abs();

    const double slack = 1.0 + 10.0 * unit_roundoff * static_cast<double>(r);
    if (out.eps.eps < 1.0)
    {
        out.bound_q_holds = out.dq_norm <= out.eps.eps * out.q_norm * slack;
    }
    if (out.eps.eps_bullet < 1.0)
    {
        out.bound_qbullet_holds =
            out.dq_norm <= out.eps.eps_bullet * out.q_bullet_norm * slack;
    }
    return out;
}

SystemBackward backward_system_perturbation(const LtiSystem& sys,
                                            const PrimitiveBases& bases,
                                            const ReducedModel& model)
{
    const auto red = backward_reduced_perturbation(model);
    if (!(red.eps.eps_bullet < 0.5))
    {
        throw Error(ErrorCode::CertificateInvalid,
                    "backward perturbation of the full model needs eps_bullet < 1/2");
    }
    const auto n = sys.order();
    const auto r = static_cast<Eigen::Index>(model.order());

    Eigen::PartialPivLU<CMatrix> lu(bases.L);
    const CMatrix Ut  = lu.solve(bases.W.transpose());
    const CVector db  = linalg::min_norm_solve(Ut, red.dq);
    const CVector f   = linalg::min_norm_solve(bases.V.transpose(), CVector::Ones(r));

    SystemBackward out;
    out.db = db.real();
    const RVector fr = f.real();
    out.dA = out.db * fr.transpose();
    {
        const double nb = db.norm();
        const double nf = f.norm();
        out.imag_residual = std::max(nb > 0.0 ? db.imag().norm() / nb : 0.0,
                                     nf > 0.0 ? f.imag().norm() / nf : 0.0);
    }

    const CVector e = CVector::Ones(r);
    const CMatrix Ap = (sys.A + out.dA).cast<Complex>();
    const CVector bp = (sys.b - out.db).cast<Complex>();
    const CMatrix lhs = Ut * Ap * bases.V;
    CMatrix rhs = -(Ut * bp) * e.transpose();
    for (Eigen::Index i = 0; i < r; ++i)
    {
        rhs(i, i) += model.sigma[static_cast<std::size_t>(i)];
    }
    const double scale = std::max(lhs.norm(), rhs.norm());
    out.projection_residual = scale > 0.0 ? (lhs - rhs).norm() / scale : 0.0;

    CMatrix Ab = -red.q_bullet * e.transpose();
    for (Eigen::Index i = 0; i < r; ++i)
    {
        Ab(i, i) += model.sigma[static_cast<std::size_t>(i)];
    }
    const CVector cc = sys.c.cast<Complex>();
    for (Eigen::Index i = 0; i < r; ++i)
    {
        const Complex s = model.sigma[static_cast<std::size_t>(i)];
        CMatrix Kr      = -Ab;
        Kr.diagonal().array() += s;
        const Complex gr = (model.c_r.transpose() *
                            Eigen::PartialPivLU<CMatrix>(Kr).solve(red.q_bullet))(0);
        CMatrix K = -Ap;
        K.diagonal().array() += s;
        const Complex g = (cc.transpose() * Eigen::PartialPivLU<CMatrix>(K).solve(bp))(0);
        const double rel = std::abs(gr - g) / std::max(std::abs(g), 1e-300);
        out.interpolation_residual = std::max(out.interpolation_residual, rel);
    }

    out.db_norm = out.db.norm();
    if (n >= 2)
    {
        const RVector sv = Eigen::JacobiSVD<RMatrix>(out.dA).singularValues();
        out.dA_norm       = sv(0);
        out.dA_rank_ratio = sv(0) > 0.0 ? sv(1) / sv(0) : 0.0;
    }
    else
    {
        out.dA_norm = std::abs(out.dA(0, 0));
    }

    out.kappa_V   = linalg::cond2(bases.V);
    out.cos_angle = linalg::subspace_cos_angle(bases.V, bases.W);
    const double kc = out.cos_angle > 0.0 ? out.kappa_V / out.cos_angle : infinity;
    const double eb = red.eps.eps_bullet;
    const double normA = linalg::norm2(sys.A.cast<Complex>());
    out.db_bound = red.eps.eps > 0.0 ? kc * red.eps.eps * sys.b.norm() : 0.0;
    out.dA_bound = eb > 0.0 ? kc * out.kappa_V * (2.0 * eb / (1.0 - 2.0 * eb)) * normA : 0.0;

    const Complex s = (db.transpose() * bases.W * e)(0);
    out.dc = (-(1.0 / static_cast<double>(r)) * s * f).real();
    return out;
}

PerturbationBound eigenvalue_perturbation_bound(std::span<const Complex> sigma,
                                                const CVector& q, const CVector& dq)
{
    const auto r = static_cast<Eigen::Index>(sigma.size());
    if (q.size() != r || dq.size() != r)
    {
        throw Error(ErrorCode::SizeMismatch, "q and dq must have one entry per shift");
    }
    const CVector e = CVector::Ones(r);
    CMatrix A1 = -q * e.transpose();
    CMatrix A2 = -(q + dq) * e.transpose();
    for (Eigen::Index i = 0; i < r; ++i)
    {
        A1(i, i) += sigma[static_cast<std::size_t>(i)];
        A2(i, i) += sigma[static_cast<std::size_t>(i)];
    }
    const auto mu  = linalg::eig_dense(A1).values;
    const auto mut = linalg::eig_dense(A2).values;

    const double floor_mu = unit_roundoff * linalg::norm2(A1);
    for (const auto& m : mu)
    {
        if (std::abs(m) <= floor_mu)
        {
            throw Error(ErrorCode::ZeroEigenvalue, "relative eigenvalue bound needs nonzero eigenvalues");
        }
    }
    const double floor_s = sep_tol * max_abs(sigma);
    for (const auto& s : sigma)
    {
        for (std::size_t l = 0; l < mu.size(); ++l)
        {
            if (std::abs(s - mu[l]) < floor_s || std::abs(s - mut[l]) < floor_s)
            {
                throw Error(ErrorCode::ShiftEigCollision,
                            "an eigenvalue coincides with a shift; the Cauchy matrix is undefined");
            }
        }
    }

    RMatrix cost(r, r);
    for (Eigen::Index i = 0; i < r; ++i)
    {
        for (Eigen::Index j = 0; j < r; ++j)
        {
            cost(i, j) = std::norm((mu[static_cast<std::size_t>(i)] -
                                    mut[static_cast<std::size_t>(j)]) /
                                   mu[static_cast<std::size_t>(i)]);
        }
    }
    const auto perm = shifts::min_sum_assignment(cost);
    PerturbationBound out;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < r; ++i)
    {
        sum += cost(i, static_cast<Eigen::Index>(perm[static_cast<std::size_t>(i)]));
    }
    out.lhs = std::sqrt(sum);

    const double dqe = std::sqrt(static_cast<double>(r)) * dq.norm();
    if (dqe == 0.0)
    {
        return out;
    }
    const CMatrix C  = cauchy_matrix(sigma, mu);
    const CMatrix Ct = cauchy_matrix(sigma, mut);
    CMatrix CM = C;
    for (Eigen::Index l = 0; l < r; ++l)
    {
        CM.col(l) *= mu[static_cast<std::size_t>(l)];
    }
    const RVector sv_cm = linalg::singular_values(CM);
    const double inv_cm = 1.0 / sv_cm(sv_cm.size() - 1);
    const double kt     = linalg::cond2(Ct);
    out.rhs        = linalg::norm2(C) * inv_cm * kt * dqe;
    out.rhs_remark = linalg::cond2(C) * kt * dqe;
    return out;
}

ConditionReport condition_report(const PrimitiveBases& bases, const ReducedModel& model)
{
    ConditionReport out;
    out.kappa_C = linalg::cond2(cauchy_matrix(model.sigma, model.mu));
    out.kappa_V = linalg::cond2(bases.V);
    try
    {
        out.cos_angle = linalg::subspace_cos_angle(bases.V, bases.W);
    }
    catch (const Error&)
    {
        out.cos_angle = 0.0;
    }
    out.q_norm = model.q.norm();
    return out;
}

BackwardCertificate certify(const LtiSystem& sys, const PrimitiveBases& bases,
                            const ReducedModel& model)
{
    BackwardCertificate out;
    const auto cond = condition_report(bases, model);
    out.kappa_C   = cond.kappa_C;
    out.kappa_V   = cond.kappa_V;
    out.cos_angle = cond.cos_angle;
    out.q_norm    = cond.q_norm;

    ReducedBackward red;
    try
    {
        red = backward_reduced_perturbation(model);
    }
    catch (const Error&)
    {
        out.eps = out.eps_bullet = infinity;
        out.dq_norm_bound_q = out.dq_norm_bound_qbullet = infinity;
        out.dAr_bound = out.db_bound = out.dA_bound = infinity;
        out.eta.assign(model.order(), infinity);
        return out;
    }
    out.eps           = red.eps.eps;
    out.eps_bullet    = red.eps.eps_bullet;
    out.eta           = red.eps.eta;
    out.dq_norm_bound_q       = out.eps * red.q_norm;
    out.dq_norm_bound_qbullet = out.eps_bullet * red.q_bullet_norm;
    out.dAr_bound = 2.0 * out.eps_bullet * red.Ar_bullet_norm;
    out.valid     = out.eps_bullet < 0.5;

    const double kc = out.cos_angle > 0.0 ? out.kappa_V / out.cos_angle : infinity;
    out.db_bound    = out.eps > 0.0 ? kc * out.eps * sys.b.norm() : 0.0;
    if (out.valid)
    {
        const double eb = out.eps_bullet;
        out.dA_bound = eb > 0.0 ? kc * out.kappa_V * (2.0 * eb / (1.0 - 2.0 * eb)) *
                                      linalg::norm2(sys.A.cast<Complex>())
                                : 0.0;
    }
    else
    {
        out.dA_bound = infinity;
    }
    return out;
}

} // namespace irka::diag

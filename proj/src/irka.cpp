#include <irka/irka.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <irka/error.hpp>

namespace irka
{

void IrkaConfig::validate(std::size_t n) const
{
    if (r < 1)
    {
        throw Error(ErrorCode::BadSpec, "reduced order must be at least 1");
    }
    if (r > n)
    {
        throw Error(ErrorCode::InvalidArgument, "reduced order exceeds the full order");
    }
    if (!(tol > 0.0) || !std::isfinite(tol))
    {
        throw Error(ErrorCode::BadSpec, "tolerance must be positive");
    }
    if (max_iter < 1)
    {
        throw Error(ErrorCode::BadSpec, "max_iter must be at least 1");
    }
    if (!(alpha.value >= 0.0 && alpha.value <= 1.0))
    {
        throw Error(ErrorCode::BadSpec, "alpha must lie in [0, 1]");
    }
    if (cycle_max_period < 2)
    {
        throw Error(ErrorCode::BadSpec, "cycle_max_period must be at least 2");
    }
}

namespace
{

double hermite_error(const std::vector<Complex>& ref, const std::vector<Complex>& val)
{
    double err = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i)
    {
        err = std::max(err, std::abs(ref[i] - val[i]) / (1.0 + std::abs(ref[i])));
    }
    return err;
}

} // namespace

StepResult irka_step(const LtiSystem& sys, const ShiftSet& shifts)
{
    StepResult out;
    out.bases = interp::build_primitive_bases(sys, shifts);
    out.model = interp::project_reduced(sys, out.bases);

    const auto& model = out.model;
    out.candidate     = shifts::reflect(ShiftSet::from_values(model.mu));

    auto& rec    = out.record;
    rec.sigma_in = shifts;
    rec.mu_out   = model.mu;
    rec.d        = shifts::matching_distance(out.candidate, shifts);
    rec.h        = shifts::hausdorff_distance(out.candidate, shifts);

    const auto cond = diag::condition_report(out.bases, model);
    rec.q_norm    = cond.q_norm;
    rec.kappa_C   = cond.kappa_C;
    rec.kappa_V   = cond.kappa_V;
    rec.cos_angle = cond.cos_angle;

    rec.cond_L             = out.bases.cond_L;
    rec.companion_residual = model.companion_residual;
    rec.eigvec_residual    = model.eigvec_residual;
    rec.degenerate_q = std::any_of(model.degenerate.begin(), model.degenerate.end(),
                                   [](bool b) { return b; });
    rec.unstable_poles = std::any_of(model.mu.begin(), model.mu.end(),
                                     [](Complex z) { return z.real() >= 0.0; });
    rec.kv_residual = std::numeric_limits<double>::quiet_NaN();

    try
    {
        const auto eq  = diag::epsilon_quantities(std::span<const Complex>(model.sigma),
                                                  std::span<const Complex>(model.mu));
        rec.eps        = eq.eps;
        rec.eps_bullet = eq.eps_bullet;
    }
    catch (const Error& e)
    {
        if (e.code() != ErrorCode::DenominatorCollapse)
        {
            throw;
        }
        rec.eps = rec.eps_bullet = infinity;
        rec.eps_collapsed        = true;
    }

    if (rec.degenerate_q)
    {
        // H_r has a pole on top of the shift; the comparison is undefined.
        rec.hermite_value_residual = std::numeric_limits<double>::quiet_NaN();
        rec.hermite_deriv_residual = std::numeric_limits<double>::quiet_NaN();
    }
    else
    {
        const auto r = model.sigma.size();
        std::vector<Complex> h(r), hr(r), dh(r), dhr(r);
        const CVector cc = sys.c.cast<Complex>();
        for (std::size_t i = 0; i < r; ++i)
        {
            const auto k = static_cast<Eigen::Index>(i);
            h[i]   = (cc.transpose() * out.bases.V.col(k))(0);
            dh[i]  = -out.bases.L(k, k);
            hr[i]  = interp::reduced_transfer_eval(model, model.sigma[i]);
            dhr[i] = interp::reduced_transfer_deriv(model, model.sigma[i]);
        }
        rec.hermite_value_residual = hermite_error(h, hr);
        rec.hermite_deriv_residual = hermite_error(dh, dhr);
    }
    return out;
}

BlendResult blended_update(const ShiftSet& sigma, const CVector& q, double alpha,
                           const std::vector<bool>& exclude)
{
    if (!(alpha >= 0.0 && alpha <= 1.0))
    {
        throw Error(ErrorCode::InvalidArgument, "alpha must lie in [0, 1]");
    }
    if (static_cast<std::size_t>(q.size()) != sigma.size() ||
        (!exclude.empty() && exclude.size() != sigma.size()))
    {
        throw Error(ErrorCode::SizeMismatch, "q and the exclusion mask must match the shifts");
    }
    const auto vals = sigma.values();

    BlendResult out;
    out.alpha   = alpha;
    out.q_blend = q;
    if (alpha != 1.0)
    {
        const CVector f = placement::feedback_vector(sigma);
        for (Eigen::Index i = 0; i < q.size(); ++i)
        {
            if (exclude.empty() || !exclude[static_cast<std::size_t>(i)])
            {
                out.q_blend(i) = alpha * q(i) + (1.0 - alpha) * f(i);
            }
        }
    }
    const auto eig = interp::companion_eig(vals, out.q_blend);
    out.candidate  = shifts::reflect(ShiftSet::from_values(eig.mu));
    return out;
}

double kv_equivalence_check(const ShiftSet& sigma, const CVector& q, double alpha,
                            std::span<const Complex> z_samples)
{
    const auto vals   = sigma.values();
    const CVector f   = placement::feedback_vector(sigma);
    const CVector qb  = alpha * q + (1.0 - alpha) * f;
    double worst      = 0.0;
    for (const auto& z : z_samples)
    {
        const Complex lhs = interp::secular_eval(vals, qb, z);
        const Complex rhs = alpha * interp::secular_eval(vals, q, z) +
                            (1.0 - alpha) * interp::secular_eval(vals, f, z);
        const auto nodal = interp::nodal_eval(vals, z);
        double terms     = 1.0;
        for (Eigen::Index i = 0; i < q.size(); ++i)
        {
            terms += (std::abs(alpha * q(i)) + std::abs((1.0 - alpha) * f(i))) /
                     std::abs(z - vals[static_cast<std::size_t>(i)]);
        }
        const double scale = std::abs(nodal.omega) * terms;
        worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
    return worst;
}

ShiftSet default_init(const LtiSystem& sys, const IrkaConfig& config)
{
    const auto ev = linalg::eigenvalues(sys.A);
    double lo     = infinity;
    double hi     = 0.0;
    for (const auto& z : ev)
    {
        const double m = std::abs(z);
        if (m > 0.0)
        {
            lo = std::min(lo, m);
        }
        hi = std::max(hi, m);
    }
    if (!(hi > 0.0))
    {
        lo = hi = 1.0;
    }
    if (hi < lo * (1.0 + 1e-6))
    {
        const double m = std::sqrt(lo * hi);
        lo = 0.5 * m;
        hi = 2.0 * m;
    }
    const std::size_t r = config.r;
    const double llo    = std::log(lo);
    const double lhi    = std::log(hi);

    std::vector<ShiftSet::Entry> entries;
    if (config.init == InitMode::Logspace)
    {
        for (std::size_t i = 0; i < r; ++i)
        {
            const double t = r == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(r - 1);
            entries.push_back({Complex(std::exp(llo + t * (lhi - llo)), 0.0), false});
        }
    }
    else
    {
        std::mt19937_64 engine(config.seed);
        const auto uniform = [&engine] {
            return static_cast<double>(engine() >> 11) * 0x1.0p-53;
        };
        for (std::size_t i = 0; i + 1 < r; i += 2)
        {
            const double m     = std::exp(llo + uniform() * (lhi - llo));
            const double theta = (0.05 + 0.95 * uniform()) * std::numbers::pi / 3.0;
            entries.push_back({std::polar(m, theta), true});
        }
        if (r % 2 == 1)
        {
            entries.push_back({Complex(std::exp(llo + uniform() * (lhi - llo)), 0.0), false});
        }
    }
    return shifts::enforce_separation(ShiftSet::from_entries(std::move(entries)));
}

std::string to_string(const RunStatus& status)
{
    switch (status.kind)
    {
    case StatusKind::Converged:
        return "Converged";
    case StatusKind::MaxIter:
        return "MaxIter";
    case StatusKind::Cycle:
        return "Cycle(" + std::to_string(status.period) + ")";
    case StatusKind::Failed:
        return "Failed(" + status.reason + ")";
    }
    return "Failed";
}

namespace
{

// Flags of `from` carried over to the (possibly nudged and reordered)
// points of `to` by nearest neighbour.
std::vector<bool> transfer_mask(const ShiftSet& from, const std::vector<bool>& mask,
                                const ShiftSet& to)
{
    const auto a = from.values();
    const auto b = to.values();
    std::vector<bool> out(b.size(), false);
    for (std::size_t i = 0; i < b.size(); ++i)
    {
        std::size_t best = 0;
        for (std::size_t j = 1; j < a.size(); ++j)
        {
            if (std::abs(a[j] - b[i]) < std::abs(a[best] - b[i]))
            {
                best = j;
            }
        }
        out[i] = mask[best];
    }
    return out;
}

bool stop_fires(const IterationRecord& rec, const IrkaConfig& config, double scale)
{
    switch (config.stop_rule)
    {
    case StopRule::Matching:
        return rec.d <= config.tol * scale;
    case StopRule::HausdorffThenMatching:
        return rec.h <= config.tol * scale && rec.d <= config.tol * scale;
    case StopRule::Certificate:
        return rec.eps_bullet <= config.tol;
    }
    return false;
}

} // namespace

FixedPointResult run_fixed_point(const StepFunction& step, const ShiftSet& init,
                                 const IrkaConfig& config)
{
    FixedPointResult out;
    std::vector<ShiftSet> visited;
    std::optional<StepResult> best;
    double best_d = infinity;

    ShiftSet sigma = init;
    std::vector<bool> flipped_mask(sigma.size(), false);
    double alpha  = config.update_mode == UpdateMode::Vanilla ? 1.0 : config.alpha.value;
    double prev_d = infinity;

    for (int k = 0; k < config.max_iter; ++k)
    {
        StepResult cur;
        try
        {
            cur = step(sigma);
        }
        catch (const Error& e)
        {
            out.status = {StatusKind::Failed, 0,
                          "iteration " + std::to_string(k) + ": " + e.what()};
            out.final  = std::move(best);
            return out;
        }
        auto& rec = cur.record;
        rec.k     = k;

        if (config.update_mode == UpdateMode::Blended &&
            config.alpha.kind == AlphaSchedule::Kind::Backoff && k > 0)
        {
            if (rec.d > prev_d)
            {
                alpha *= 0.5;
            }
            else if (rec.d < prev_d)
            {
                alpha = 1.0;
            }
        }
        rec.alpha_used = alpha;

        if (config.verify)
        {
            std::vector<Complex> z;
            const double m = sigma.max_abs();
            for (int j = 0; j < 8; ++j)
            {
                z.push_back(std::polar(m * (0.3 + 0.25 * j), 0.4 + 0.7 * j));
            }
            try
            {
                rec.kv_residual = kv_equivalence_check(sigma, cur.model.q, alpha, z);
            }
            catch (const Error&)
            {
                rec.kv_residual = std::numeric_limits<double>::quiet_NaN();
            }
        }

        if (stop_fires(rec, config, sigma.max_abs()))
        {
            out.history.push_back(rec);
            out.status = {StatusKind::Converged, 0, {}};
            out.final  = std::move(cur);
            return out;
        }

        ShiftSet next;
        shifts::FlipResult flip;
        try
        {
            const auto blend = blended_update(sigma, cur.model.q, alpha, flipped_mask);
            flip = shifts::flip_unstable(blend.candidate);
            next = shifts::enforce_separation(flip.shifts);
        }
        catch (const Error& e)
        {
            out.history.push_back(rec);
            out.status = {StatusKind::Failed, 0,
                          "iteration " + std::to_string(k) + ": " + e.what()};
            out.final  = std::move(cur);
            return out;
        }
        rec.flipped = flip.flipped;
        out.history.push_back(rec);

        if (rec.d < best_d)
        {
            best_d = rec.d;
            best   = cur;
        }
        visited.push_back(sigma);
        const auto needed = static_cast<std::size_t>(2 * config.cycle_max_period);
        if (visited.size() >= needed)
        {
            const auto cyc = shifts::detect_cycle(visited, config.cycle_max_period,
                                                  config.tol);
            if (cyc)
            {
                out.status = {StatusKind::Cycle, cyc->period, {}};
                out.final  = std::move(best);
                return out;
            }
        }

        flipped_mask = transfer_mask(flip.shifts, flip.mask, next);
        prev_d       = rec.d;
        sigma        = std::move(next);
        if (k + 1 == config.max_iter)
        {
            out.final = std::move(cur);
        }
    }
    out.status = {StatusKind::MaxIter, 0, {}};
    return out;
}

LtiSystem realify(const ReducedModel& model)
{
    const auto r = static_cast<Eigen::Index>(model.order());
    RMatrix A    = RMatrix::Zero(r, r);
    RVector b    = RVector::Zero(r);
    RVector c    = RVector::Zero(r);
    for (Eigen::Index l = 0; l < r;)
    {
        const Complex mu  = model.mu[static_cast<std::size_t>(l)];
        const Complex phi = model.residues(l);
        if (mu.imag() == 0.0)
        {
            A(l, l) = mu.real();
            b(l)    = 1.0;
            c(l)    = phi.real();
            l += 1;
        }
        else
        {
            if (l + 1 >= r || model.mu[static_cast<std::size_t>(l + 1)] != std::conj(mu))
            {
                throw Error(ErrorCode::NotConjugateClosed,
                            "reduced poles are not listed in conjugate pairs");
            }
            const double a    = mu.real();
            const double beta = std::abs(mu.imag());
            const Complex ph  = mu.imag() > 0.0 ? phi : std::conj(phi);
            A(l, l)         = a;
            A(l, l + 1)     = beta;
            A(l + 1, l)     = -beta;
            A(l + 1, l + 1) = a;
            b(l)            = 1.0;
            c(l)            = 2.0 * ph.real();
            c(l + 1)        = 2.0 * ph.imag();
            l += 2;
        }
    }
    return LtiSystem(std::move(A), std::move(b), std::move(c));
}

IrkaResult run_irka(const LtiSystem& sys, const IrkaConfig& config,
                    const std::optional<ShiftSet>& init)
{
    IrkaResult out;
    ShiftSet start;
    try
    {
        config.validate(static_cast<std::size_t>(sys.order()));
        start = init ? *init : default_init(sys, config);
        if (start.size() != config.r || !start.is_working())
        {
            throw Error(ErrorCode::BadSpec,
                        "initial shifts must be r points in the open right half-plane");
        }
    }
    catch (const Error& e)
    {
        out.status = {StatusKind::Failed, 0, e.what()};
        return out;
    }

    auto fp = run_fixed_point([&sys](const ShiftSet& s) { return irka_step(sys, s); },
                              start, config);
    out.history = std::move(fp.history);
    out.status  = std::move(fp.status);
    if (!fp.final)
    {
        return out;
    }
    const auto& fin = *fp.final;
    out.model       = fin.model;
    out.certificate = diag::certify(sys, fin.bases, fin.model);
    try
    {
        out.realified = realify(fin.model);
    }
    catch (const Error&)
    {
        out.realified.reset();
    }
    return out;
}

} // namespace irka

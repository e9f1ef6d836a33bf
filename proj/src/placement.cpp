#include <irka/placement.hpp>

#include <cmath>

#include <irka/error.hpp>

namespace irka::placement
{

namespace
{

void check_distinct(std::span<const Complex> sigma)
{
    double scale = 0.0;
    for (const auto& s : sigma)
    {
        scale = std::max(scale, std::abs(s));
    }
    for (std::size_t i = 0; i < sigma.size(); ++i)
    {
        for (std::size_t j = i + 1; j < sigma.size(); ++j)
        {
            if (std::abs(sigma[i] - sigma[j]) <= sep_tol * scale)
            {
                throw Error(ErrorCode::ShiftCollision,
                            "pole placement needs pairwise distinct shifts");
            }
        }
    }
}

CVector symmetrize(const ShiftSet& set, CVector v)
{
    const auto vals = set.values();
    const auto conj = set.conjugate_index();
    for (std::size_t i = 0; i < vals.size(); ++i)
    {
        const auto k = static_cast<Eigen::Index>(i);
        if (conj[i] == i)
        {
            v(k) = Complex(v(k).real(), 0.0);
        }
        else if (conj[i] > i)
        {
            const auto kc = static_cast<Eigen::Index>(conj[i]);
            const Complex avg = 0.5 * (v(k) + std::conj(v(kc)));
            v(k)  = avg;
            v(kc) = std::conj(avg);
        }
    }
    return v;
}

} // namespace

CVector placement_q(std::span<const Complex> sigma, std::span<const Complex> mu_target)
{
    if (sigma.size() != mu_target.size())
    {
        throw Error(ErrorCode::SizeMismatch, "placement target must have one value per shift");
    }
    check_distinct(sigma);
    const std::size_t r = sigma.size();
    CVector q(static_cast<Eigen::Index>(r));
    for (std::size_t i = 0; i < r; ++i)
    {
        // Interleave numerator and denominator factors so that the running
        // product stays near unit scale.
        Complex p = sigma[i] - mu_target[i];
        for (std::size_t j = 0; j < r; ++j)
        {
            if (j != i)
            {
                p *= (sigma[i] - mu_target[j]) / (sigma[i] - sigma[j]);
            }
        }
        q(static_cast<Eigen::Index>(i)) = p;
    }
    return q;
}

CVector placement_q(const ShiftSet& sigma, std::span<const Complex> mu_target)
{
    const auto vals = sigma.values();
    return symmetrize(sigma, placement_q(std::span<const Complex>(vals), mu_target));
}

CVector feedback_vector(std::span<const Complex> sigma)
{
    check_distinct(sigma);
    const std::size_t r = sigma.size();
    CVector f(static_cast<Eigen::Index>(r));
    for (std::size_t i = 0; i < r; ++i)
    {
        Complex p = 2.0 * sigma[i];
        for (std::size_t j = 0; j < r; ++j)
        {
            if (j != i)
            {
                p *= (sigma[i] + sigma[j]) / (sigma[i] - sigma[j]);
            }
        }
        f(static_cast<Eigen::Index>(i)) = p;
    }
    return f;
}

CVector feedback_vector(const ShiftSet& sigma)
{
    const auto vals = sigma.values();
    return symmetrize(sigma, feedback_vector(std::span<const Complex>(vals)));
}

} // namespace irka::placement

#include <irka/shifts.hpp>

#include <algorithm>
#include <cmath>
#include <tuple>

#include <irka/error.hpp>

namespace irka
{

ShiftSet ShiftSet::from_values(std::span<const Complex> values, double tol)
{
    std::vector<Complex> work(values.begin(), values.end());
    linalg::pair_conjugates(work, tol);
    std::vector<Entry> entries;
    entries.reserve(work.size());
    for (const auto& z : work)
    {
        if (z.imag() == 0.0)
        {
            entries.push_back({z, false});
        }
        else if (z.imag() > 0.0)
        {
            entries.push_back({z, true});
        }
    }
    return from_entries(std::move(entries));
}

ShiftSet ShiftSet::from_values_checked(std::span<const Complex> values, double tol)
{
    std::vector<Complex> work(values.begin(), values.end());
    linalg::pair_conjugates(work, tol);
    for (std::size_t i = 0; i < work.size(); ++i)
    {
        // Symmetrization moves a point by half its pairing mismatch and a
        // snap by its imaginary part; both must stay within tolerance.
        if (std::abs(work[i] - values[i]) > tol * (1.0 + std::abs(values[i])))
        {
            throw Error(ErrorCode::NotConjugateClosed,
                        "point " + std::to_string(i) +
                            " has no conjugate partner within tolerance");
        }
    }
    return from_values(work, tol);
}

ShiftSet ShiftSet::from_entries(std::vector<Entry> entries)
{
    ShiftSet s;
    s.entries_ = std::move(entries);
    for (auto& e : s.entries_)
    {
        if (e.pair && e.value.imag() < 0.0)
        {
            e.value = std::conj(e.value);
        }
        if (e.pair && e.value.imag() == 0.0)
        {
            throw Error(ErrorCode::InvalidArgument,
                        "a conjugate pair entry needs a nonzero imaginary part");
        }
        if (!e.pair && e.value.imag() != 0.0)
        {
            throw Error(ErrorCode::NotConjugateClosed,
                        "unpaired entry with nonzero imaginary part");
        }
        s.size_ += e.pair ? 2 : 1;
    }
    s.canonicalize();
    return s;
}

void ShiftSet::canonicalize()
{
    for (auto& e : entries_)
    {
        if (!e.pair)
        {
            e.value = Complex(e.value.real(), 0.0);
        }
    }
    std::stable_sort(entries_.begin(), entries_.end(),
                     [](const Entry& a, const Entry& b) {
                         return std::make_tuple(a.value.real(), a.value.imag()) <
                                std::make_tuple(b.value.real(), b.value.imag());
                     });
}

std::vector<Complex> ShiftSet::values() const
{
    std::vector<Complex> out;
    out.reserve(size_);
    for (const auto& e : entries_)
    {
        out.push_back(e.value);
        if (e.pair)
        {
            out.push_back(std::conj(e.value));
        }
    }
    return out;
}

std::vector<std::size_t> ShiftSet::conjugate_index() const
{
    std::vector<std::size_t> idx;
    idx.reserve(size_);
    std::size_t k = 0;
    for (const auto& e : entries_)
    {
        if (e.pair)
        {
            idx.push_back(k + 1);
            idx.push_back(k);
            k += 2;
        }
        else
        {
            idx.push_back(k);
            k += 1;
        }
    }
    return idx;
}

double ShiftSet::max_abs() const noexcept
{
    double m = 0.0;
    for (const auto& e : entries_)
    {
        m = std::max(m, std::abs(e.value));
    }
    return m;
}

bool ShiftSet::is_working() const noexcept
{
    return std::all_of(entries_.begin(), entries_.end(),
                       [](const Entry& e) { return e.value.real() > 0.0; });
}

double ShiftSet::min_separation() const
{
    const auto v = values();
    double m     = infinity;
    for (std::size_t i = 0; i < v.size(); ++i)
    {
        for (std::size_t j = i + 1; j < v.size(); ++j)
        {
            m = std::min(m, std::abs(v[i] - v[j]));
        }
    }
    return m;
}

bool operator==(const ShiftSet& a, const ShiftSet& b) noexcept
{
    return a.entries_.size() == b.entries_.size() &&
           std::equal(a.entries_.begin(), a.entries_.end(), b.entries_.begin(),
                      [](const ShiftSet::Entry& x, const ShiftSet::Entry& y) {
                          return x.value == y.value && x.pair == y.pair;
                      });
}

namespace shifts
{

namespace
{

// Kuhn's augmenting paths on the bipartite graph {(i, j) : allowed(i, j)}.
class BipartiteMatcher
{
public:
    explicit BipartiteMatcher(std::size_t n) : n_(n), match_(n), seen_(n) {}

    template <typename Allowed>
    bool perfect(Allowed allowed)
    {
        std::fill(match_.begin(), match_.end(), n_);
        for (std::size_t i = 0; i < n_; ++i)
        {
            std::fill(seen_.begin(), seen_.end(), false);
            if (!augment(i, allowed))
            {
                return false;
            }
        }
        return true;
    }

    /// match()[j] = row matched to column j
    const std::vector<std::size_t>& match() const noexcept
    {
        return match_;
    }

private:
    template <typename Allowed>
    bool augment(std::size_t i, Allowed& allowed)
    {
        for (std::size_t j = 0; j < n_; ++j)
        {
            if (!allowed(i, j) || seen_[j])
            {
                continue;
            }
            seen_[j] = true;
            if (match_[j] == n_ || augment(match_[j], allowed))
            {
                match_[j] = i;
                return true;
            }
        }
        return false;
    }

    std::size_t n_;
    std::vector<std::size_t> match_;
    std::vector<bool> seen_;
};

void require_same_size(std::size_t na, std::size_t nb)
{
    if (na != nb)
    {
        throw Error(ErrorCode::SizeMismatch,
                    "matching needs equal sizes (" + std::to_string(na) +
                        " vs " + std::to_string(nb) + ")");
    }
}

} // namespace

Assignment bottleneck_assignment(std::span<const Complex> a,
                                 std::span<const Complex> b)
{
    require_same_size(a.size(), b.size());
    const std::size_t r = a.size();
    Assignment out;
    if (r == 0)
    {
        return out;
    }

    RMatrix dist(r, r); // dist(i, j) = |a_i - b_j|
    std::vector<double> levels;
    levels.reserve(r * r);
    for (std::size_t i = 0; i < r; ++i)
    {
        for (std::size_t j = 0; j < r; ++j)
        {
            dist(i, j) = std::abs(a[i] - b[j]);
            levels.push_back(dist(i, j));
        }
    }
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    // The optimum is one of the r^2 pairwise distances: find the smallest
    // threshold admitting a perfect matching.
    BipartiteMatcher matcher(r);
    std::size_t lo = 0;
    std::size_t hi = levels.size() - 1;
    while (lo < hi)
    {
        const std::size_t mid = lo + (hi - lo) / 2;
        const double t        = levels[mid];
        if (matcher.perfect([&](std::size_t i, std::size_t j) { return dist(i, j) <= t; }))
        {
            hi = mid;
        }
        else
        {
            lo = mid + 1;
        }
    }
    const double t = levels[lo];

    // Many permutations attain t; take the one with the least sum of squared
    // distances among them so that the result is (generically) unique and
    // therefore respects conjugate symmetry of the inputs.
    const double big = 1.0 + static_cast<double>(r) * t * t * 4.0 + 1.0;
    RMatrix cost(r, r);
    for (std::size_t i = 0; i < r; ++i)
    {
        for (std::size_t j = 0; j < r; ++j)
        {
            cost(i, j) = dist(i, j) <= t ? dist(i, j) * dist(i, j) : big;
        }
    }
    const auto rows = min_sum_assignment(cost); // a_i -> b_rows[i]
    out.value = t;
    out.perm.assign(r, 0);
    for (std::size_t i = 0; i < r; ++i)
    {
        out.perm[rows[i]] = i;
    }
    return out;
}

std::vector<std::size_t> min_sum_assignment(const RMatrix& cost)
{
    const auto n = static_cast<std::size_t>(cost.rows());
    if (cost.cols() != cost.rows())
    {
        throw Error(ErrorCode::SizeMismatch, "assignment cost must be square");
    }
    // Shortest augmenting path with potentials, 1-based with a sentinel
    // column 0.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    std::vector<bool> used(n + 1);
    for (std::size_t i = 1; i <= n; ++i)
    {
        p[0]            = i;
        std::size_t j0  = 0;
        std::fill(minv.begin(), minv.end(), infinity);
        std::fill(used.begin(), used.end(), false);
        do
        {
            used[j0]          = true;
            const auto i0     = p[j0];
            double delta      = infinity;
            std::size_t j1    = 0;
            for (std::size_t j = 1; j <= n; ++j)
            {
                if (used[j])
                {
                    continue;
                }
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j])
                {
                    minv[j] = cur;
                    way[j]  = j0;
                }
                if (minv[j] < delta)
                {
                    delta = minv[j];
                    j1    = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j)
            {
                if (used[j])
                {
                    u[p[j]] += delta;
                    v[j] -= delta;
                }
                else
                {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do
        {
            const auto j1 = way[j0];
            p[j0]         = p[j1];
            j0            = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> perm(n);
    for (std::size_t j = 1; j <= n; ++j)
    {
        perm[p[j] - 1] = j - 1;
    }
    return perm;
}

double matching_distance(std::span<const Complex> a, std::span<const Complex> b)
{
    return bottleneck_assignment(a, b).value;
}

double matching_distance(const ShiftSet& a, const ShiftSet& b)
{
    const auto va = a.values();
    const auto vb = b.values();
    return matching_distance(va, vb);
}

double hausdorff_distance(std::span<const Complex> a, std::span<const Complex> b)
{
    if (a.empty() || b.empty())
    {
        throw Error(ErrorCode::EmptySet, "Hausdorff distance of an empty set");
    }
    auto directed = [](std::span<const Complex> x, std::span<const Complex> y) {
        double worst = 0.0;
        for (const auto& xi : x)
        {
            double best = infinity;
            for (const auto& yj : y)
            {
                best = std::min(best, std::abs(xi - yj));
            }
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

double hausdorff_distance(const ShiftSet& a, const ShiftSet& b)
{
    const auto va = a.values();
    const auto vb = b.values();
    return hausdorff_distance(va, vb);
}

ShiftSet reflect(const ShiftSet& s)
{
    auto entries = s.entries();
    for (auto& e : entries)
    {
        // -z for reals; for a pair keep the upper member, -conj(z).
        e.value = e.pair ? -std::conj(e.value) : -e.value;
    }
    return ShiftSet::from_entries(std::move(entries));
}

FlipResult flip_unstable(const ShiftSet& candidate)
{
    FlipResult out;
    const double floor_re = 1e-8 * (candidate.max_abs() > 0.0 ? candidate.max_abs() : 1.0);
    auto entries          = candidate.entries();
    std::vector<Complex> produced;
    for (auto& e : entries)
    {
        if (e.value.real() > 0.0)
        {
            continue;
        }
        const double re = e.value.real() == 0.0 ? floor_re : -e.value.real();
        e.value         = Complex(re, e.value.imag());
        out.flipped += e.pair ? 2 : 1;
        produced.push_back(e.value);
    }
    out.shifts = ShiftSet::from_entries(std::move(entries));

    const auto values = out.shifts.values();
    out.mask.assign(values.size(), false);
    for (std::size_t i = 0; i < values.size(); ++i)
    {
        for (const auto& z : produced)
        {
            if (values[i] == z || values[i] == std::conj(z))
            {
                out.mask[i] = true;
            }
        }
    }
    return out;
}

ShiftSet enforce_separation(const ShiftSet& s)
{
    auto entries       = s.entries();
    const double scale = s.max_abs();
    if (entries.empty() || scale == 0.0)
    {
        return s;
    }
    const double gap = sep_tol * scale;
    for (int round = 0; round < 64; ++round)
    {
        bool moved = false;
        for (auto& e : entries)
        {
            // A pair collides with itself when it hugs the real axis.
            if (e.pair && 2.0 * e.value.imag() < gap)
            {
                e.value = Complex(e.value.real(), gap);
                moved   = true;
            }
        }
        for (std::size_t i = 0; i < entries.size(); ++i)
        {
            for (std::size_t j = 0; j < i; ++j)
            {
                const auto& a = entries[j].value;
                const auto& b = entries[i].value;
                const double d =
                    std::min(std::abs(a - b), std::abs(a - std::conj(b)));
                if (d < gap)
                {
                    entries[i].value *= 1.0 + sep_tol * static_cast<double>(i + 1);
                    moved = true;
                }
            }
        }
        if (!moved)
        {
            break;
        }
    }
    return ShiftSet::from_entries(std::move(entries));
}

std::optional<CycleInfo> detect_cycle(std::span<const ShiftSet> history,
                                      int max_period, double tol)
{
    if (max_period < 2 || history.size() < 2 * static_cast<std::size_t>(max_period))
    {
        throw Error(ErrorCode::InvalidArgument,
                    "cycle detection needs max_period >= 2 and at least "
                    "2 max_period iterates");
    }
    const std::size_t last = history.size() - 1;
    const auto& newest     = history[last];
    const double scale     = newest.max_abs() > 0.0 ? newest.max_abs() : 1.0;
    if (matching_distance(newest, history[last - 1]) < tol * scale)
    {
        return std::nullopt;
    }
    for (int p = 2; p <= max_period; ++p)
    {
        const std::size_t span = static_cast<std::size_t>(std::max(3, p));
        if (last < span - 1 + static_cast<std::size_t>(p))
        {
            continue;
        }
        double worst = 0.0;
        bool ok      = true;
        for (std::size_t t = 0; t < span && ok; ++t)
        {
            const std::size_t k = last - t;
            const auto& cur     = history[k];
            const double s      = cur.max_abs() > 0.0 ? cur.max_abs() : 1.0;
            const double res    = matching_distance(cur, history[k - p]) / s;
            worst               = std::max(worst, res);
            ok                  = res < tol;
        }
        if (ok)
        {
            return CycleInfo{p, worst};
        }
    }
    return std::nullopt;
}

} // namespace shifts
} // namespace irka

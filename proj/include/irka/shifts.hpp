#ifndef IRKA_SHIFTS_HPP
#define IRKA_SHIFTS_HPP

///
/// \file shifts.hpp
///
/// Conjugation-closed sets of interpolation points and the metrics used to
/// compare successive sets.
///

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <irka/linalg.hpp>

namespace irka
{

/// Minimum relative separation between distinct shifts.
inline constexpr double sep_tol = 1e-8;

///
/// ### ShiftSet
///
/// An unordered tuple of complex points closed under conjugation.
///
/// Only real points and the upper member of each conjugate pair are stored;
/// the lower member is materialized on demand, so closure holds exactly by
/// construction. Entries are kept in a canonical order (ascending real part,
/// then imaginary part) and `values()` lists every pair as `(z, conj(z))`
/// next to each other.
///
class ShiftSet
{
public:
    struct Entry
    {
        Complex value; ///< real, or the member with positive imaginary part
        bool pair;     ///< true when `value` stands for {value, conj(value)}
    };

    ShiftSet() = default;

    /// Pairing pass over arbitrary values (see `linalg::pair_conjugates`).
    /// Any input is accepted; near-conjugates are symmetrized.
    static ShiftSet from_values(std::span<const Complex> values, double tol = pair_tol);

    /// As `from_values`, but throws `NotConjugateClosed` when some value has
    /// no conjugate partner within `tol (1 + |z|)`.
    static ShiftSet from_values_checked(std::span<const Complex> values,
                                        double tol = pair_tol);

    static ShiftSet from_entries(std::vector<Entry> entries);

    std::size_t size() const noexcept
    {
        return size_;
    }
    bool empty() const noexcept
    {
        return size_ == 0;
    }

    const std::vector<Entry>& entries() const noexcept
    {
        return entries_;
    }

    /// Materialized points.
    std::vector<Complex> values() const;

    /// Index of `conj(values()[i])` within `values()`.
    std::vector<std::size_t> conjugate_index() const;

    double max_abs() const noexcept;

    /// All real parts strictly positive (usable to build bases).
    bool is_working() const noexcept;

    /// Smallest pairwise distance of the materialized points.
    double min_separation() const;

    friend bool operator==(const ShiftSet& a, const ShiftSet& b) noexcept;

private:
    void canonicalize();

    std::vector<Entry> entries_;
    std::size_t size_ = 0;
};

namespace shifts
{

struct Assignment
{
    double value = 0.0;
    /// `b[i]` is matched with `a[perm[i]]`.
    std::vector<std::size_t> perm;
};

/// Exact bottleneck assignment `min_pi max_i |a[pi(i)] - b[i]|`.
Assignment bottleneck_assignment(std::span<const Complex> a,
                                 std::span<const Complex> b);

/// Minimum-sum assignment (Hungarian method) on a square cost matrix;
/// row `i` is assigned to column `perm[i]`.
std::vector<std::size_t> min_sum_assignment(const RMatrix& cost);

double matching_distance(std::span<const Complex> a, std::span<const Complex> b);
double matching_distance(const ShiftSet& a, const ShiftSet& b);

double hausdorff_distance(std::span<const Complex> a, std::span<const Complex> b);
double hausdorff_distance(const ShiftSet& a, const ShiftSet& b);

/// Entrywise negation.
ShiftSet reflect(const ShiftSet& s);

struct FlipResult
{
    ShiftSet shifts;
    int flipped = 0;
    /// Aligned with `shifts.values()`: true where the point came from a flip.
    std::vector<bool> mask;
};

/// Mirrors every point with `Re <= 0` to `-conj(z)`; points on the imaginary
/// axis land at `Re = 1e-8 max|z|`.
FlipResult flip_unstable(const ShiftSet& candidate);

/// Pushes colliding points apart: `z_i <- z_i (1 + sep_tol i)` on the later
/// entry of each colliding pair, until `min_separation >= sep_tol max|z|`.
ShiftSet enforce_separation(const ShiftSet& s);

struct CycleInfo
{
    int period      = 0;
    double residual = 0.0;
};

///
/// Smallest period `p` in `[2, max_period]` such that the last `max(3, p)`
/// iterates each sit within `tol max|z|` of the iterate `p` steps earlier,
/// while consecutive iterates are still apart (period one is convergence and
/// is not reported). `history.size()` must be at least `2 max_period`.
///
std::optional<CycleInfo> detect_cycle(std::span<const ShiftSet> history,
                                      int max_period, double tol);

} // namespace shifts
} // namespace irka

#endif /* IRKA_SHIFTS_HPP */

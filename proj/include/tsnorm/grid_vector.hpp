#pragma once

#include <map>
#include <vector>

#include "tsnorm/params.hpp"
#include "tsnorm/sparse_vector.hpp"

namespace tsnorm {

enum class GridBase { Alpha, S, T };

const char* grid_base_name(GridBase base);
double grid_base_value(GridBase base, const Params& params);

struct GridEntry {
    int sign;           // +1 or -1
    long long exponent; // coefficient is sign * base^exponent

    auto operator<=>(const GridEntry&) const = default;
};

/// Exact exponent representation of a vector whose entries are +-base^j.
/// Exponents are integers throughout; equality is exact.
class GridVector {
public:
    GridVector() = default;
    explicit GridVector(GridBase base) : base_(base) {}

    GridBase base() const { return base_; }
    void set(Index i, int sign, long long exponent);
    void erase(Index i) { entries_.erase(i); }
    const std::map<Index, GridEntry>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    std::size_t support_size() const { return entries_.size(); }
    Index min_index() const;
    Index max_index() const;

    SparseVector to_sparse(const Params& params) const;
    /// sum_i base^(e * exponent_i), the e-th power mass in double precision.
    double power_mass(double e, const Params& params) const;

    /// Multiplies by base^k: every exponent shifts by k.
    GridVector scaled_by_pow(long long k) const;
    /// Same entries under a different base tag (exponents unchanged).
    GridVector retagged(GridBase base) const;

    auto operator<=>(const GridVector&) const = default;

private:
    GridBase base_ = GridBase::T;
    std::map<Index, GridEntry> entries_;
};

/// Sum of grid vectors with pairwise disjoint supports (same base).
GridVector grid_disjoint_sum(const std::vector<GridVector>& parts);

/// Nearest-grid-point quantization: each |x(i)| is replaced by base^e with
/// e the closest integer to log_base |x(i)|, so base^(-1/2) <= base^e/|x(i)|
/// <= base^(1/2). Ties round to the smaller exponent. Signs are preserved.
GridVector quantize_to_grid(const SparseVector& x, double base, GridBase tag);

/// Splits a base-alpha vector by exponent residue mod M into (J_0 x, ..., J_{M-1} x).
/// Parts have disjoint supports and sum back to x.
std::vector<GridVector> j_m_split(const GridVector& x, const Params& params);

/// Part m of the split above, with m reduced mod M.
GridVector j_m_of(const GridVector& x, long long m, const Params& params);

/// Min / max level of a nonempty base-t vector: level(i) = -exponent(i).
long long min_level(const GridVector& x);
long long max_level(const GridVector& x);

bool grid_is_block(const std::vector<GridVector>& seq);

} // namespace tsnorm

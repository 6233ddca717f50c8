#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "tsnorm/error.hpp"

namespace tsnorm {

using Index = std::int64_t;

/// Finite-support real vector, index -> nonzero coefficient. Indices are
/// 1-based. Zero coefficients are never stored, so support_size() is exact.
class SparseVector {
public:
    SparseVector() = default;

    static SparseVector from_pairs(const std::vector<std::pair<Index, double>>& pairs);

    /// Sets x(i) = v; v == 0 erases the entry.
    void set(Index i, double v);
    double at(Index i) const; // 0 when absent

    const std::map<Index, double>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    std::size_t support_size() const { return entries_.size(); }
    Index min_index() const;
    Index max_index() const;

    bool operator==(const SparseVector&) const = default;

private:
    std::map<Index, double> entries_;
};

/// l_e norm; e = infinity() gives the sup-norm. Rejects e < 1. Empty vector -> 0.
double lp_norm(const SparseVector& x, double e);

/// sum_i x(i) y(i) over the common support.
double dual_pair(const SparseVector& x, const SparseVector& y);

/// Restriction Ex: keeps coordinates whose index lies in `indices`.
SparseVector restrict(const SparseVector& x, const std::vector<Index>& indices);

/// Spreading image: coordinate i moves to phi(i). phi must be strictly
/// increasing along the support, otherwise Error("bad_spread").
template <class Phi>
SparseVector spread(const SparseVector& x, Phi&& phi) {
    SparseVector out;
    bool first = true;
    Index prev = 0;
    for (const auto& [i, v] : x.entries()) {
        Index j = phi(i);
        if (!first && j <= prev)
            fail("bad_spread", "index map is not strictly increasing");
        first = false;
        prev = j;
        out.set(j, v);
    }
    return out;
}

/// supp x_1 < supp x_2 < ... (empty vectors are not allowed in a block sequence).
bool is_block(const std::vector<SparseVector>& seq);

/// Ordered list of pairwise-disjoint index sets; `successive` additionally
/// requires each set to lie strictly before the next.
struct IntervalSet {
    std::vector<std::vector<Index>> sets;
    bool successive = true;

    bool valid() const;
};

} // namespace tsnorm

#include "tsnorm/sparse_vector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace tsnorm {

SparseVector SparseVector::from_pairs(const std::vector<std::pair<Index, double>>& pairs) {
    SparseVector x;
    for (const auto& [i, v] : pairs) x.set(i, v);
    return x;
}

void SparseVector::set(Index i, double v) {
    if (i < 1) fail("bad_vector", "indices must be >= 1, got " + std::to_string(i));
    if (!std::isfinite(v)) fail("bad_vector", "non-finite coefficient");
    if (v == 0.0)
        entries_.erase(i);
    else
        entries_[i] = v;
}

double SparseVector::at(Index i) const {
    auto it = entries_.find(i);
    return it == entries_.end() ? 0.0 : it->second;
}

Index SparseVector::min_index() const {
    if (entries_.empty()) fail("bad_vector", "empty vector has no support");
    return entries_.begin()->first;
}

Index SparseVector::max_index() const {
    if (entries_.empty()) fail("bad_vector", "empty vector has no support");
    return entries_.rbegin()->first;
}

double lp_norm(const SparseVector& x, double e) {
    if (std::isinf(e)) {
        double m = 0.0;
        for (const auto& [i, v] : x.entries()) m = std::max(m, std::fabs(v));
        return m;
    }
    if (!(e >= 1.0)) fail("bad_exponent", "lp_norm requires e >= 1");
    double acc = 0.0;
    for (const auto& [i, v] : x.entries()) acc += std::pow(std::fabs(v), e);
    return std::pow(acc, 1.0 / e);
}

double dual_pair(const SparseVector& x, const SparseVector& y) {
    const SparseVector& small = x.support_size() <= y.support_size() ? x : y;
    const SparseVector& big = x.support_size() <= y.support_size() ? y : x;
    double acc = 0.0;
    for (const auto& [i, v] : small.entries()) acc += v * big.at(i);
    return acc;
}

SparseVector restrict(const SparseVector& x, const std::vector<Index>& indices) {
    SparseVector out;
    for (Index i : indices) {
        double v = x.at(i);
        if (v != 0.0) out.set(i, v);
    }
    return out;
}

bool is_block(const std::vector<SparseVector>& seq) {
    Index prev_max = 0;
    for (const auto& x : seq) {
        if (x.empty()) return false;
        if (x.min_index() <= prev_max) return false;
        prev_max = x.max_index();
    }
    return true;
}

bool IntervalSet::valid() const {
    std::set<Index> seen;
    Index prev_max = 0;
    for (const auto& set : sets) {
        if (set.empty()) return false;
        Index lo = *std::min_element(set.begin(), set.end());
        Index hi = *std::max_element(set.begin(), set.end());
        for (Index i : set)
            if (!seen.insert(i).second) return false;
        if (successive && lo <= prev_max) return false;
        prev_max = std::max(prev_max, hi);
    }
    return true;
}

} // namespace tsnorm

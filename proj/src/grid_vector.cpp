#include "tsnorm/grid_vector.hpp"

#include <cmath>
#include <string>

namespace tsnorm {

const char* grid_base_name(GridBase base) {
    switch (base) {
        case GridBase::Alpha: return "alpha";
        case GridBase::S: return "s";
        case GridBase::T: return "t";
    }
    return "?";
}

double grid_base_value(GridBase base, const Params& params) {
    switch (base) {
        case GridBase::Alpha: return params.alpha;
        case GridBase::S: return params.s;
        case GridBase::T: return params.t;
    }
    fail("bad_vector", "unknown grid base");
}

void GridVector::set(Index i, int sign, long long exponent) {
    if (i < 1) fail("bad_vector", "indices must be >= 1, got " + std::to_string(i));
    if (sign != 1 && sign != -1) fail("bad_vector", "sign must be +-1");
    if (exponent > 1000000 || exponent < -1000000)
        fail("bad_vector", "grid exponent out of range");
    entries_[i] = GridEntry{sign, exponent};
}

Index GridVector::min_index() const {
    if (entries_.empty()) fail("bad_vector", "empty vector has no support");
    return entries_.begin()->first;
}

Index GridVector::max_index() const {
    if (entries_.empty()) fail("bad_vector", "empty vector has no support");
    return entries_.rbegin()->first;
}

SparseVector GridVector::to_sparse(const Params& params) const {
    double base = grid_base_value(base_, params);
    SparseVector out;
    for (const auto& [i, ge] : entries_)
        out.set(i, ge.sign * std::pow(base, static_cast<double>(ge.exponent)));
    return out;
}

double GridVector::power_mass(double e, const Params& params) const {
    double base = grid_base_value(base_, params);
    double acc = 0.0;
    for (const auto& [i, ge] : entries_)
        acc += std::pow(base, e * static_cast<double>(ge.exponent));
    return acc;
}

GridVector GridVector::scaled_by_pow(long long k) const {
    GridVector out(base_);
    for (const auto& [i, ge] : entries_) out.set(i, ge.sign, ge.exponent + k);
    return out;
}

GridVector GridVector::retagged(GridBase base) const {
    GridVector out(base);
    for (const auto& [i, ge] : entries_) out.set(i, ge.sign, ge.exponent);
    return out;
}

GridVector grid_disjoint_sum(const std::vector<GridVector>& parts) {
    if (parts.empty()) fail("bad_vector", "cannot sum an empty list of parts");
    GridVector out(parts.front().base());
    for (const auto& part : parts) {
        if (part.base() != out.base()) fail("bad_vector", "mixed grid bases in sum");
        for (const auto& [i, ge] : part.entries()) {
            if (out.entries().count(i))
                fail("bad_vector", "overlapping supports in disjoint sum");
            out.set(i, ge.sign, ge.exponent);
        }
    }
    return out;
}

GridVector quantize_to_grid(const SparseVector& x, double base, GridBase tag) {
    if (!(base > 1.0)) fail("bad_base", "quantization base must be > 1");
    GridVector out(tag);
    const double logb = std::log(base);
    for (const auto& [i, v] : x.entries()) {
        double av = std::fabs(v);
        double L = std::log(av) / logb;
        long long e0 = static_cast<long long>(std::floor(L));
        double frac = L - static_cast<double>(e0);
        long long e;
        if (frac > 0.5 + 1e-12) {
            e = e0 + 1;
        } else if (frac < 0.5 - 1e-12) {
            e = e0;
        } else {
            // Near-tie: compare |v|^2 against the geometric midpoint base^(2*e0+1)
            // in extended precision. Exact midpoints go to the smaller exponent.
            long double mid = std::pow(static_cast<long double>(base),
                                       static_cast<long double>(2 * e0 + 1));
            long double vv = static_cast<long double>(av) * static_cast<long double>(av);
            e = (vv > mid) ? e0 + 1 : e0;
        }
        out.set(i, v > 0 ? 1 : -1, e);
    }
    return out;
}

std::vector<GridVector> j_m_split(const GridVector& x, const Params& params) {
    if (x.base() != GridBase::Alpha)
        fail("bad_vector", "j_m_split expects a base-alpha vector");
    const long long M = params.M;
    std::vector<GridVector> parts(static_cast<std::size_t>(M), GridVector(GridBase::Alpha));
    for (const auto& [i, ge] : x.entries()) {
        long long m = ((ge.exponent % M) + M) % M;
        parts[static_cast<std::size_t>(m)].set(i, ge.sign, ge.exponent);
    }
    return parts;
}

GridVector j_m_of(const GridVector& x, long long m, const Params& params) {
    if (x.base() != GridBase::Alpha)
        fail("bad_vector", "j_m_of expects a base-alpha vector");
    const long long M = params.M;
    long long mm = ((m % M) + M) % M;
    GridVector out(GridBase::Alpha);
    for (const auto& [i, ge] : x.entries())
        if (((ge.exponent % M) + M) % M == mm) out.set(i, ge.sign, ge.exponent);
    return out;
}

long long min_level(const GridVector& x) {
    if (x.empty()) fail("bad_vector", "level of empty vector");
    long long best = -x.entries().begin()->second.exponent;
    for (const auto& [i, ge] : x.entries()) best = std::min(best, -ge.exponent);
    return best;
}

long long max_level(const GridVector& x) {
    if (x.empty()) fail("bad_vector", "level of empty vector");
    long long best = -x.entries().begin()->second.exponent;
    for (const auto& [i, ge] : x.entries()) best = std::max(best, -ge.exponent);
    return best;
}

bool grid_is_block(const std::vector<GridVector>& seq) {
    Index prev_max = 0;
    for (const auto& x : seq) {
        if (x.empty()) return false;
        if (x.min_index() <= prev_max) return false;
        prev_max = x.max_index();
    }
    return true;
}

} // namespace tsnorm

#include "tsnorm/generators.hpp"

#include <algorithm>
#include <cmath>

#include "tsnorm/kraft.hpp"

namespace tsnorm {

SparseVector random_sparse(SplitMix64& rng, const Params& params, int max_support) {
    int n = static_cast<int>(rng.range(1, max_support));
    SparseVector x;
    Index idx = 0;
    for (int j = 0; j < n; ++j) {
        idx += rng.range(1, 3);
        double v;
        if (rng.below(2) == 0) {
            v = 2.0 * rng.uniform01_pos() - 1.0;
            if (v == 0.0) v = 0.5;
        } else {
            long long e = rng.range(0, 6);
            v = std::pow(params.t, -static_cast<double>(e));
            if (rng.below(2)) v = -v;
        }
        x.set(idx, v);
    }
    return x;
}

namespace {

// Kraft-feasible level draws: at each step sample a level no shallower than
// the exact remaining budget admits.
GridVector random_kraft_levels(SplitMix64& rng, const Params& params, GridBase base,
                               int max_support, long long max_level) {
    int n = static_cast<int>(rng.range(1, max_support));
    KraftSum kraft(params.r);
    GridVector out(base);
    Index idx = 0;
    for (int j = 0; j < n; ++j) {
        long long lo = 1;
        // find the shallowest level that still fits: r^(-lo) <= 1 - sum
        while (lo <= max_level) {
            KraftSum probe = kraft;
            probe.add(lo);
            if (!probe.exceeds_one()) break;
            ++lo;
        }
        if (lo > max_level) break;
        long long level = rng.range(lo, max_level);
        kraft.add(level);
        idx += rng.range(1, 3);
        out.set(idx, rng.below(2) ? 1 : -1, -level);
    }
    if (out.empty()) out.set(1, 1, -1);
    return out;
}

} // namespace

GridVector random_dual_member(SplitMix64& rng, const Params& params, int max_support,
                              long long max_level) {
    if (rng.below(16) == 0) {
        GridVector unit(GridBase::T);
        unit.set(rng.range(1, 2 * max_support), rng.below(2) ? 1 : -1, 0);
        return unit;
    }
    return random_kraft_levels(rng, params, GridBase::T, max_support, max_level);
}

GridVector random_dual_nonmember(SplitMix64& rng, const Params& params,
                                 int max_support, long long max_level) {
    GridVector out = random_kraft_levels(rng, params, GridBase::T, max_support, max_level);
    // push the exact sum above 1 with a shallow extra coordinate
    Index beyond = out.max_index() + 1 + rng.range(0, 3);
    out.set(beyond, rng.below(2) ? 1 : -1, rng.below(4) == 0 ? 0 : -1);
    KraftSum kraft(params.r);
    for (const auto& [i, ge] : out.entries()) kraft.add(-ge.exponent);
    if (!kraft.exceeds_one()) out.set(beyond + 1, 1, 0);
    return out;
}

GridVector random_s_member(SplitMix64& rng, const Params& params, int max_support,
                           long long max_level) {
    return random_kraft_levels(rng, params, GridBase::S, max_support, max_level);
}

GridVector random_s_vector(SplitMix64& rng, const Params& params, int max_support,
                           long long max_level) {
    int n = static_cast<int>(rng.range(1, max_support));
    GridVector out(GridBase::S);
    double mass = 0.0;
    Index idx = 0;
    for (int j = 0; j < n; ++j) {
        long long level = rng.range(-1, max_level);
        double add = std::pow(static_cast<double>(params.r),
                              -static_cast<double>(level));
        if (mass + add > 0.98 * params.r) continue;
        mass += add;
        idx += rng.range(1, 3);
        out.set(idx, rng.below(2) ? 1 : -1, -level);
    }
    if (out.empty()) out.set(1, 1, -1);
    return out;
}

ExponentSeq random_weight_feasible_seq(SplitMix64& rng, const Params& params,
                                       int max_len, long long max_entry) {
    int len = static_cast<int>(rng.range(1, max_len));
    // entries at least ceil(log_r(2*len - 2)) keep the weight below 1
    long long floor_entry = 1;
    if (len >= 2) {
        double need = std::log(2.0 * len - 2.0) / std::log(static_cast<double>(params.r));
        floor_entry = std::max<long long>(1, static_cast<long long>(std::ceil(need - 1e-12)));
    }
    if (floor_entry > max_entry) {
        len = 1;
        floor_entry = 1;
    }
    ExponentSeq m;
    for (int i = 0; i < len; ++i) m.values.push_back(rng.range(floor_entry, max_entry));
    if (phi_exact(m, params.r).compare(PowerSum::one(params.r)) > 0)
        fail("internal", "weight sampler produced an infeasible sequence");
    return m;
}

BlockSequence balanced_block_inputs(const Params& params, std::size_t count) {
    // Per residue m: coordinates at exponent m - 4M, counts tuned so each
    // residue mass sits near 0.75 * alpha^p / M times alpha^(-2p). That keeps
    // the total inside [alpha^(-2p), alpha^(-p)] and every residue well above
    // alpha^(-3p), which the per-average conclusion needs.
    const double target = 0.75 * std::pow(params.alpha, params.p) / params.M *
                          std::pow(params.alpha, -2.0 * params.p);
    std::vector<std::pair<long long, long long>> pattern; // (exponent, count)
    for (int m = 0; m < params.M; ++m) {
        long long e = static_cast<long long>(m) - 4LL * params.M;
        double unit = std::pow(params.alpha, params.p * static_cast<double>(e));
        long long c = std::max<long long>(1, static_cast<long long>(std::ceil(target / unit - 1e-9)));
        pattern.emplace_back(e, c);
    }
    long long width = 0;
    for (const auto& [e, c] : pattern) width += c;

    BlockSequence seq;
    seq.vectors.reserve(count);
    Index base_index = 1;
    for (std::size_t n = 0; n < count; ++n) {
        GridVector x(GridBase::Alpha);
        Index idx = base_index;
        for (const auto& [e, c] : pattern)
            for (long long j = 0; j < c; ++j) x.set(idx++, 1, e);
        base_index += width + 1;
        seq.vectors.push_back(std::move(x));
    }

    // hypothesis check: alpha^(-2) <= ||x||_p <= alpha^(-1)
    if (!seq.vectors.empty()) {
        double norm = std::pow(seq.vectors.front().power_mass(params.p, params),
                               1.0 / params.p);
        double lo = std::pow(params.alpha, -2.0);
        double hi = std::pow(params.alpha, -1.0);
        if (norm < lo * (1 - 1e-9) || norm > hi * (1 + 1e-9))
            fail("internal", "balanced pattern misses the norm window");
    }
    return seq;
}

} // namespace tsnorm

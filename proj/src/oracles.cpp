#include "tsnorm/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "tsnorm/enumerate.hpp"

namespace tsnorm {

OracleResult classical_norm_oracle(const SparseVector& x, const Params& params,
                                   int depth, double tol) {
    (void)tol;
    if (x.support_size() > 8)
        fail("oversized_support", "classical oracle supports at most 8 coordinates");
    if (depth < 1 || depth > 15) fail("bad_depth", "oracle depth must be in [1, 15]");
    OracleResult out;
    if (x.empty()) return out;

    std::vector<double> abs_by_rank;
    abs_by_rank.reserve(x.support_size());
    double l1 = 0.0;
    for (const auto& [i, v] : x.entries()) {
        abs_by_rank.push_back(std::fabs(v));
        l1 += std::fabs(v);
    }
    out.value = best_successive_pairing(abs_by_rank, params.r, depth, params.t);
    out.slack = l1 * std::pow(params.t, -static_cast<double>(depth));
    return out;
}

OracleResult modified_norm_oracle(const SparseVector& x, const Params& params,
                                  int depth) {
    const std::size_t n = x.support_size();
    if (n > 6)
        fail("oversized_support", "modified oracle supports at most 6 coordinates");
    if (depth < 1 || depth > 512) fail("bad_depth", "oracle depth must be in [1, 512]");
    OracleResult out;
    if (x.empty()) return out;

    std::vector<double> a;
    a.reserve(n);
    double l1 = 0.0;
    for (const auto& [i, v] : x.entries()) {
        a.push_back(std::fabs(v));
        l1 += std::fabs(v);
    }

    const std::size_t full = (static_cast<std::size_t>(1) << n) - 1;
    std::vector<double> sup(full + 1, 0.0);
    for (std::size_t mask = 1; mask <= full; ++mask) {
        std::size_t low = mask & (~mask + 1);
        std::size_t bit = 0;
        while ((static_cast<std::size_t>(1) << bit) != low) ++bit;
        sup[mask] = std::max(sup[mask ^ low], a[bit]);
    }

    const double t_inv = 1.0 / params.t;
    std::vector<double> value = sup; // depth 0
    std::vector<double> next(full + 1, 0.0);
    std::vector<double> parts(full + 1, 0.0);

    for (int d = 1; d <= depth; ++d) {
        // parts[mask] after l rounds = best sum of value over partitions of
        // mask into at most l nonempty blocks; the lowest bit anchors the
        // block containing it, which rules out permuted duplicates.
        for (std::size_t mask = 0; mask <= full; ++mask) parts[mask] = value[mask];
        for (int l = 2; l <= params.r; ++l) {
            for (std::size_t mask = full; mask >= 1; --mask) {
                std::size_t low = mask & (~mask + 1);
                std::size_t rest = mask ^ low;
                // iterate subsets S of rest; block = low | S
                std::size_t sub = rest;
                while (true) {
                    std::size_t block = low | sub;
                    std::size_t remainder = mask ^ block;
                    if (remainder != 0) {
                        double cand = value[block] + parts[remainder];
                        if (cand > parts[mask]) parts[mask] = cand;
                    }
                    if (sub == 0) break;
                    sub = (sub - 1) & rest;
                }
            }
        }
        for (std::size_t mask = 1; mask <= full; ++mask)
            next[mask] = std::max(sup[mask], t_inv * parts[mask]);
        next[0] = 0.0;
        std::swap(value, next);
    }

    out.value = value[full];
    out.slack = l1 * std::pow(params.t, -static_cast<double>(depth));
    return out;
}

} // namespace tsnorm

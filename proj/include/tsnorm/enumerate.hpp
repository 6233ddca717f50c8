#pragma once

#include <cstdint>
#include <vector>

namespace tsnorm {

/// Exponent tuples over ranks 1..k that a nested consecutive-interval
/// splitting with fan-out <= r and tree depth <= depth can realize. Tuples
/// are stored flat with stride k; depths[k][j] is the minimal tree depth of
/// tuple j. Width-1 includes the bare unit pattern {0}; root rescale chains
/// are not materialized here (shifting a tuple by +c realizes them).
struct DensePatterns {
    int max_width = 0;
    int r = 0;
    int depth = 0;
    std::vector<std::vector<std::uint8_t>> flat;       // [k] -> patterns, stride k
    std::vector<std::vector<std::uint8_t>> depths;     // [k] -> per-pattern depth
    std::vector<std::vector<std::uint8_t>> root_flags; // 1 when realizable unshifted

    std::size_t count(int k) const {
        return flat[static_cast<std::size_t>(k)].size() / static_cast<std::size_t>(k);
    }
};

/// Builds (and caches) the dense pattern family. depth <= 15, max_width <= 8.
const DensePatterns& successive_patterns(int max_width, int r, int depth);

/// max over successive-mode norming functionals of depth <= depth of
/// sum_i values[i] * t^(-exponent_i). `values` must be nonnegative, listed by
/// support rank; size <= 8.
double best_successive_pairing(const std::vector<double>& values, int r,
                               int depth, double t);

/// Order-preserving k-subsets of {0..n-1}, flat with stride k.
const std::vector<std::uint8_t>& rank_subsets(int n, int k);

} // namespace tsnorm

#pragma once

#include <map>

#include "tsnorm/params.hpp"
#include "tsnorm/sparse_vector.hpp"

namespace tsnorm {

/// Optimizer witness: levels for the used coordinates (unlisted = unused).
/// The induced functional y(i) = sign(x(i)) * t^(-level(i)) satisfies the
/// Kraft constraint sum r^(-level(i)) <= 1 and pairs with x to `value`.
struct LevelAssignment {
    std::map<Index, long long> levels;
    double value = 0.0;
    double slack = 0.0;
};

struct ModifiedResult {
    double value = 0.0;
    LevelAssignment witness;
    double slack = 0.0;
};

/// Disjoint-mode norm: the maximum of sum |x(i)| * t^(-j(i)) over integer
/// level assignments with sum r^(-j(i)) <= 1.
///
/// Solved exactly by dynamic programming over (coordinate, residual budget):
/// coordinates are sorted by |x(i)| descending, levels are nondecreasing along
/// that order, and the residual Kraft budget -- an exact integer count of
/// r^(-level) units -- can be capped at the number of unassigned coordinates
/// without changing the optimum. `tol` only bounds the reported slack; the
/// returned value is the supremum up to double rounding (slack 0).
ModifiedResult modified_norm(const SparseVector& x, const Params& params,
                             double tol = 1e-9);

} // namespace tsnorm

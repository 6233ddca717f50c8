#pragma once

#include <vector>

#include "tsnorm/params.hpp"
#include "tsnorm/sparse_vector.hpp"

namespace tsnorm {

/// Witness tree for the successive-mode norm. A leaf pins the coordinate that
/// realizes the sup-norm of its interval; an internal node splits its interval
/// into 2..r consecutive nonempty pieces and carries t^(-1) times the sum of
/// child values.
struct SplitTree {
    Index lo = 0, hi = 0;   // interval of original indices covered
    double value = 0.0;
    Index leaf_index = 0;   // set iff children.empty()
    std::vector<SplitTree> children;

    bool is_leaf() const { return children.empty(); }
};

struct ClassicalResult {
    double value = 0.0;
    SplitTree witness; // lo == 0 for the empty vector
};

/// Successive-mode norm of a finite-support vector, computed by dynamic
/// programming over consecutive intervals of the ordered support. The value
/// solves N(I) = max(sup-norm over I, t^(-1) * best sum of N over 2..r
/// consecutive nonempty pieces of I); only the coefficient magnitudes matter.
/// Tie-break: fewest pieces, then leftmost first breakpoint.
ClassicalResult classical_norm(const SparseVector& x, const Params& params);

/// Re-evaluates a witness bottom-up against x; returns the root value.
double evaluate_split_tree(const SplitTree& node, const SparseVector& x,
                           const Params& params);

} // namespace tsnorm

#pragma once

#include "tsnorm/params.hpp"
#include "tsnorm/sparse_vector.hpp"

namespace tsnorm {

struct OracleResult {
    double value = 0.0;
    double slack = 0.0; // worst-case gap to the true supremum
};

/// Brute-force dual bound for the successive-mode norm: enumerates every
/// norming functional over supp x generated by at most `depth` closure
/// applications and returns the best pairing. The reported slack
/// ||x||_1 * t^(-depth) bounds the truncation error. Independent of the
/// dynamic program in classical_norm. Supports larger than 8 are rejected.
OracleResult classical_norm_oracle(const SparseVector& x, const Params& params,
                                   int depth, double tol = 1e-9);

/// Depth-truncated recursion for the disjoint-mode norm: value_0 = sup-norm,
/// value_{d+1} = max(sup-norm, t^(-1) * best sum of value_d over partitions of
/// the support into at most r disjoint nonempty pieces). Independent of the
/// level-assignment optimizer. Supports larger than 6 are rejected.
OracleResult modified_norm_oracle(const SparseVector& x, const Params& params,
                                  int depth);

} // namespace tsnorm

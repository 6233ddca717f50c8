#pragma once

#include "tsnorm/certificates.hpp"
#include "tsnorm/grid_vector.hpp"
#include "tsnorm/params.hpp"
#include "tsnorm/rng.hpp"
#include "tsnorm/sparse_vector.hpp"
#include "tsnorm/stabilization.hpp"

namespace tsnorm {

/// Seeded input builders shared by the self-test suites and the acceptance
/// harness. Every function is a pure function of the generator state.

/// Random vector with support <= max_support; coefficients mix uniform draws
/// in (-1, 1) with exact grid magnitudes +-t^(-j).
SparseVector random_sparse(SplitMix64& rng, const Params& params, int max_support);

/// Random base-t member of the dual norming set (Kraft sum <= 1), support and
/// levels capped. Signs are random.
GridVector random_dual_member(SplitMix64& rng, const Params& params, int max_support,
                              long long max_level);

/// Random base-t non-member: exact Kraft sum > 1.
GridVector random_dual_nonmember(SplitMix64& rng, const Params& params,
                                 int max_support, long long max_level);

/// Random base-s vector with p-mass <= 1 (same Kraft structure as above).
GridVector random_s_member(SplitMix64& rng, const Params& params, int max_support,
                           long long max_level);

/// Random base-s vector with p-mass <= r (exponents may reach -1).
GridVector random_s_vector(SplitMix64& rng, const Params& params, int max_support,
                           long long max_level);

/// Random exponent sequence with weight at most 1 (exact), entries in
/// [1, max_entry], length in [1, max_len].
ExponentSeq random_weight_feasible_seq(SplitMix64& rng, const Params& params,
                                       int max_len, long long max_entry);

/// Block sequence of shifted copies of a two-level pattern whose per-residue
/// masses sit comfortably inside the averaging hypothesis.
BlockSequence balanced_block_inputs(const Params& params, std::size_t count);

} // namespace tsnorm

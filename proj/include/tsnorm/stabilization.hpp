#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tsnorm/grid_vector.hpp"
#include "tsnorm/modified_norm.hpp"
#include "tsnorm/params.hpp"

namespace tsnorm {

/// Block sequence of base-alpha grid vectors (strictly increasing supports).
struct BlockSequence {
    std::vector<GridVector> vectors;
};

struct ComparisonWitness {
    bool holds = false;
    GridVector dual_witness{GridBase::T};
    double pairing = 0.0;        // exact-exponent evaluation of <x, y>
    double modified_value = 0.0; // disjoint-mode norm of x
};

/// For x in the base-s grid with p-mass <= 1: builds the dual vector with the
/// same exponents over base t, whose pairing with x equals ||x||_p^p, and
/// checks ||x||_p^p <= |x| against the optimizer (1e-9 slack).
ComparisonWitness check_comparing1(const GridVector& x, const Params& params);

/// For any base-s grid vector: checks |x| <= 1 + ||x||_p^p / t (1e-9 slack).
bool check_comparing2(const GridVector& x, const Params& params);

/// Per-input level-mass profile and the derived targets of one averaging run.
struct LevelProfile {
    std::vector<double> targets;            // b_m, maxima over the selected bin
    std::vector<std::vector<double>> c;     // c[k][m], scaled targets
    double eps = 0.0;
    int l = 0;                              // scale index: least l with r^l >= 1/eps
    std::vector<long long> block_lengths;   // inputs consumed per average
    std::size_t selected = 0;               // size of the chosen profile bin
};

struct AveragingResult {
    std::vector<std::vector<GridVector>> averages; // [output][k]
    std::vector<GridVector> sums;                  // per-output sum over k
    LevelProfile profile;
};

/// Inputs consumed per constructed output vector.
std::size_t averaging_required_count(const Params& params, double eps);

/// The averaging construction: bins inputs by level-mass profile (width eps,
/// first-largest bin), consumes block_lengths[k] vectors per average y_k, and
/// checks the level-mass conclusion alpha^(-3) <= ||J_m .||_p <= 1. The bound
/// is always enforced on the per-output sums; `per_average` additionally
/// enforces it on every y_k, which requires inputs populating every level
/// residue. Inputs must satisfy alpha^(-2) <= ||x_n||_p <= alpha^(-1).
AveragingResult approxim_construct(const BlockSequence& inputs, double eps,
                                   const Params& params, int n_out,
                                   bool per_average);

struct StabOptions {
    double tol = 1e-9;
    std::size_t classical_cap = 256; // skip the successive-mode norm above this
};

struct StabTrial {
    std::vector<double> coeffs;      // normalized, sum a^p = 1
    std::vector<long long> k_levels; // coefficient quantization exponents
    double lp = 0.0;
    double modified = 0.0;
    std::optional<double> classical; // only when support <= classical_cap
    double rho = 0.0;                // (log2 r)^(1/p) * modified / lp
    bool grid_mass_ok = false;       // alpha^(-4) <= ||J_m x_grid||_p <= 1
    bool stab_lower_ok = false;      // alpha^(-4p) lp <= M^(1/p) modified
    bool stab_upper_ok = false;      // M^(1/p) modified <= 6(p+q) alpha^4 lp
};

/// Checks the two-sided estimate for one coefficient vector over a sequence
/// satisfying alpha^(-3) <= ||J_m seq_n||_p <= 1 (violations name the
/// offending (n, m)). Coefficients are normalized to sum a^p = 1; zeros are
/// rejected.
StabTrial stab_verify(const std::vector<GridVector>& seq, std::vector<double> coeffs,
                      const Params& params, const StabOptions& opts = {});

struct StabReport {
    Params params;
    std::uint64_t seed = 0;
    int trials = 0;
    double eps = 0.0;
    int n_vectors = 0;
    std::size_t support_budget = 0;
    std::size_t total_support = 0;
    std::string basis_kind;
    std::vector<StabTrial> rows;
    double min_rho = 0.0;
    double max_rho = 0.0;
    double lambda_hat = 0.0; // max_rho / min_rho
    // envelopes (recomputed from params at serialization time as well)
    double rho_lower_bound = 0.0;  // 4^-6
    double rho_upper_bound = 0.0;  // 3 * 4^7 * (p+q)
    double lambda_bound = 0.0;     // 3 * 4^13 * (p+q)
    double chain_lower = 0.0;      // alpha^(-4p-2), looser intermediate bound
    double chain_upper = 0.0;      // 6 (p+q) alpha^6
};

struct PipelineOptions {
    double eps = 0.01;
    int n_vectors = 4;              // outputs fed to the coefficient draws
    std::size_t support_budget = 2000;
    StabOptions stab;
};

/// Full experiment: normalizes the basis to ||u_n||_p = alpha^(-3/2),
/// quantizes to the alpha grid (half-step rule), runs the averaging
/// construction in sum mode, then draws `trials` coefficient vectors
/// (a_n = g_n^(1/p) normalized, g uniform) from the seeded generator and
/// verifies every trial. Deterministic for a fixed seed.
StabReport stabilization_pipeline(const std::vector<SparseVector>& basis,
                                  const Params& params, int trials,
                                  std::uint64_t seed, const PipelineOptions& opts = {});

/// e_1 .. e_count (the unit basis) or seeded random positive block vectors.
std::vector<SparseVector> unit_basis(std::size_t count);
std::vector<SparseVector> random_block_basis(std::uint64_t seed, std::size_t count,
                                             int max_width);

/// Inputs consumed by one pipeline output vector, before binning losses.
std::size_t pipeline_required_count(const Params& params, const PipelineOptions& opts);

} // namespace tsnorm

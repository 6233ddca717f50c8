#pragma once

namespace tsnorm {

/// Parameter bundle shared by every norm and certificate routine.
///
/// All derived quantities are pinned by the identities
///   1/p + 1/q = 1,   t^q = r,   s^p = r,   t*s = r,   alpha^M = s,
/// with M = floor(log2 r), so 2^(1/p) <= alpha <= 4^(1/p).
struct Params {
    double p{};     // primal exponent, 1 < p < inf
    double q{};     // conjugate exponent, 1/p + 1/q = 1
    int r{};        // branching factor, r >= 2
    double t{};     // r^(1/q)
    double s{};     // r^(1/p)
    double alpha{}; // grid base, r^(1/(p*M))
    int M{};        // floor(log2 r), M >= 1
};

/// Derives the full bundle from (p, r). Rejects p <= 1, non-finite p, r < 2.
Params derive_params(double p, int r);

/// Checks every derived identity at 1e-12 relative tolerance.
/// Throws Error("bad_params", ...) on violation.
void check_params(const Params& params);

} // namespace tsnorm

#include "tsnorm/params.hpp"

#include <cmath>
#include <string>

#include "tsnorm/error.hpp"

namespace tsnorm {

namespace {

bool close_rel(double a, double b, double tol = 1e-12) {
    double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
    return std::fabs(a - b) <= tol * scale;
}

} // namespace

Params derive_params(double p, int r) {
    if (!std::isfinite(p) || p <= 1.0)
        fail("bad_params", "p must be finite and > 1, got " + std::to_string(p));
    if (r < 2)
        fail("bad_params", "r must be an integer >= 2, got " + std::to_string(r));

    Params params;
    params.p = p;
    params.q = p / (p - 1.0);
    params.r = r;
    params.t = std::pow(static_cast<double>(r), 1.0 / params.q);
    params.s = std::pow(static_cast<double>(r), 1.0 / p);

    // Largest M with 2^M <= r; integer arithmetic so powers of two are exact.
    int M = 0;
    for (long long pw = 1; pw * 2 <= r; pw *= 2) ++M;
    params.M = M;
    params.alpha = std::pow(static_cast<double>(r), 1.0 / (p * M));

    check_params(params);
    return params;
}

void check_params(const Params& params) {
    if (params.r < 2) fail("bad_params", "r < 2");
    if (params.M < 1) fail("bad_params", "M < 1");
    if (!close_rel(1.0 / params.p + 1.0 / params.q, 1.0))
        fail("bad_params", "conjugate identity 1/p + 1/q = 1 violated");
    if (!close_rel(std::pow(params.t, params.q), params.r))
        fail("bad_params", "t^q = r violated");
    if (!close_rel(std::pow(params.s, params.p), params.r))
        fail("bad_params", "s^p = r violated");
    if (!close_rel(params.t * params.s, params.r))
        fail("bad_params", "t*s = r violated");
    if (!close_rel(std::pow(params.alpha, params.M), params.s))
        fail("bad_params", "alpha^M = s violated");
    double lo = std::pow(2.0, 1.0 / params.p);
    double hi = std::pow(4.0, 1.0 / params.p);
    if (params.alpha < lo * (1.0 - 1e-12) || params.alpha > hi * (1.0 + 1e-12))
        fail("bad_params", "alpha outside [2^(1/p), 4^(1/p)]");
}

} // namespace tsnorm

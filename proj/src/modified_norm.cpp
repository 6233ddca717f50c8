#include "tsnorm/modified_norm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace tsnorm {

namespace {

// Column widths: at row i (0-based, coordinates i..n-1 left), budgets are
// capped at rem = n - i, so the table is triangular.
std::size_t tri_offset(int n, int i) {
    // sum over rows 0..i-1 of (n - row + 1)
    auto nn = static_cast<std::size_t>(n);
    auto ii = static_cast<std::size_t>(i);
    return ii * (nn + 1) - ii * (ii - 1) / 2;
}

} // namespace

ModifiedResult modified_norm(const SparseVector& x, const Params& params,
                             double tol) {
    (void)tol;
    ModifiedResult out;
    out.slack = 0.0;
    out.witness.slack = 0.0;
    if (x.empty()) return out;
    if (x.support_size() > 8192)
        fail("oversized_support", "level-assignment DP is capped at 8192 coordinates");

    const int n = static_cast<int>(x.support_size());
    const int r = params.r;

    // Sort by magnitude descending, ties by index, so equal multisets of
    // coefficients produce identical optimizer output.
    std::vector<std::pair<double, Index>> coords;
    coords.reserve(x.support_size());
    for (const auto& [i, v] : x.entries()) coords.emplace_back(std::fabs(v), i);
    std::sort(coords.begin(), coords.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });

    std::vector<double> c(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) c[static_cast<std::size_t>(i)] = coords[static_cast<std::size_t>(i)].first;
    std::vector<double> suffix(static_cast<std::size_t>(n) + 1, 0.0);
    for (int i = n - 1; i >= 0; --i)
        suffix[static_cast<std::size_t>(i)] = suffix[static_cast<std::size_t>(i) + 1] + c[static_cast<std::size_t>(i)];

    // delta never exceeds log_r(n) + 1: once the scaled budget covers every
    // remaining coordinate, deeper levels only shrink the value.
    int delta_max = 1;
    for (long long pw = r; pw < n + 1; pw *= r) ++delta_max;
    std::vector<double> t_neg(static_cast<std::size_t>(delta_max) + 2, 1.0);
    for (std::size_t d = 1; d < t_neg.size(); ++d) t_neg[d] = t_neg[d - 1] / params.t;

    // choice[tri_offset(i) + u] = chosen delta for state (i, u).
    std::vector<std::uint8_t> choice(tri_offset(n, n), 0);
    std::vector<double> row_next(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<double> row_cur(static_cast<std::size_t>(n) + 1, 0.0);

    // Row n: no coordinates left, value 0 for any budget.
    for (int i = n - 1; i >= 0; --i) {
        const int rem = n - i;
        const std::size_t base = tri_offset(n, i);
        row_cur[0] = 0.0;
        for (int u = 1; u <= rem; ++u) {
            if (u == rem) {
                // Enough budget for every remaining coordinate at the current
                // level, which dominates any deeper assignment.
                row_cur[static_cast<std::size_t>(u)] = suffix[static_cast<std::size_t>(i)];
                choice[base + static_cast<std::size_t>(u)] = 0;
                continue;
            }
            double best = 0.0;
            std::uint8_t best_delta = 0;
            long long scaled = u;
            for (int delta = 0;; ++delta) {
                long long next_raw = scaled - 1;
                bool capped = next_raw >= rem - 1;
                long long next_u = capped ? rem - 1 : next_raw;
                double val = t_neg[static_cast<std::size_t>(delta)] *
                             (c[static_cast<std::size_t>(i)] + row_next[static_cast<std::size_t>(next_u)]);
                if (val > best) {
                    best = val;
                    best_delta = static_cast<std::uint8_t>(delta);
                }
                if (capped) break;
                scaled *= r;
            }
            row_cur[static_cast<std::size_t>(u)] = best;
            choice[base + static_cast<std::size_t>(u)] = best_delta;
        }
        std::swap(row_cur, row_next);
    }

    out.value = row_next[1];
    out.witness.value = out.value;

    // Trace the assignment: start with one unit of budget at level 0.
    long long level = 0;
    long long u = 1;
    for (int i = 0; i < n; ++i) {
        const int rem = n - i;
        if (u <= 0) break; // remaining coordinates stay unused
        if (u >= rem) {
            for (int k = i; k < n; ++k)
                out.witness.levels[coords[static_cast<std::size_t>(k)].second] = level;
            break;
        }
        int delta = choice[tri_offset(n, i) + static_cast<std::size_t>(u)];
        level += delta;
        for (int d = 0; d < delta; ++d) u *= r;
        u -= 1;
        if (u > rem - 1) u = rem - 1;
        out.witness.levels[coords[static_cast<std::size_t>(i)].second] = level;
    }
    return out;
}

} // namespace tsnorm

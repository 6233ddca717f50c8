#include "tsnorm/classical_norm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace tsnorm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// DP state shared between the fill and the witness reconstruction.
struct Tables {
    int n = 0;
    int r = 0;
    double t_inv = 0.0;
    std::vector<double> a;            // |x| by support rank
    std::vector<Index> idx;           // rank -> original index
    std::vector<double> norm;         // norm[i*n+k] = N(i..k), i <= k
    std::vector<int> argmax;          // rank of the largest |x| in (i..k)
    std::vector<std::uint8_t> best_l; // 0 = sup branch wins, else piece count

    double Nv(int i, int k) const { return norm[static_cast<std::size_t>(i) * n + k]; }
};

void fill_tables(Tables& tb) {
    const int n = tb.n;
    const int r = tb.r;
    tb.norm.assign(static_cast<std::size_t>(n) * n, 0.0);
    tb.argmax.assign(static_cast<std::size_t>(n) * n, 0);
    tb.best_l.assign(static_cast<std::size_t>(n) * n, 0);

    // W[l][i] = best sum over partitions of (i..k) into exactly l pieces, for
    // the k of the current outer iteration. Pieces are proper subintervals, so
    // every norm they reference is already final.
    std::vector<std::vector<double>> W(static_cast<std::size_t>(r) + 1,
                                       std::vector<double>(static_cast<std::size_t>(n), kNegInf));
    std::vector<double> col_max(static_cast<std::size_t>(n), 0.0);
    std::vector<int> col_arg(static_cast<std::size_t>(n), 0);

    for (int k = 0; k < n; ++k) {
        for (int i = k; i >= 0; --i) {
            if (i == k) {
                col_max[i] = tb.a[i];
                col_arg[i] = i;
            } else if (tb.a[k] > col_max[i]) {
                // col_max[i] held the maximum over (i..k-1)
                col_max[i] = tb.a[k];
                col_arg[i] = k;
            }
            for (int l = 2; l <= r; ++l) W[l][i] = kNegInf;

            double best_split = kNegInf;
            std::uint8_t best_l = 0;
            if (i < k) {
                for (int l = 2; l <= std::min(r, k - i + 1); ++l) {
                    double best = kNegInf;
                    for (int m = i; m < k; ++m) {
                        double rest = W[l - 1][m + 1];
                        if (rest == kNegInf) continue;
                        double cand = tb.Nv(i, m) + rest;
                        if (cand > best) best = cand;
                    }
                    W[l][i] = best;
                    if (best > best_split) {
                        best_split = best;
                        best_l = static_cast<std::uint8_t>(l);
                    }
                }
            }

            double sup = col_max[i];
            double split_val = best_split == kNegInf ? kNegInf : tb.t_inv * best_split;
            std::size_t at = static_cast<std::size_t>(i) * n + k;
            if (split_val > sup) {
                tb.norm[at] = split_val;
                tb.best_l[at] = best_l;
            } else {
                tb.norm[at] = sup;
                tb.best_l[at] = 0;
            }
            tb.argmax[at] = col_arg[i];
            W[1][i] = tb.norm[at];
        }
    }
}

// Replays the partition recurrence for one interval on the final value table
// and returns the leftmost optimal cut sequence for `parts` pieces. The
// replay reads the same inputs the fill pass read, so it reproduces the same
// doubles and the same tie-breaks.
std::vector<int> rebuild_cuts(const Tables& tb, int i, int k, int parts) {
    std::vector<std::vector<double>> W(
        static_cast<std::size_t>(parts) + 1,
        std::vector<double>(static_cast<std::size_t>(k - i + 1), kNegInf));
    std::vector<std::vector<int>> cut(
        static_cast<std::size_t>(parts) + 1,
        std::vector<int>(static_cast<std::size_t>(k - i + 1), -1));
    for (int a = k; a >= i; --a) {
        W[1][a - i] = tb.Nv(a, k);
        for (int l = 2; l <= parts && l <= k - a + 1; ++l) {
            double best = kNegInf;
            int best_m = -1;
            for (int m = a; m < k; ++m) {
                double rest = W[l - 1][m + 1 - i];
                if (rest == kNegInf) continue;
                double cand = tb.Nv(a, m) + rest;
                if (cand > best) {
                    best = cand;
                    best_m = m;
                }
            }
            W[l][a - i] = best;
            cut[l][a - i] = best_m;
        }
    }
    std::vector<int> cuts;
    int left = i;
    for (int l = parts; l >= 2; --l) {
        int m = cut[l][left - i];
        cuts.push_back(m);
        left = m + 1;
    }
    return cuts;
}

SplitTree build_witness(const Tables& tb, int i, int k) {
    const int n = tb.n;
    std::size_t at = static_cast<std::size_t>(i) * n + k;
    SplitTree node;
    node.lo = tb.idx[static_cast<std::size_t>(i)];
    node.hi = tb.idx[static_cast<std::size_t>(k)];
    node.value = tb.norm[at];
    int l = tb.best_l[at];
    if (l == 0) {
        int arg = tb.argmax[at];
        node.leaf_index = tb.idx[static_cast<std::size_t>(arg)];
        node.lo = node.hi = node.leaf_index;
        return node;
    }
    std::vector<int> cuts = rebuild_cuts(tb, i, k, l);
    int left = i;
    for (int m : cuts) {
        node.children.push_back(build_witness(tb, left, m));
        left = m + 1;
    }
    node.children.push_back(build_witness(tb, left, k));
    return node;
}

} // namespace

ClassicalResult classical_norm(const SparseVector& x, const Params& params) {
    ClassicalResult out;
    if (x.empty()) return out;
    if (x.support_size() > 4096)
        fail("oversized_support", "successive-mode DP is capped at 4096 coordinates");

    Tables tb;
    tb.n = static_cast<int>(x.support_size());
    tb.r = params.r;
    tb.t_inv = 1.0 / params.t;
    tb.a.reserve(tb.n);
    tb.idx.reserve(tb.n);
    for (const auto& [i, v] : x.entries()) {
        tb.idx.push_back(i);
        tb.a.push_back(std::fabs(v));
    }
    fill_tables(tb);

    out.value = tb.Nv(0, tb.n - 1);
    out.witness = build_witness(tb, 0, tb.n - 1);
    return out;
}

double evaluate_split_tree(const SplitTree& node, const SparseVector& x,
                           const Params& params) {
    if (node.is_leaf()) return std::fabs(x.at(node.leaf_index));
    double sum = 0.0;
    for (const auto& child : node.children) sum += evaluate_split_tree(child, x, params);
    double sup = 0.0;
    for (const auto& [i, v] : x.entries())
        if (i >= node.lo && i <= node.hi) sup = std::max(sup, std::fabs(v));
    return std::max(sup, sum / params.t);
}

} // namespace tsnorm

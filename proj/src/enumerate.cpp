#include "tsnorm/enumerate.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "tsnorm/certificates.hpp"
#include "tsnorm/error.hpp"

namespace tsnorm {

namespace {

std::uint64_t pack_pattern(const std::uint8_t* e, int k) {
    std::uint64_t key = 0;
    std::memcpy(&key, e, static_cast<std::size_t>(k));
    return key;
}

struct PatternBuilder {
    int max_width;
    int r;
    int depth;
    // per width: pattern key -> minimal tree depth (shifts included)
    std::vector<std::unordered_map<std::uint64_t, std::uint8_t>> family;
    // per width: keys realizable without a root rescale chain
    std::vector<std::unordered_set<std::uint64_t>> roots;

    void note(int k, std::uint64_t key, std::uint8_t d,
              std::unordered_map<std::uint64_t, std::uint8_t>& target) {
        auto it = target.find(key);
        if (it == target.end())
            target.emplace(key, d);
        else if (d < it->second)
            it->second = d;
        if (target.size() > 8000000)
            fail("budget_exceeded",
                 "pattern enumeration exceeded its cap at width " + std::to_string(k));
    }

    void build() {
        family.resize(static_cast<std::size_t>(max_width) + 1);
        roots.resize(static_cast<std::size_t>(max_width) + 1);
        for (int c = 0; c <= depth; ++c) {
            std::uint8_t e = static_cast<std::uint8_t>(c);
            note(1, pack_pattern(&e, 1), static_cast<std::uint8_t>(c), family[1]);
        }
        {
            std::uint8_t zero = 0;
            roots[1].insert(pack_pattern(&zero, 1));
        }
        for (int k = 2; k <= max_width; ++k) {
            std::unordered_map<std::uint64_t, std::uint8_t> unshifted;
            std::vector<std::uint8_t> buf(static_cast<std::size_t>(k), 0);
            compose(k, std::min(r, k), 0, buf, 0, 0, unshifted);
            auto& fam = family[static_cast<std::size_t>(k)];
            auto& root = roots[static_cast<std::size_t>(k)];
            for (const auto& [key, d] : unshifted) {
                root.insert(key);
                std::uint8_t e[8];
                std::memcpy(e, &key, sizeof(key));
                std::uint8_t maxe = *std::max_element(e, e + k);
                for (int c = 0; d + c <= depth && maxe + c <= depth; ++c) {
                    if (c > 0)
                        for (int j = 0; j < k; ++j) ++e[j];
                    note(k, pack_pattern(e, k), static_cast<std::uint8_t>(d + c), fam);
                }
            }
        }
    }

    // Fill buf[pos..] with `parts_done`..l pieces covering `left` more ranks;
    // at least two pieces overall make a valid split.
    void compose(int left, int parts_left, int parts_done,
                 std::vector<std::uint8_t>& buf, int pos, int max_child_depth,
                 std::unordered_map<std::uint64_t, std::uint8_t>& out) {
        const int k = static_cast<int>(buf.size());
        if (left == 0) {
            if (parts_done < 2) return;
            int d = 1 + max_child_depth;
            if (d > depth) return;
            note(k, pack_pattern(buf.data(), k), static_cast<std::uint8_t>(d), out);
            return;
        }
        if (parts_left == 0) return;
        for (int w = 1; w <= left; ++w) {
            if (left - w > 0 && parts_left == 1) continue;
            for (const auto& [key, d] : family[static_cast<std::size_t>(w)]) {
                if (1 + static_cast<int>(d) > depth) continue;
                std::uint8_t e[8];
                std::memcpy(e, &key, sizeof(key));
                bool ok = true;
                for (int j = 0; j < w; ++j) {
                    int shifted = e[j] + 1;
                    if (shifted > depth) { ok = false; break; }
                    buf[static_cast<std::size_t>(pos + j)] = static_cast<std::uint8_t>(shifted);
                }
                if (!ok) continue;
                compose(left - w, parts_left - 1, parts_done + 1, buf, pos + w,
                        std::max(max_child_depth, static_cast<int>(d)), out);
            }
        }
    }
};

} // namespace

const DensePatterns& successive_patterns(int max_width, int r, int depth) {
    if (max_width < 1 || max_width > 8) fail("oversized_support", "pattern width > 8");
    if (depth < 0 || depth > 15) fail("bad_depth", "pattern depth must be in [0, 15]");
    if (r < 2) fail("bad_params", "r < 2");

    static std::mutex mu;
    static std::map<std::tuple<int, int, int>, DensePatterns> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(max_width, r, depth);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    PatternBuilder builder{max_width, r, depth, {}, {}};
    builder.build();

    DensePatterns out;
    out.max_width = max_width;
    out.r = r;
    out.depth = depth;
    out.flat.resize(static_cast<std::size_t>(max_width) + 1);
    out.depths.resize(static_cast<std::size_t>(max_width) + 1);
    out.root_flags.resize(static_cast<std::size_t>(max_width) + 1);
    for (int k = 1; k <= max_width; ++k) {
        std::vector<std::pair<std::uint64_t, std::uint8_t>> items(
            builder.family[static_cast<std::size_t>(k)].begin(),
            builder.family[static_cast<std::size_t>(k)].end());
        std::sort(items.begin(), items.end());
        auto& flat = out.flat[static_cast<std::size_t>(k)];
        auto& dep = out.depths[static_cast<std::size_t>(k)];
        auto& rf = out.root_flags[static_cast<std::size_t>(k)];
        flat.reserve(items.size() * static_cast<std::size_t>(k));
        dep.reserve(items.size());
        rf.reserve(items.size());
        for (const auto& [pk, d] : items) {
            std::uint8_t e[8];
            std::memcpy(e, &pk, sizeof(pk));
            flat.insert(flat.end(), e, e + k);
            dep.push_back(d);
            rf.push_back(builder.roots[static_cast<std::size_t>(k)].count(pk) ? 1 : 0);
        }
    }
    return cache.emplace(key, std::move(out)).first->second;
}

const std::vector<std::uint8_t>& rank_subsets(int n, int k) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::vector<std::uint8_t>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(n, k);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    std::vector<std::uint8_t> out;
    std::vector<std::uint8_t> pick(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) pick[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i);
    while (true) {
        out.insert(out.end(), pick.begin(), pick.end());
        int i = k - 1;
        while (i >= 0 && pick[static_cast<std::size_t>(i)] == n - k + i) --i;
        if (i < 0) break;
        ++pick[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j)
            pick[static_cast<std::size_t>(j)] =
                static_cast<std::uint8_t>(pick[static_cast<std::size_t>(j - 1)] + 1);
    }
    return cache.emplace(key, std::move(out)).first->second;
}

double best_successive_pairing(const std::vector<double>& values, int r,
                               int depth, double t) {
    const int n = static_cast<int>(values.size());
    if (n == 0) return 0.0;
    if (n > 8) fail("oversized_support", "pairing supports at most 8 coordinates");
    const DensePatterns& pats = successive_patterns(n, r, depth);

    std::vector<double> t_neg(static_cast<std::size_t>(depth) + 1, 1.0);
    for (std::size_t d = 1; d < t_neg.size(); ++d) t_neg[d] = t_neg[d - 1] / t;

    double best = 0.0;
    for (int k = 1; k <= n; ++k) {
        const auto& flat = pats.flat[static_cast<std::size_t>(k)];
        const auto& rf = pats.root_flags[static_cast<std::size_t>(k)];
        const std::size_t m = pats.count(k);
        const auto& subsets = rank_subsets(n, k);
        const std::size_t nsub = subsets.size() / static_cast<std::size_t>(k);
        for (std::size_t pi = 0; pi < m; ++pi) {
            // shifted copies only scale the pairing down
            if (!rf[pi]) continue;
            const std::uint8_t* e = flat.data() + pi * static_cast<std::size_t>(k);
            for (std::size_t si = 0; si < nsub; ++si) {
                const std::uint8_t* T = subsets.data() + si * static_cast<std::size_t>(k);
                double sum = 0.0;
                for (int j = 0; j < k; ++j) sum += values[T[j]] * t_neg[e[j]];
                if (sum > best) best = sum;
            }
        }
    }
    return best;
}

namespace {

// Canonical encoding of a signed member over up to 8 ranks: byte i is 0 when
// rank i is unused, else 1 + level + (sign < 0 ? 64 : 0). Levels <= 62.
std::uint64_t pack_member(const std::array<std::int8_t, 8>& sign,
                          const std::array<std::int8_t, 8>& level, int n) {
    std::uint64_t key = 0;
    for (int i = 0; i < n; ++i) {
        std::uint64_t b = 0;
        if (sign[static_cast<std::size_t>(i)] != 0)
            b = 1 + static_cast<std::uint64_t>(level[static_cast<std::size_t>(i)]) +
                (sign[static_cast<std::size_t>(i)] < 0 ? 64u : 0u);
        key |= b << (8 * i);
    }
    return key;
}

struct DisjointEnum {
    int n = 0;
    int r = 0;
    int depth = 0;
    std::size_t cap = 0;
    bool positive_only = false;
    bool truncated = false;
    std::unordered_set<std::uint64_t> seen;
    // members grouped by support mask; parallel flags mark the last frontier
    std::vector<std::vector<std::uint64_t>> by_mask;
    std::vector<std::vector<std::uint8_t>> fresh;

    bool add(std::uint64_t key, unsigned mask, std::vector<std::uint64_t>& new_keys,
             std::vector<unsigned>& new_masks) {
        if (seen.size() >= cap) {
            truncated = true;
            return false;
        }
        if (seen.insert(key).second) {
            new_keys.push_back(key);
            new_masks.push_back(mask);
        }
        return true;
    }

    static unsigned mask_of(std::uint64_t key, int n) {
        unsigned mask = 0;
        for (int i = 0; i < n; ++i)
            if ((key >> (8 * i)) & 0xffu) mask |= 1u << i;
        return mask;
    }

    void run() {
        std::vector<std::uint64_t> new_keys;
        std::vector<unsigned> new_masks;
        by_mask.assign(1u << n, {});
        fresh.assign(1u << n, {});

        for (int i = 0; i < n; ++i) {
            std::array<std::int8_t, 8> sign{}, level{};
            sign[static_cast<std::size_t>(i)] = 1;
            std::uint64_t key = pack_member(sign, level, n);
            add(key, 1u << i, new_keys, new_masks);
            if (!positive_only) {
                sign[static_cast<std::size_t>(i)] = -1;
                add(pack_member(sign, level, n), 1u << i, new_keys, new_masks);
            }
        }

        for (int round = 1; round <= depth && !truncated; ++round) {
            for (std::size_t j = 0; j < new_keys.size(); ++j) {
                by_mask[new_masks[j]].push_back(new_keys[j]);
                fresh[new_masks[j]].push_back(1);
            }
            new_keys.clear();
            new_masks.clear();

            std::vector<std::uint64_t> chosen;
            combine(0u, 0, false, 0, chosen, new_keys, new_masks);

            // downgrade frontier
            for (auto& flags : fresh) std::fill(flags.begin(), flags.end(), 0);
        }
        for (std::size_t j = 0; j < new_keys.size(); ++j)
            by_mask[new_masks[j]].push_back(new_keys[j]);
    }

    // Pick parts with pairwise disjoint masks in increasing lowest-rank order.
    // A combo of all-old parts was already formed in an earlier round, so at
    // least one part must be fresh; l = 1 realizes the pure rescale rule.
    void combine(unsigned used, int parts, bool any_fresh, int min_rank,
                 std::vector<std::uint64_t>& chosen,
                 std::vector<std::uint64_t>& new_keys, std::vector<unsigned>& new_masks) {
        if (truncated) return;
        if (parts >= 1 && any_fresh) emit(used, chosen, new_keys, new_masks);
        if (parts == r) return;
        for (int start = min_rank; start < n; ++start) {
            if (used & (1u << start)) continue;
            for (unsigned mask = 0; mask < (1u << n); ++mask) {
                if ((mask & (1u << start)) == 0) continue;
                if (mask & used) continue;
                if ((mask & ((1u << start) - 1)) != 0) continue; // lowest rank = start
                const auto& members = by_mask[mask];
                const auto& flags = fresh[mask];
                for (std::size_t j = 0; j < members.size(); ++j) {
                    chosen.push_back(members[j]);
                    combine(used | mask, parts + 1, any_fresh || flags[j] != 0,
                            start + 1, chosen, new_keys, new_masks);
                    chosen.pop_back();
                    if (truncated) return;
                }
            }
        }
    }

    void emit(unsigned used, const std::vector<std::uint64_t>& chosen,
              std::vector<std::uint64_t>& new_keys, std::vector<unsigned>& new_masks) {
        std::array<std::int8_t, 8> sign{}, level{};
        for (std::uint64_t part : chosen) {
            for (int i = 0; i < n; ++i) {
                std::uint64_t b = (part >> (8 * i)) & 0xffu;
                if (!b) continue;
                int lv = static_cast<int>((b - 1) & 63u);
                if (lv + 1 > depth || lv + 1 > 62) return;
                sign[static_cast<std::size_t>(i)] = (b & 64u) ? -1 : 1;
                level[static_cast<std::size_t>(i)] = static_cast<std::int8_t>(lv + 1);
            }
        }
        add(pack_member(sign, level, n), used, new_keys, new_masks);
    }
};

} // namespace

const char* cert_mode_name(CertMode mode) {
    return mode == CertMode::Successive ? "successive" : "disjoint";
}

EnumResult enumerate_K(const std::vector<Index>& support, int depth, CertMode mode,
                       const Params& params, const EnumOptions& opts) {
    const int n = static_cast<int>(support.size());
    if (n < 1 || n > 8) fail("oversized_support", "enumeration supports 1..8 coordinates");
    if (depth < 0 || depth > 10) fail("bad_depth", "enumeration depth must be in [0, 10]");
    std::vector<Index> idx = support;
    std::sort(idx.begin(), idx.end());
    if (std::adjacent_find(idx.begin(), idx.end()) != idx.end())
        fail("bad_vector", "enumeration support has duplicate indices");

    EnumResult out;
    if (mode == CertMode::Successive) {
        const DensePatterns& pats = successive_patterns(n, params.r, depth);
        for (int k = 1; k <= n && !out.truncated; ++k) {
            const auto& flat = pats.flat[static_cast<std::size_t>(k)];
            const std::size_t m = pats.count(k);
            const auto& subsets = rank_subsets(n, k);
            const std::size_t nsub = subsets.size() / static_cast<std::size_t>(k);
            const std::size_t sign_count =
                opts.positive_only ? 1 : (static_cast<std::size_t>(1) << k);
            for (std::size_t si = 0; si < nsub && !out.truncated; ++si) {
                const std::uint8_t* T = subsets.data() + si * static_cast<std::size_t>(k);
                for (std::size_t pi = 0; pi < m && !out.truncated; ++pi) {
                    const std::uint8_t* e = flat.data() + pi * static_cast<std::size_t>(k);
                    for (std::size_t sbits = 0; sbits < sign_count; ++sbits) {
                        if (out.members.size() >= opts.cap) {
                            out.truncated = true;
                            break;
                        }
                        GridVector g(GridBase::T);
                        for (int j = 0; j < k; ++j)
                            g.set(idx[T[j]], (sbits >> j) & 1 ? -1 : 1,
                                  -static_cast<long long>(e[j]));
                        out.members.push_back(std::move(g));
                    }
                }
            }
        }
        return out;
    }

    DisjointEnum en;
    en.n = n;
    en.r = params.r;
    en.depth = depth;
    en.cap = opts.cap;
    en.positive_only = opts.positive_only;
    en.run();
    out.truncated = en.truncated;
    out.members.reserve(en.seen.size());
    std::vector<std::uint64_t> keys(en.seen.begin(), en.seen.end());
    std::sort(keys.begin(), keys.end());
    for (std::uint64_t key : keys) {
        GridVector g(GridBase::T);
        for (int i = 0; i < n; ++i) {
            std::uint64_t b = (key >> (8 * i)) & 0xffu;
            if (!b) continue;
            g.set(idx[static_cast<std::size_t>(i)], (b & 64u) ? -1 : 1,
                  -static_cast<long long>((b - 1) & 63u));
        }
        out.members.push_back(std::move(g));
    }
    return out;
}

} // namespace tsnorm

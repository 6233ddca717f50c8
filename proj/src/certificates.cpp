#include "tsnorm/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tsnorm {

namespace {

std::string path_string(const std::vector<int>& path) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < path.size(); ++i) os << (i ? "," : "") << path[i];
    os << "]";
    return os.str();
}

} // namespace

CertificateError::CertificateError(std::string reason, std::vector<int> path)
    : Error("bad_certificate", "node " + path_string(path) + ": " + reason),
      path_(std::move(path)) {}

namespace {

GridVector verify_node(const CertNode& node, CertMode mode, int r,
                       std::vector<int>& path) {
    if (node.is_leaf()) {
        if (node.index < 1) throw CertificateError("leaf index must be >= 1", path);
        if (node.sign != 1 && node.sign != -1)
            throw CertificateError("leaf sign must be +-1", path);
        GridVector g(GridBase::T);
        g.set(node.index, node.sign, 0);
        return g;
    }
    if (static_cast<int>(node.children.size()) > r)
        throw CertificateError("fan-out " + std::to_string(node.children.size()) +
                                   " exceeds r = " + std::to_string(r),
                               path);
    GridVector acc(GridBase::T);
    Index prev_max = 0;
    for (std::size_t c = 0; c < node.children.size(); ++c) {
        path.push_back(static_cast<int>(c));
        GridVector child = verify_node(node.children[c], mode, r, path);
        if (mode == CertMode::Successive && c > 0 && child.min_index() <= prev_max)
            throw CertificateError("ordering violation", path);
        prev_max = std::max(prev_max, child.max_index());
        for (const auto& [i, ge] : child.entries()) {
            if (acc.entries().count(i))
                throw CertificateError("children overlap at index " + std::to_string(i),
                                       path);
            acc.set(i, ge.sign, ge.exponent - 1);
        }
        path.pop_back();
    }
    return acc;
}

} // namespace

GridVector verify_certificate(const Certificate& cert, const Params& params) {
    std::vector<int> path;
    GridVector y = verify_node(cert.root, cert.mode, params.r, path);
    if (y.empty()) throw CertificateError("certificate evaluates to zero", path);
    // Closure keeps the evaluation inside the dual ball; re-check exactly.
    KraftSum kraft(params.r);
    for (const auto& [i, ge] : y.entries()) kraft.add(-ge.exponent);
    if (kraft.exceeds_one()) throw CertificateError("dual mass exceeds 1", path);
    return y;
}

bool kM_membership(const GridVector& y, const Params& params) {
    if (y.base() != GridBase::T) fail("bad_vector", "membership expects a base-t vector");
    KraftSum kraft(params.r);
    for (const auto& [i, ge] : y.entries()) {
        if (ge.exponent > 0) return false;
        kraft.add(-ge.exponent);
        if (kraft.exceeds_one()) return false;
    }
    return !kraft.exceeds_one();
}

namespace {

// Cut sizes for a nondecreasing level array of exact Kraft mass 1: returns the
// sizes of r consecutive blocks of mass r^(-1) each, found by collapsing the
// deepest level in groups of r and recursing on the shortened array.
std::vector<std::size_t> decompose_levels(const std::vector<long long>& levels, int r) {
    const std::size_t n = levels.size();
    long long m = levels.back();
    if (m == 1) {
        // mass 1 at a single level forces exactly r coordinates
        if (n != static_cast<std::size_t>(r))
            fail("internal", "level-1 block is not r coordinates wide");
        return std::vector<std::size_t>(static_cast<std::size_t>(r), 1);
    }
    std::size_t deep = 0;
    while (deep < n && levels[n - 1 - deep] == m) ++deep;
    // mass bookkeeping guarantees the deepest level splits into groups of r
    if (deep % static_cast<std::size_t>(r) != 0)
        fail("internal", "deepest level count not divisible by r");
    std::size_t groups = deep / static_cast<std::size_t>(r);
    std::vector<long long> collapsed(levels.begin(),
                                     levels.begin() + static_cast<std::ptrdiff_t>(n - deep));
    for (std::size_t g = 0; g < groups; ++g) collapsed.push_back(m - 1);

    std::vector<std::size_t> inner = decompose_levels(collapsed, r);

    // expand: positions beyond the collapse boundary stand for r coordinates
    std::vector<std::size_t> out;
    out.reserve(inner.size());
    std::size_t pos = 0;
    for (std::size_t width : inner) {
        std::size_t expanded = 0;
        for (std::size_t j = 0; j < width; ++j, ++pos)
            expanded += (pos < n - deep) ? 1 : static_cast<std::size_t>(r);
        out.push_back(expanded);
    }
    return out;
}

} // namespace

ClaimDecomposition claim_decompose(const GridVector& x, const Params& params) {
    if (x.base() != GridBase::T) fail("bad_vector", "decomposition expects a base-t vector");
    if (x.empty()) fail("bad_vector", "cannot decompose the empty vector");

    KraftSum kraft(params.r);
    for (const auto& [i, ge] : x.entries()) {
        if (ge.exponent > 0) fail("bad_vector", "entry above the unit level");
        kraft.add(-ge.exponent);
    }
    if (!kraft.equals_one()) fail("bad_vector", "decomposition requires exact mass 1");

    ClaimDecomposition out;
    // magnitude descending = level ascending; ties by index
    std::vector<std::pair<long long, Index>> order;
    order.reserve(x.support_size());
    for (const auto& [i, ge] : x.entries()) order.emplace_back(-ge.exponent, i);
    std::sort(order.begin(), order.end());
    out.rank_to_index.reserve(order.size());
    for (const auto& [lv, i] : order) out.rank_to_index.push_back(i);

    if (order.front().first < 1)
        fail("bad_vector", "a unit-level entry admits no decomposition");

    std::vector<long long> levels;
    levels.reserve(order.size());
    for (const auto& [lv, i] : order) levels.push_back(lv);

    std::vector<std::size_t> widths = decompose_levels(levels, params.r);
    std::size_t pos = 0;
    for (std::size_t width : widths) {
        GridVector part(GridBase::T);
        for (std::size_t j = 0; j < width; ++j, ++pos) {
            Index idx = out.rank_to_index[pos];
            part.set(idx, x.entries().at(idx).sign, x.entries().at(idx).exponent);
        }
        out.parts.push_back(std::move(part));
    }
    return out;
}

namespace {

CertNode build_unit_mass(const GridVector& x, const Params& params) {
    if (x.support_size() == 1) {
        const auto& [i, ge] = *x.entries().begin();
        if (ge.exponent != 0) fail("internal", "singleton of mass 1 must sit at level 0");
        return CertNode::leaf(ge.sign, i);
    }
    ClaimDecomposition dec = claim_decompose(x, params);
    std::vector<CertNode> children;
    children.reserve(dec.parts.size());
    for (const auto& part : dec.parts)
        children.push_back(build_unit_mass(part.scaled_by_pow(1), params));
    return CertNode::internal(std::move(children));
}

// Drops the given leaf indices; internal nodes that lose every child vanish.
bool prune_leaves(CertNode& node, const std::vector<Index>& drop) {
    if (node.is_leaf())
        return !std::binary_search(drop.begin(), drop.end(), node.index);
    std::vector<CertNode> kept;
    for (auto& child : node.children)
        if (prune_leaves(child, drop)) kept.push_back(std::move(child));
    node.children = std::move(kept);
    return !node.children.empty();
}

} // namespace

Certificate build_kM_certificate(const GridVector& y, const Params& params) {
    if (y.base() != GridBase::T) fail("bad_vector", "certificate expects a base-t vector");
    if (y.empty()) fail("bad_vector", "cannot certify the empty vector");
    if (!kM_membership(y, params)) fail("not_member", "vector is outside the norming set");

    KraftSum kraft(params.r);
    for (const auto& [i, ge] : y.entries()) kraft.add(-ge.exponent);

    GridVector padded = y;
    std::vector<Index> padding;
    Index next = y.max_index() + 1;
    for (const auto& [level, count] : kraft.residual_digits()) {
        for (long long c = 0; c < count; ++c) {
            padded.set(next, 1, -level);
            padding.push_back(next);
            ++next;
        }
    }

    Certificate cert;
    cert.mode = CertMode::Disjoint;
    cert.root = build_unit_mass(padded, params);
    if (!padding.empty() && !prune_leaves(cert.root, padding))
        fail("internal", "pruning removed the whole certificate");
    return cert;
}

ExponentSeq parse_exponent_seq(const std::string& text) {
    ExponentSeq m;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            long long v = std::stoll(item, &used);
            while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used])))
                ++used;
            if (used != item.size()) throw std::invalid_argument(item);
            m.values.push_back(v);
        } catch (const std::exception&) {
            fail("bad_sequence", "cannot parse exponent sequence entry '" + item + "'");
        }
    }
    if (m.values.empty()) fail("bad_sequence", "empty exponent sequence");
    return m;
}

PowerSum phi_exact(const ExponentSeq& m, long long r) {
    if (m.values.empty()) fail("bad_sequence", "phi of an empty sequence");
    PowerSum sum(r);
    const std::size_t n = m.values.size();
    for (std::size_t i = 0; i < n; ++i) {
        long long weight = (i == 0 || i + 1 == n) ? 1 : 2;
        sum.add_term(m.values[i], weight);
    }
    return sum;
}

double phi(const ExponentSeq& m, const Params& params) {
    return phi_exact(m, params.r).to_double();
}

GridVector v_map(const ExponentSeq& m, const Params& params) {
    (void)params;
    if (m.values.empty()) fail("bad_sequence", "v_map of an empty sequence");
    GridVector g(GridBase::T);
    for (std::size_t i = 0; i < m.values.size(); ++i)
        g.set(static_cast<Index>(i + 1), 1, -m.values[i]);
    return g;
}

namespace {

ExponentSeq slice(const ExponentSeq& m, std::size_t lo, std::size_t hi) { // [lo, hi)
    ExponentSeq out;
    out.values.assign(m.values.begin() + static_cast<std::ptrdiff_t>(lo),
                      m.values.begin() + static_cast<std::ptrdiff_t>(hi));
    return out;
}

ExponentSeq shifted(const ExponentSeq& m, long long k) {
    ExponentSeq out = m;
    for (auto& v : out.values) v -= k;
    return out;
}

CertNode chain(CertNode node, long long links) {
    for (long long i = 0; i < links; ++i) {
        std::vector<CertNode> one;
        one.push_back(std::move(node));
        node = CertNode::internal(std::move(one));
    }
    return node;
}

void shift_leaf_indices(CertNode& node, Index offset) {
    if (node.is_leaf()) {
        node.index += offset;
        return;
    }
    for (auto& child : node.children) shift_leaf_indices(child, offset);
}

// Certificate over positions 1..len(m) for entries >= 0 with phi(m) <= 1.
CertNode build_k_node(const ExponentSeq& m, const Params& params, int guard) {
    if (guard > 4096) fail("internal", "certificate recursion exceeded its guard");
    const long long r = params.r;
    const std::size_t n = m.values.size();

    if (n == 1) return chain(CertNode::leaf(1, 1), m.values[0]);

    PowerSum weight = phi_exact(m, r);
    if (weight.compare(PowerSum::one(r)) > 0)
        fail("internal", "weight exceeded 1 inside the recursion");

    // normalize: r^(-k-1) < phi(m) <= r^(-k), then recurse on m - k*1
    long long k = 0;
    while (weight.compare(PowerSum::r_pow(r, k + 1)) <= 0) ++k;
    if (k > 0) {
        CertNode inner = build_k_node(shifted(m, k), params, guard + 1);
        return chain(std::move(inner), k);
    }

    // greedy maximal segments of weight <= r^(-1); the splice rule caps the
    // count at r
    const PowerSum budget = PowerSum::r_pow(r, 1);
    std::vector<std::pair<std::size_t, std::size_t>> segments; // [lo, hi)
    std::size_t lo = 0;
    while (lo < n) {
        std::size_t hi = lo + 1;
        while (hi < n && phi_exact(slice(m, lo, hi + 1), r).compare(budget) <= 0) ++hi;
        if (phi_exact(slice(m, lo, hi), r).compare(budget) > 0)
            fail("internal", "segment exceeds its weight budget");
        segments.emplace_back(lo, hi);
        lo = hi;
    }
    if (segments.size() < 2 || segments.size() > static_cast<std::size_t>(params.r))
        fail("internal", "segment count " + std::to_string(segments.size()) +
                             " out of range");

    std::vector<CertNode> children;
    children.reserve(segments.size());
    for (const auto& [seg_lo, seg_hi] : segments) {
        CertNode child = build_k_node(shifted(slice(m, seg_lo, seg_hi), 1), params,
                                      guard + 1);
        shift_leaf_indices(child, static_cast<Index>(seg_lo));
        children.push_back(std::move(child));
    }
    return CertNode::internal(std::move(children));
}

} // namespace

Certificate build_K_certificate(const ExponentSeq& m, const Params& params) {
    if (m.values.empty()) fail("bad_sequence", "empty exponent sequence");
    for (long long v : m.values)
        if (v < 1) fail("bad_sequence", "entries must be >= 1");
    if (phi_exact(m, params.r).compare(PowerSum::one(params.r)) > 0)
        fail("phi_too_large", "weight exceeds 1; no certificate exists on this route");

    Certificate cert;
    cert.mode = CertMode::Successive;
    cert.root = build_k_node(m, params, 0);
    return cert;
}

ThreeSplit three_split(const GridVector& y, const Params& params) {
    if (!kM_membership(y, params)) fail("not_member", "vector is outside the norming set");
    if (y.empty()) fail("bad_vector", "cannot split the empty vector");

    ThreeSplit out;
    for (auto& piece : out.pieces) piece = GridVector(GridBase::T);

    // a unit-level entry forces a singleton member
    for (const auto& [i, ge] : y.entries()) {
        if (ge.exponent == 0) {
            out.pieces[0] = y;
            Certificate cert;
            cert.mode = CertMode::Successive;
            cert.root = CertNode::leaf(ge.sign, i);
            out.certificates.push_back(std::move(cert));
            return out;
        }
    }

    // greedy consecutive pieces of Kraft mass <= 1/2 in index order; the
    // bound is checked exactly as 2 * mass <= 1
    std::size_t piece = 0;
    std::vector<PowerSum> piece_mass;
    piece_mass.emplace_back(params.r);
    for (const auto& [i, ge] : y.entries()) {
        PowerSum with = piece_mass.back();
        with.add_term(-ge.exponent, 1);
        PowerSum doubled = with;
        doubled += with;
        if (doubled.compare(PowerSum::one(params.r)) > 0) {
            ++piece;
            if (piece > 2) fail("internal", "greedy split needed more than 3 pieces");
            piece_mass.emplace_back(params.r);
            with = piece_mass.back();
            with.add_term(-ge.exponent, 1);
        }
        piece_mass.back() = with;
        out.pieces[piece].set(i, ge.sign, ge.exponent);
    }

    for (const auto& pc : out.pieces) {
        if (pc.empty()) continue;
        ExponentSeq m;
        std::vector<Index> indices;
        std::vector<int> signs;
        for (const auto& [i, ge] : pc.entries()) {
            m.values.push_back(-ge.exponent);
            indices.push_back(i);
            signs.push_back(ge.sign);
        }
        Certificate cert = build_K_certificate(m, params);
        // relabel positions 1..k to the piece's support and restore signs
        std::vector<std::pair<Index, int>> relabel(indices.size());
        for (std::size_t j = 0; j < indices.size(); ++j)
            relabel[j] = {indices[j], signs[j]};
        struct Walk {
            const std::vector<std::pair<Index, int>>& map;
            void apply(CertNode& node) const {
                if (node.is_leaf()) {
                    const auto& [idx, sg] = map[static_cast<std::size_t>(node.index - 1)];
                    node.index = idx;
                    node.sign = sg;
                    return;
                }
                for (auto& child : node.children) apply(child);
            }
        };
        Walk{relabel}.apply(cert.root);
        out.certificates.push_back(std::move(cert));
    }
    return out;
}

} // namespace tsnorm

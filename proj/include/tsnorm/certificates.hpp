#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tsnorm/grid_vector.hpp"
#include "tsnorm/kraft.hpp"
#include "tsnorm/params.hpp"

namespace tsnorm {

enum class CertMode { Successive, Disjoint };

const char* cert_mode_name(CertMode mode);

/// Closure-rule witness tree. A leaf contributes sign * e_index; an internal
/// node with children c_1..c_l (1 <= l <= r) evaluates to t^(-1) (v_1+...+v_l),
/// with child supports successive or pairwise disjoint depending on the mode.
struct CertNode {
    int sign = 1;
    Index index = 0;
    std::vector<CertNode> children;

    bool is_leaf() const { return children.empty(); }

    static CertNode leaf(int sign, Index index) { return CertNode{sign, index, {}}; }
    static CertNode internal(std::vector<CertNode> children) {
        return CertNode{1, 0, std::move(children)};
    }
};

struct Certificate {
    CertMode mode = CertMode::Disjoint;
    CertNode root;
};

/// Structural violation, reported with the path of child positions from the
/// root to the offending node.
class CertificateError : public Error {
public:
    CertificateError(std::string reason, std::vector<int> path);
    const std::vector<int>& path() const { return path_; }

private:
    std::vector<int> path_;
};

/// Replays the closure rules bottom-up with exact exponent arithmetic and
/// returns the root vector (base t). Throws CertificateError on the first
/// violated node.
GridVector verify_certificate(const Certificate& cert, const Params& params);

/// Exact membership test for the disjoint-mode norming set: entries must be
/// +-t^(-j), j >= 0, with Kraft sum r^(-j_1) + ... + r^(-j_n) <= 1.
bool kM_membership(const GridVector& y, const Params& params);

/// Output of the unit-mass decomposition: r parts with pairwise disjoint
/// supports summing exactly to the input, each of Kraft mass r^(-1). The parts
/// are successive blocks in the magnitude-sorted arrangement recorded by
/// `rank_to_index` (position k of the sorted order came from rank_to_index[k]).
struct ClaimDecomposition {
    std::vector<GridVector> parts;
    std::vector<Index> rank_to_index;
};

/// Decomposes a base-t vector of exact Kraft mass 1 (checked in integer
/// arithmetic) into r blocks of mass r^(-1) each, by collapsing the deepest
/// level in groups of r and recursing.
ClaimDecomposition claim_decompose(const GridVector& x, const Params& params);

/// Builds a verified disjoint-mode certificate whose root evaluates exactly
/// to y. Non-members are rejected. Internally the residual Kraft budget is
/// padded with coordinates beyond max supp y (base-r digits of the residual)
/// and the padding leaves are pruned from the finished tree.
Certificate build_kM_certificate(const GridVector& y, const Params& params);

/// Finite integer sequence feeding the weight functional and the successive-
/// mode certificate builder. Entries must be >= 1 at the public surface;
/// shifted copies with entries >= 0 occur inside the recursion.
struct ExponentSeq {
    std::vector<long long> values;

    std::size_t size() const { return values.size(); }
};

ExponentSeq parse_exponent_seq(const std::string& text); // "1,2,1"

/// Weight of an exponent sequence: r^(-m1) for one term, r^(-m1) + r^(-mn)
/// plus twice the interior terms otherwise. Satisfies the exact splice rule
/// phi(m) = phi(m[1..i]) + phi(m[i..n]) for interior i.
double phi(const ExponentSeq& m, const Params& params);
PowerSum phi_exact(const ExponentSeq& m, long long r);

/// (t^(-m1), ..., t^(-mn), 0, ...) as an exact base-t grid vector.
GridVector v_map(const ExponentSeq& m, const Params& params);

/// Builds a verified successive-mode certificate evaluating exactly to
/// v_map(m). Requires phi(m) <= 1 (exact check); entries >= 1.
Certificate build_K_certificate(const ExponentSeq& m, const Params& params);

/// Splits a disjoint-mode member into at most three successive pieces of
/// Kraft mass <= 1/2 and certifies each piece in successive mode. A member
/// with a +-1 entry is returned as a single leaf certificate.
struct ThreeSplit {
    std::array<GridVector, 3> pieces;      // empty pieces allowed
    std::vector<Certificate> certificates; // one per nonempty piece, in order
};

ThreeSplit three_split(const GridVector& y, const Params& params);

struct EnumOptions {
    std::size_t cap = 2'000'000; // max distinct members before truncation
    bool positive_only = false;
};

struct EnumResult {
    std::vector<GridVector> members;
    bool truncated = false;
};

/// All distinct evaluations of closure trees over the given support with tree
/// depth <= depth. support size <= 8, depth <= 10; combinatorial blow-up is
/// guarded by opts.cap and reported through `truncated`.
EnumResult enumerate_K(const std::vector<Index>& support, int depth, CertMode mode,
                       const Params& params, const EnumOptions& opts = {});

} // namespace tsnorm

#include <cmath>
#include <limits>

#include <doctest.h>

#include "tsnorm/classical_norm.hpp"
#include "tsnorm/modified_norm.hpp"
#include "tsnorm/generators.hpp"
#include "tsnorm/oracles.hpp"
#include "tsnorm/params.hpp"
#include "tsnorm/rng.hpp"

using namespace tsnorm;

namespace {
const double kInf = std::numeric_limits<double>::infinity();

std::vector<Params> param_grid() {
    return {derive_params(2.0, 2), derive_params(2.0, 4), derive_params(1.5, 3),
            derive_params(3.0, 2)};
}
} // namespace

TEST_CASE("unit vector and empty vector") {
    for (const Params& params : param_grid()) {
        SparseVector e1 = SparseVector::from_pairs({{1, 1.0}});
        CHECK(classical_norm(e1, params).value == doctest::Approx(1.0));
        CHECK(classical_norm(SparseVector{}, params).value == 0.0);
    }
}

TEST_CASE("two equal coordinates split into singletons") {
    Params params = derive_params(2.0, 2);
    SparseVector x = SparseVector::from_pairs({{1, 1.0}, {2, 1.0}});
    ClassicalResult res = classical_norm(x, params);
    CHECK(res.value == doctest::Approx(std::sqrt(2.0)));
    REQUIRE(res.witness.children.size() == 2);
    CHECK(res.witness.children[0].is_leaf());
    CHECK(res.witness.children[0].leaf_index == 1);
    CHECK(res.witness.children[1].leaf_index == 2);
}

TEST_CASE("three equal coordinates") {
    Params params = derive_params(2.0, 2);
    SparseVector x = SparseVector::from_pairs({{1, 1.0}, {2, 1.0}, {3, 1.0}});
    double expected = 1.0 + 1.0 / std::sqrt(2.0);
    ClassicalResult res = classical_norm(x, params);
    CHECK(res.value == doctest::Approx(expected).epsilon(1e-14));
    // cross-checked against the independent closure enumeration
    OracleResult oracle = classical_norm_oracle(x, params, 8);
    CHECK(std::fabs(res.value - oracle.value) <= 1e-6 * (1 + oracle.value));
    // leftmost-first-breakpoint tie-break: first piece is the single coordinate
    REQUIRE(res.witness.children.size() == 2);
    CHECK(res.witness.children[0].is_leaf());
    CHECK(res.witness.children[0].leaf_index == 1);
}

TEST_CASE("oracle values") {
    Params params = derive_params(2.0, 2);
    SparseVector e1 = SparseVector::from_pairs({{1, 1.0}});
    CHECK(classical_norm_oracle(e1, params, 4).value == doctest::Approx(1.0));
    SparseVector x = SparseVector::from_pairs({{1, 1.0}, {2, 1.0}});
    OracleResult res = classical_norm_oracle(x, params, 8);
    CHECK(res.value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
    CHECK(res.slack == doctest::Approx(2.0 * std::pow(params.t, -8.0)));
    SparseVector big;
    for (int i = 1; i <= 9; ++i) big.set(i, 1.0);
    CHECK_THROWS_AS(classical_norm_oracle(big, params, 8), Error);
}

TEST_CASE("dynamic program agrees with the enumeration oracle") {
    SplitMix64 rng(101);
    for (const Params& params : param_grid()) {
        for (int c = 0; c < 40; ++c) {
            SparseVector x = random_sparse(rng, params, 5);
            double dp = classical_norm(x, params).value;
            OracleResult oracle = classical_norm_oracle(x, params, 8);
            CHECK(std::fabs(dp - oracle.value) <= 1e-6 * (1 + oracle.value));
        }
    }
}

TEST_CASE("sup and lp sandwich") {
    SplitMix64 rng(102);
    for (const Params& params : param_grid()) {
        for (int c = 0; c < 40; ++c) {
            SparseVector x = random_sparse(rng, params, 20);
            double value = classical_norm(x, params).value;
            CHECK(value >= lp_norm(x, kInf) - 1e-9);
            CHECK(value <= lp_norm(x, params.p) + 1e-9);
        }
    }
}

TEST_CASE("sign flips leave the value bit-identical") {
    SplitMix64 rng(103);
    Params params = derive_params(1.5, 3);
    for (int c = 0; c < 25; ++c) {
        SparseVector x = random_sparse(rng, params, 12);
        SparseVector flipped;
        for (const auto& [i, v] : x.entries())
            flipped.set(i, rng.below(2) ? v : -v);
        CHECK(classical_norm(x, params).value == classical_norm(flipped, params).value);
    }
}

TEST_CASE("spreading leaves the value bit-identical") {
    SplitMix64 rng(104);
    Params params = derive_params(2.0, 4);
    for (int c = 0; c < 25; ++c) {
        SparseVector x = random_sparse(rng, params, 12);
        SparseVector sp = spread(x, [](Index i) { return 3 * i + 7; });
        CHECK(classical_norm(x, params).value == classical_norm(sp, params).value);
    }
}

TEST_CASE("restriction is monotone") {
    SplitMix64 rng(105);
    Params params = derive_params(2.0, 2);
    for (int c = 0; c < 25; ++c) {
        SparseVector x = random_sparse(rng, params, 12);
        std::vector<Index> keep;
        for (const auto& [i, v] : x.entries())
            if (rng.below(2)) keep.push_back(i);
        SparseVector rx = restrict(x, keep);
        CHECK(classical_norm(rx, params).value <= classical_norm(x, params).value + 1e-12);
    }
}

TEST_CASE("extreme parameters keep the invariants") {
    SplitMix64 rng(107);
    for (auto [p, r] : {std::pair{1.25, 64}, {4.0, 2}, {1.25, 2}, {4.0, 64}}) {
        Params params = derive_params(p, r);
        for (int c = 0; c < 10; ++c) {
            SparseVector x = random_sparse(rng, params, 30);
            double classical = classical_norm(x, params).value;
            double modified = modified_norm(x, params).value;
            CHECK(classical <= modified + 1e-9);
            CHECK(modified <= lp_norm(x, params.p) + 1e-9);
            CHECK(modified <= 3.0 * classical + 1e-9);
        }
        for (int c = 0; c < 6; ++c) {
            SparseVector x = random_sparse(rng, params, 4);
            double dp = classical_norm(x, params).value;
            double oracle = classical_norm_oracle(x, params, 7).value;
            CHECK(std::fabs(dp - oracle) <= 1e-6 * (1 + oracle));
        }
    }
}

TEST_CASE("witness re-evaluates on a large support") {
    SplitMix64 rng(108);
    Params params = derive_params(2.0, 4);
    SparseVector x;
    for (int i = 1; i <= 200; ++i) x.set(i, rng.uniform01_pos());
    ClassicalResult res = classical_norm(x, params);
    CHECK(evaluate_split_tree(res.witness, x, params) ==
          doctest::Approx(res.value).epsilon(1e-12));
}

TEST_CASE("witness re-evaluates to the reported value") {
    SplitMix64 rng(106);
    for (const Params& params : param_grid()) {
        for (int c = 0; c < 25; ++c) {
            SparseVector x = random_sparse(rng, params, 15);
            ClassicalResult res = classical_norm(x, params);
            double replay = evaluate_split_tree(res.witness, x, params);
            CHECK(replay == doctest::Approx(res.value).epsilon(1e-12));
        }
    }
}

#include <cmath>
#include <vector>

#include <doctest.h>

#include "tsnorm/generators.hpp"
#include "tsnorm/kraft.hpp"
#include "tsnorm/modified_norm.hpp"
#include "tsnorm/oracles.hpp"
#include "tsnorm/params.hpp"
#include "tsnorm/rng.hpp"

using namespace tsnorm;

namespace {

std::vector<Params> param_grid() {
    return {derive_params(2.0, 2), derive_params(2.0, 4), derive_params(1.5, 3),
            derive_params(3.0, 2)};
}

// independent small-scale reference: every assignment with levels <= cap
double brute_levels(const SparseVector& x, const Params& params, long long cap) {
    std::vector<double> c;
    for (const auto& [i, v] : x.entries()) c.push_back(std::fabs(v));
    const std::size_t n = c.size();
    std::vector<long long> lv(n, -1); // -1 = unused
    double best = 0.0;
    while (true) {
        KraftSum kraft(params.r);
        bool feasible = true;
        double val = 0.0;
        for (std::size_t i = 0; i < n && feasible; ++i) {
            if (lv[i] < 0) continue;
            kraft.add(lv[i]);
            if (kraft.exceeds_one()) feasible = false;
            val += c[i] * std::pow(params.t, -double(lv[i]));
        }
        if (feasible && val > best) best = val;
        std::size_t pos = 0;
        while (pos < n) {
            if (++lv[pos] <= cap) break;
            lv[pos] = -1;
            ++pos;
        }
        if (pos == n) break;
    }
    return best;
}

} // namespace

TEST_CASE("unit vector") {
    for (const Params& params : param_grid()) {
        SparseVector e1 = SparseVector::from_pairs({{1, 1.0}});
        ModifiedResult res = modified_norm(e1, params);
        CHECK(res.value == doctest::Approx(1.0));
        REQUIRE(res.witness.levels.count(1) == 1);
        CHECK(res.witness.levels.at(1) == 0);
        CHECK(modified_norm(SparseVector{}, params).value == 0.0);
    }
}

TEST_CASE("flat vector of width r attains the lp bound") {
    for (const Params& params : param_grid()) {
        SparseVector x;
        for (int i = 1; i <= params.r; ++i) x.set(i, 1.0);
        ModifiedResult res = modified_norm(x, params);
        CHECK(res.value == doctest::Approx(params.s).epsilon(1e-12));
        for (const auto& [i, level] : res.witness.levels) CHECK(level == 1);
        CHECK(res.witness.levels.size() == static_cast<std::size_t>(params.r));
    }
}

TEST_CASE("three equal coordinates, levels (1,2,2)") {
    Params params = derive_params(2.0, 2);
    SparseVector x = SparseVector::from_pairs({{1, 1.0}, {2, 1.0}, {3, 1.0}});
    ModifiedResult res = modified_norm(x, params);
    double expected = 1.0 + 1.0 / std::sqrt(2.0);
    CHECK(res.value == doctest::Approx(expected).epsilon(1e-14));
    CHECK(res.value == doctest::Approx(brute_levels(x, params, 5)).epsilon(1e-14));
    REQUIRE(res.witness.levels.size() == 3);
    CHECK(res.witness.levels.at(1) == 1);
    CHECK(res.witness.levels.at(2) == 2);
    CHECK(res.witness.levels.at(3) == 2);
}

TEST_CASE("optimizer agrees with the exhaustive assignment search") {
    SplitMix64 rng(201);
    for (const Params& params : param_grid()) {
        for (int c = 0; c < 12; ++c) {
            SparseVector x = random_sparse(rng, params, 4);
            double opt = modified_norm(x, params).value;
            double brute = brute_levels(x, params, 6);
            CHECK(opt == doctest::Approx(brute).epsilon(1e-9));
        }
    }
}

TEST_CASE("optimizer agrees with the recursive oracle") {
    SplitMix64 rng(202);
    for (const Params& params : param_grid()) {
        for (int c = 0; c < 30; ++c) {
            SparseVector x = random_sparse(rng, params, 5);
            double opt = modified_norm(x, params).value;
            OracleResult oracle = modified_norm_oracle(x, params, 60);
            CHECK(std::fabs(opt - oracle.value) <= 1e-6 * (1 + oracle.value));
        }
    }
}

TEST_CASE("oracle examples and guards") {
    Params params = derive_params(2.0, 2);
    SparseVector e1 = SparseVector::from_pairs({{1, 1.0}});
    CHECK(modified_norm_oracle(e1, params, 10).value == doctest::Approx(1.0));
    SparseVector x = SparseVector::from_pairs({{1, 0.7}, {2, -0.4}, {3, 0.9}});
    SparseVector ax = SparseVector::from_pairs({{1, 0.7}, {2, 0.4}, {3, 0.9}});
    CHECK(modified_norm_oracle(x, params, 40).value ==
          doctest::Approx(modified_norm_oracle(ax, params, 40).value));
    SparseVector big;
    for (int i = 1; i <= 7; ++i) big.set(i, 1.0);
    CHECK_THROWS_AS(modified_norm_oracle(big, params, 10), Error);
}

TEST_CASE("witness is feasible and reproduces the value") {
    SplitMix64 rng(203);
    for (const Params& params : param_grid()) {
        for (int c = 0; c < 30; ++c) {
            SparseVector x = random_sparse(rng, params, 20);
            ModifiedResult res = modified_norm(x, params);
            KraftSum kraft(params.r);
            double pairing = 0.0;
            for (const auto& [i, level] : res.witness.levels) {
                CHECK(level >= 0);
                kraft.add(level);
                pairing += std::fabs(x.at(i)) * std::pow(params.t, -double(level));
            }
            CHECK_FALSE(kraft.exceeds_one());
            CHECK(pairing == doctest::Approx(res.value).epsilon(1e-12));
        }
    }
}

TEST_CASE("permutation invariance is exact") {
    SplitMix64 rng(204);
    Params params = derive_params(1.5, 3);
    for (int c = 0; c < 20; ++c) {
        SparseVector x = random_sparse(rng, params, 15);
        SparseVector permuted;
        Index shift = 1 + rng.range(0, 50);
        for (const auto& [i, v] : x.entries())
            permuted.set(shift + 2 * (x.max_index() - i), v); // reverses the order
        CHECK(modified_norm(x, params).value == modified_norm(permuted, params).value);
    }
}

TEST_CASE("value never exceeds the lp relaxation") {
    SplitMix64 rng(205);
    for (const Params& params : param_grid()) {
        for (int c = 0; c < 30; ++c) {
            SparseVector x = random_sparse(rng, params, 25);
            CHECK(modified_norm(x, params).value <= lp_norm(x, params.p) + 1e-9);
        }
    }
}

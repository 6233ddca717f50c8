#include <cmath>

#include <doctest.h>

#include "tsnorm/classical_norm.hpp"
#include "tsnorm/generators.hpp"
#include "tsnorm/json_io.hpp"
#include "tsnorm/params.hpp"
#include "tsnorm/rng.hpp"
#include "tsnorm/stabilization.hpp"

using namespace tsnorm;

TEST_CASE("first comparison bound, exact equality cases") {
    Params params = derive_params(2.0, 4);

    GridVector x(GridBase::S);
    x.set(1, 1, -1);
    x.set(2, 1, -1);
    ComparisonWitness w = check_comparing1(x, params);
    CHECK(w.holds);
    CHECK(w.pairing == doctest::Approx(2.0 / params.r));
    CHECK(w.dual_witness.base() == GridBase::T);
    CHECK(w.dual_witness.entries().at(1).exponent == -1);

    GridVector e1(GridBase::S);
    e1.set(1, 1, 0);
    ComparisonWitness we = check_comparing1(e1, params);
    CHECK(we.holds);
    CHECK(we.pairing == doctest::Approx(1.0));
    CHECK(we.modified_value == doctest::Approx(1.0));

    GridVector heavy(GridBase::S);
    heavy.set(1, 1, 1); // p-mass r > 1
    CHECK_THROWS_AS(check_comparing1(heavy, params), Error);
}

TEST_CASE("first comparison bound on random members") {
    SplitMix64 rng(401);
    for (auto [p, r] : {std::pair{2.0, 2}, {2.0, 4}, {1.5, 3}, {3.0, 2}}) {
        Params params = derive_params(p, r);
        for (int c = 0; c < 40; ++c) {
            GridVector x = random_s_member(rng, params, 12, 6);
            ComparisonWitness w = check_comparing1(x, params);
            CHECK(w.holds);
            CHECK(kM_membership(w.dual_witness, params));
            double mass = x.power_mass(params.p, params);
            CHECK(w.pairing == doctest::Approx(mass).epsilon(1e-12));
        }
    }
}

TEST_CASE("second comparison bound") {
    Params params = derive_params(2.0, 4);
    GridVector e1(GridBase::S);
    e1.set(1, 1, 0);
    CHECK(check_comparing2(e1, params));

    GridVector flat(GridBase::S);
    for (int i = 1; i <= params.r; ++i) flat.set(i, 1, 0);
    CHECK(check_comparing2(flat, params)); // s <= 1 + r/t = 1 + s

    SplitMix64 rng(402);
    for (auto [p, r] : {std::pair{2.0, 2}, {1.5, 3}, {3.0, 2}}) {
        Params ps = derive_params(p, r);
        for (int c = 0; c < 40; ++c) CHECK(check_comparing2(random_s_vector(rng, ps, 12, 6), ps));
    }
}

TEST_CASE("averaging with a single level collapses the split") {
    Params params = derive_params(2.0, 2); // M = 1
    const double eps = 0.02;
    std::size_t need = averaging_required_count(params, eps);
    // least l with 2^l >= 50 is 6, and the block length is 2^l
    CHECK(need == 64);
    BlockSequence inputs = balanced_block_inputs(params, need);
    AveragingResult avg = approxim_construct(inputs, eps, params, 1, true);
    REQUIRE(avg.averages.size() == 1);
    REQUIRE(avg.averages[0].size() == 1);
    CHECK(avg.sums[0] == avg.averages[0][0]);
    CHECK(avg.profile.l == 6);
}

TEST_CASE("averaging block lengths follow the scale rule") {
    Params params = derive_params(2.0, 4); // M = 2, alpha^p = 2
    std::size_t need = averaging_required_count(params, 0.01);
    // least l with 4^l >= 100 is 4; lengths 4^4 * 2^k = 256, 512
    CHECK(need == 256 + 512);
    BlockSequence inputs = balanced_block_inputs(params, need + 3);
    AveragingResult avg = approxim_construct(inputs, 0.01, params, 1, true);
    CHECK(avg.profile.l == 4);
    REQUIRE(avg.profile.block_lengths.size() == 2);
    CHECK(avg.profile.block_lengths[0] == 256);
    CHECK(avg.profile.block_lengths[1] == 512);

    const double lo = std::pow(params.alpha, -3.0);
    for (const auto& y : avg.averages[0]) {
        auto parts = j_m_split(y, params);
        for (const auto& part : parts) {
            double norm = std::pow(part.power_mass(params.p, params), 1.0 / params.p);
            CHECK(norm >= lo * (1 - 1e-9));
            CHECK(norm <= 1.0 + 1e-9);
        }
    }
}

TEST_CASE("averaging reports shortages") {
    Params params = derive_params(2.0, 2);
    BlockSequence inputs = balanced_block_inputs(params, 5);
    CHECK_THROWS_AS(approxim_construct(inputs, 0.02, params, 1, true), Error);
}

TEST_CASE("two-sided estimate on a crafted single-vector sequence") {
    Params params = derive_params(2.0, 4); // alpha^p = 2
    // residue masses exactly alpha^(-3p): two coordinates at exponent -4 and
    // one at exponent -3
    GridVector x(GridBase::Alpha);
    x.set(1, 1, -4);
    x.set(2, 1, -4);
    x.set(3, 1, -3);
    StabTrial trial = stab_verify({x}, {1.0}, params);
    CHECK(trial.grid_mass_ok);
    CHECK(trial.stab_lower_ok);
    CHECK(trial.stab_upper_ok);
    CHECK(trial.k_levels[0] == 0);
    CHECK(trial.classical.has_value());
    CHECK(*trial.classical <= trial.modified + 1e-9);
    CHECK(trial.modified <= trial.lp + 1e-9);
}

TEST_CASE("two-sided estimate across coefficient shapes") {
    Params params = derive_params(1.5, 2);
    const double eps = 0.04;
    std::size_t need = averaging_required_count(params, eps);
    BlockSequence inputs = balanced_block_inputs(params, 3 * need);
    AveragingResult avg = approxim_construct(inputs, eps, params, 3, false);

    // uniform, concentrated, and sliding coefficient draws
    std::vector<std::vector<double>> draws = {
        {1.0, 1.0, 1.0},
        {0.999, 1e-3, 1e-3},
        {0.2, 0.5, 0.9},
    };
    for (auto& a : draws) {
        StabTrial trial = stab_verify(avg.sums, a, params);
        CHECK(trial.grid_mass_ok);
        CHECK(trial.stab_lower_ok);
        CHECK(trial.stab_upper_ok);
        double sum_p = 0.0;
        for (double v : trial.coeffs) sum_p += std::pow(v, params.p);
        CHECK(sum_p == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(stab_verify(avg.sums, {1.0, 0.0, 1.0}, params), Error);
}

TEST_CASE("hypothesis violations are reported with their location") {
    Params params = derive_params(2.0, 2);
    GridVector thin(GridBase::Alpha);
    thin.set(1, 1, -9); // mass far below alpha^(-3p)
    CHECK_THROWS_WITH_AS(stab_verify({thin}, {1.0}, params),
                         doctest::Contains("hypothesis"), Error);
}

TEST_CASE("pipeline is deterministic and satisfies the envelopes") {
    Params params = derive_params(2.0, 2);
    PipelineOptions opts;
    opts.eps = 0.04;
    opts.n_vectors = 3;
    std::size_t need = pipeline_required_count(params, opts);
    StabReport a = stabilization_pipeline(unit_basis(need), params, 8, 7, opts);
    StabReport b = stabilization_pipeline(unit_basis(need), params, 8, 7, opts);
    CHECK(stab_report_to_json(a).dump() == stab_report_to_json(b).dump());
    CHECK(stab_report_to_csv(a) == stab_report_to_csv(b));

    StabReport c = stabilization_pipeline(unit_basis(need), params, 8, 8, opts);
    CHECK(stab_report_to_json(a).dump() != stab_report_to_json(c).dump());

    for (const auto& row : a.rows) {
        CHECK(row.stab_lower_ok);
        CHECK(row.stab_upper_ok);
        CHECK(row.grid_mass_ok);
        CHECK(row.rho >= a.rho_lower_bound);
        CHECK(row.rho <= a.rho_upper_bound);
        CHECK(row.rho <= std::pow(std::log2(double(params.r)), 1.0 / params.p) + 1e-9);
        REQUIRE(row.classical.has_value());
        CHECK(*row.classical <= row.modified + 1e-9);
        CHECK(row.modified <= row.lp + 1e-9);
    }
    CHECK(a.lambda_hat <= a.lambda_bound);
    CHECK(a.lambda_hat >= 1.0);
}

TEST_CASE("pipeline enforces the support budget") {
    Params params = derive_params(2.0, 2);
    PipelineOptions opts;
    opts.eps = 0.04;
    opts.n_vectors = 3;
    opts.support_budget = 10;
    std::size_t need = pipeline_required_count(params, opts);
    CHECK_THROWS_WITH_AS(
        stabilization_pipeline(unit_basis(need), params, 2, 0, opts),
        doctest::Contains("budget"), Error);
}

TEST_CASE("random block basis feeds the pipeline") {
    Params params = derive_params(2.0, 2);
    PipelineOptions opts;
    opts.eps = 0.05;
    opts.n_vectors = 2;
    std::size_t need = pipeline_required_count(params, opts);
    std::vector<SparseVector> basis = random_block_basis(3, 3 * need, 2);
    StabReport report = stabilization_pipeline(basis, params, 5, 11, opts);
    for (const auto& row : report.rows) {
        CHECK(row.stab_lower_ok);
        CHECK(row.stab_upper_ok);
    }
}

#include "tsnorm/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include "tsnorm/certificates.hpp"
#include "tsnorm/classical_norm.hpp"
#include "tsnorm/generators.hpp"
#include "tsnorm/json_io.hpp"
#include "tsnorm/modified_norm.hpp"
#include "tsnorm/oracles.hpp"
#include "tsnorm/stabilization.hpp"

namespace tsnorm {

namespace {

struct SuiteRun {
    SuiteResult result;

    void check(bool ok, const std::function<std::string()>& describe) {
        ++result.cases;
        if (!ok) {
            ++result.failures;
            if (result.first_failure.empty()) result.first_failure = describe();
        }
    }

    void check(bool ok, const std::string& note) {
        check(ok, [&note] { return note; });
    }
};

std::vector<Params> sweep_params() {
    return {derive_params(2.0, 2), derive_params(2.0, 4), derive_params(1.5, 3),
            derive_params(3.0, 2)};
}

std::string describe_vector(const SparseVector& x) {
    return sparse_to_json(x).dump();
}

void suite_params_identities(SuiteRun& run, std::uint64_t, int) {
    for (double p : {1.25, 1.5, 2.0, 3.0, 4.0}) {
        for (int r = 2; r <= 64; ++r) {
            bool ok = true;
            try {
                check_params(derive_params(p, r));
            } catch (const Error&) {
                ok = false;
            }
            run.check(ok, "identities fail at p=" + format_g17(p) + " r=" + std::to_string(r));
        }
    }
}

void suite_grid_roundtrip(SuiteRun& run, std::uint64_t seed, int n) {
    SplitMix64 rng = SplitMix64::fork(seed, 1);
    for (const Params& params : sweep_params()) {
        for (GridBase base : {GridBase::Alpha, GridBase::S, GridBase::T}) {
            double bv = grid_base_value(base, params);
            long long cap = std::min<long long>(
                512, static_cast<long long>(900.0 / std::log2(bv)));
            for (int c = 0; c < n; ++c) {
                GridVector g(base);
                int width = static_cast<int>(rng.range(1, 6));
                Index idx = 0;
                for (int j = 0; j < width; ++j) {
                    idx += rng.range(1, 4);
                    g.set(idx, rng.below(2) ? 1 : -1, rng.range(-cap, cap));
                }
                GridVector back = quantize_to_grid(g.to_sparse(params), bv, base);
                run.check(back == g, [&] { return grid_to_json(g).dump(); });
            }
        }
    }
}

void suite_jm_partition(SuiteRun& run, std::uint64_t seed, int n) {
    SplitMix64 rng = SplitMix64::fork(seed, 2);
    for (const Params& params : sweep_params()) {
        for (int c = 0; c < n; ++c) {
            GridVector x(GridBase::Alpha);
            int width = static_cast<int>(rng.range(1, 10));
            Index idx = 0;
            for (int j = 0; j < width; ++j) {
                idx += rng.range(1, 3);
                x.set(idx, rng.below(2) ? 1 : -1, rng.range(-8, 8));
            }
            auto parts = j_m_split(x, params);
            std::set<Index> seen;
            double mass = 0.0;
            bool disjoint = true;
            for (const auto& part : parts) {
                for (const auto& [i, ge] : part.entries())
                    disjoint = disjoint && seen.insert(i).second;
                mass += part.power_mass(params.p, params);
            }
            double total = x.power_mass(params.p, params);
            bool ok = disjoint && seen.size() == x.support_size() &&
                      std::fabs(mass - total) <= 1e-12 * std::max(1.0, total);
            run.check(ok, [&] { return grid_to_json(x).dump(); });
        }
    }
}

void suite_quantize_sandwich(SuiteRun& run, std::uint64_t seed, int n) {
    SplitMix64 rng = SplitMix64::fork(seed, 3);
    for (const Params& params : sweep_params()) {
        for (int c = 0; c < n; ++c) {
            SparseVector x = random_sparse(rng, params, 8);
            GridVector g = quantize_to_grid(x, params.alpha, GridBase::Alpha);
            bool ok = true;
            double root = std::sqrt(params.alpha);
            for (const auto& [i, ge] : g.entries()) {
                double ratio = std::pow(params.alpha, static_cast<double>(ge.exponent)) /
                               std::fabs(x.at(i));
                ok = ok && ratio >= 1.0 / root * (1 - 1e-12) && ratio <= root * (1 + 1e-12);
            }
            run.check(ok, [&] { return describe_vector(x); });
        }
    }
}

void suite_classical_oracle(SuiteRun& run, std::uint64_t seed, int n) {
    SplitMix64 rng = SplitMix64::fork(seed, 4);
    for (const Params& params : sweep_params()) {
        for (int c = 0; c < n; ++c) {
            SparseVector x = random_sparse(rng, params, 5);
            double dp = classical_norm(x, params).value;
            double oracle = classical_norm_oracle(x, params, 8).value;
            run.check(std::fabs(dp - oracle) <= 1e-6 * (1.0 + oracle),
                      [&] { return describe_vector(x); });
        }
    }
}

void suite_modified_oracle(SuiteRun& run, std::uint64_t seed, int n) {
    SplitMix64 rng = SplitMix64::fork(seed, 5);
    for (const Params& params : sweep_params()) {
        for (int c = 0; c < n; ++c) {
            SparseVector x = random_sparse(rng, params, 5);
            double opt = modified_norm(x, params).value;
            double oracle = modified_norm_oracle(x, params, 60).value;
            run.check(std::fabs(opt - oracle) <= 1e-6 * (1.0 + oracle),
                      [&] { return describe_vector(x); });
        }
    }
}

void suite_norm_sandwich(SuiteRun& run, std::uint64_t seed, int n) {
    SplitMix64 rng = SplitMix64::fork(seed, 6);
    for (const Params& params : sweep_params()) {
        for (int c = 0; c < n; ++c) {
            SparseVector x = random_sparse(rng, params, 25);
            double sup = lp_norm(x, std::numeric_limits<double>::infinity());
            double lp = lp_norm(x, params.p);
            double classical = classical_norm(x, params).value;
            double modified = modified_norm(x, params).value;
            bool ok = sup <= classical + 1e-9 && classical <= modified + 1e-9 &&
                      modified <= lp + 1e-9;
            run.check(ok, [&] { return describe_vector(x); });
        }
    }
}

void suite_three_equivalence(SuiteRun& run, std::uint64_t seed, int n) {
    SplitMix64 rng = SplitMix64::fork(seed, 7);
    for (const Params& params : sweep_params()) {
        for (int c = 0; c < n; ++c) {
            SparseVector x = random_sparse(rng, params, 25);
            double classical = classical_norm(x, params).value;
            double modified = modified_norm(x, params).value;
            run.check(modified <= 3.0 * classical + 1e-9,
                      [&] { return describe_vector(x); });
        }
    }
}

void suite_kraft_roundtrip(SuiteRun& run, std::uint64_t seed, int n) {
    SplitMix64 rng = SplitMix64::fork(seed, 8);
    for (const Params& params : sweep_params()) {
        for (int c = 0; c < n; ++c) {
            GridVector y = random_dual_member(rng, params, 12, 6);
            bool ok = false;
            try {
                Certificate cert = build_kM_certificate(y, params);
                ok = verify_certificate(cert, params) == y;
            } catch (const Error&) {
                ok = false;
            }
            run.check(ok, [&] { return grid_to_json(y).dump(); });

            GridVector bad = random_dual_nonmember(rng, params, 8, 5);
            bool rejected = !kM_membership(bad, params);
            try {
                build_kM_certificate(bad, params);
                rejected = false;
            } catch (const Error&) {
            }
            run.check(rejected, [&] { return grid_to_json(bad).dump(); });
        }
    }
}

void suite_kraft_set_equality(SuiteRun& run, std::uint64_t, int) {
    // exhaustive over supports of size 3, levels <= 2, both signs
    for (const Params& params : sweep_params()) {
        std::vector<Index> support{1, 2, 3};
        EnumResult en = enumerate_K(support, 4, CertMode::Disjoint, params);
        std::set<GridVector> members(en.members.begin(), en.members.end());
        int states = 2 * 3 + 1; // sign x level in {0,1,2} plus absent
        int total = states * states * states;
        for (int codeword = 0; codeword < total; ++codeword) {
            int rem = codeword;
            GridVector y(GridBase::T);
            for (Index i = 1; i <= 3; ++i) {
                int st = rem % states;
                rem /= states;
                if (st == 0) continue;
                int lv = (st - 1) % 3;
                int sign = (st - 1) / 3 == 0 ? 1 : -1;
                y.set(i, sign, -lv);
            }
            if (y.empty()) continue;
            bool member = kM_membership(y, params);
            bool enumerated = members.count(y) > 0;
            run.check(member == enumerated, [&] { return grid_to_json(y).dump(); });
        }
    }
}

void suite_phi_additivity(SuiteRun& run, std::uint64_t seed, int n) {
    SplitMix64 rng = SplitMix64::fork(seed, 9);
    for (const Params& params : sweep_params()) {
        for (int c = 0; c < n; ++c) {
            int len = static_cast<int>(rng.range(3, 14));
            ExponentSeq m;
            for (int i = 0; i < len; ++i) m.values.push_back(rng.range(-3, 8));
            std::size_t cut = static_cast<std::size_t>(rng.range(1, len - 2));
            ExponentSeq head, tail;
            head.values.assign(m.values.begin(), m.values.begin() + cut + 1);
            tail.values.assign(m.values.begin() + cut, m.values.end());
            PowerSum lhs = phi_exact(m, params.r);
            PowerSum rhs = phi_exact(head, params.r);
            rhs += phi_exact(tail, params.r);
            run.check(lhs.compare(rhs) == 0, "splice rule broke");
        }
    }
}

void suite_phi_dual_bound(SuiteRun& run, std::uint64_t seed, int n) {
    SplitMix64 rng = SplitMix64::fork(seed, 10);
    for (const Params& params : sweep_params()) {
        for (int c = 0; c < n; ++c) {
            int len = static_cast<int>(rng.range(1, 16));
            ExponentSeq m;
            PowerSum twice_mass(params.r);
            for (int i = 0; i < len; ++i) {
                long long v = rng.range(1, 8);
                m.values.push_back(v);
                twice_mass.add_term(v, 2);
            }
            run.check(phi_exact(m, params.r).compare(twice_mass) <= 0,
                      "phi exceeded twice the dual mass");
        }
    }
}

void suite_phi_certificates(SuiteRun& run, std::uint64_t seed, int n) {
    SplitMix64 rng = SplitMix64::fork(seed, 11);
    for (const Params& params : sweep_params()) {
        for (int c = 0; c < n; ++c) {
            ExponentSeq m = random_weight_feasible_seq(rng, params, 20, 6);
            bool ok = false;
            try {
                Certificate cert = build_K_certificate(m, params);
                ok = verify_certificate(cert, params) == v_map(m, params);
            } catch (const Error&) {
                ok = false;
            }
            run.check(ok, [&] {
                std::ostringstream os;
                for (std::size_t i = 0; i < m.values.size(); ++i)
                    os << (i ? "," : "") << m.values[i];
                return os.str();
            });
        }
    }
}

void suite_three_split(SuiteRun& run, std::uint64_t seed, int n) {
    SplitMix64 rng = SplitMix64::fork(seed, 12);
    for (const Params& params : sweep_params()) {
        for (int c = 0; c < n; ++c) {
            GridVector y = random_dual_member(rng, params, 10, 5);
            bool ok = false;
            try {
                ThreeSplit split = three_split(y, params);
                GridVector sum(GridBase::T);
                std::size_t cert_at = 0;
                ok = true;
                for (const auto& piece : split.pieces) {
                    if (piece.empty()) continue;
                    for (const auto& [i, ge] : piece.entries())
                        sum.set(i, ge.sign, ge.exponent);
                    GridVector eval =
                        verify_certificate(split.certificates.at(cert_at++), params);
                    ok = ok && eval == piece;
                }
                ok = ok && sum == y && cert_at == split.certificates.size();
            } catch (const Error&) {
                ok = false;
            }
            run.check(ok, [&] { return grid_to_json(y).dump(); });
        }
    }
}

void suite_comparing_one(SuiteRun& run, std::uint64_t seed, int n) {
    SplitMix64 rng = SplitMix64::fork(seed, 13);
    for (const Params& params : sweep_params()) {
        for (int c = 0; c < n; ++c) {
            GridVector x = random_s_member(rng, params, 12, 6);
            bool ok = false;
            try {
                ComparisonWitness w = check_comparing1(x, params);
                double mass = x.power_mass(params.p, params);
                ok = w.holds && std::fabs(w.pairing - mass) <= 1e-12 * (1 + mass) &&
                     kM_membership(w.dual_witness, params);
            } catch (const Error&) {
                ok = false;
            }
            run.check(ok, [&] { return grid_to_json(x).dump(); });
        }
    }
}

void suite_comparing_two(SuiteRun& run, std::uint64_t seed, int n) {
    SplitMix64 rng = SplitMix64::fork(seed, 14);
    for (const Params& params : sweep_params()) {
        for (int c = 0; c < n; ++c) {
            GridVector x = random_s_vector(rng, params, 12, 6);
            bool ok = false;
            try {
                ok = check_comparing2(x, params);
            } catch (const Error&) {
                ok = false;
            }
            run.check(ok, [&] { return grid_to_json(x).dump(); });
        }
    }
}

void suite_averaging_bounds(SuiteRun& run, std::uint64_t, int) {
    for (const Params& params : {derive_params(2.0, 2), derive_params(2.0, 4)}) {
        const double eps = 0.02;
        bool ok = true;
        try {
            std::size_t need = averaging_required_count(params, eps);
            BlockSequence inputs = balanced_block_inputs(params, need + 4);
            approxim_construct(inputs, eps, params, 1, /*per_average=*/true);
        } catch (const Error& e) {
            ok = false;
            run.check(ok, std::string("averaging failed: ") + e.what());
            continue;
        }
        run.check(ok, "averaging bounds");
    }
}

void suite_stability_envelopes(SuiteRun& run, std::uint64_t seed, int) {
    Params params = derive_params(2.0, 2);
    PipelineOptions opts;
    opts.eps = 0.04;
    opts.n_vectors = 3;
    opts.stab.classical_cap = 256;
    std::size_t need = pipeline_required_count(params, opts);
    bool ok = true;
    std::string note = "stability envelopes";
    try {
        StabReport report =
            stabilization_pipeline(unit_basis(need), params, 10, seed, opts);
        for (const auto& row : report.rows) {
            ok = ok && row.stab_lower_ok && row.stab_upper_ok && row.grid_mass_ok;
            ok = ok && row.rho >= report.rho_lower_bound - 1e-9 &&
                 row.rho <= report.rho_upper_bound + 1e-9;
            if (row.classical)
                ok = ok && *row.classical <= row.modified + 1e-9 &&
                     row.modified <= row.lp + 1e-9;
        }
        ok = ok && report.lambda_hat <= report.lambda_bound + 1e-9;
    } catch (const Error& e) {
        ok = false;
        note = e.what();
    }
    run.check(ok, note);
}

struct SuiteEntry {
    const char* name;
    int default_n;
    void (*fn)(SuiteRun&, std::uint64_t, int);
};

const SuiteEntry kSuites[] = {
    {"params-identities", 0, suite_params_identities},
    {"grid-roundtrip", 20, suite_grid_roundtrip},
    {"jm-partition", 25, suite_jm_partition},
    {"quantize-sandwich", 25, suite_quantize_sandwich},
    {"classical-oracle", 12, suite_classical_oracle},
    {"modified-oracle", 15, suite_modified_oracle},
    {"norm-sandwich", 25, suite_norm_sandwich},
    {"three-equivalence", 25, suite_three_equivalence},
    {"kraft-roundtrip", 15, suite_kraft_roundtrip},
    {"kraft-set-equality", 0, suite_kraft_set_equality},
    {"phi-additivity", 40, suite_phi_additivity},
    {"phi-dual-bound", 40, suite_phi_dual_bound},
    {"phi-certificates", 15, suite_phi_certificates},
    {"three-split", 15, suite_three_split},
    {"comparing-one", 25, suite_comparing_one},
    {"comparing-two", 25, suite_comparing_two},
    {"averaging-bounds", 0, suite_averaging_bounds},
    {"stability-envelopes", 0, suite_stability_envelopes},
};

} // namespace

std::vector<std::string> selftest_suite_names() {
    std::vector<std::string> names;
    for (const auto& entry : kSuites) names.emplace_back(entry.name);
    return names;
}

SelftestReport run_selftest(const SelftestConfig& config) {
    SelftestReport report;
    bool matched = false;
    for (const auto& entry : kSuites) {
        if (!config.suite.empty() && config.suite != entry.name) continue;
        matched = true;
        SuiteRun run;
        run.result.name = entry.name;
        int n = config.n > 0 ? config.n : entry.default_n;
        entry.fn(run, config.seed, n);
        report.ok = report.ok && run.result.failures == 0;
        report.suites.push_back(std::move(run.result));
    }
    if (!matched) fail("bad_suite", "unknown suite '" + config.suite + "'");
    return report;
}

} // namespace tsnorm

// Acceptance harness: runs every release criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exits nonzero on any failure.
// argv[1] must point at the CLI binary (used by the determinism criterion).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tsnorm/certificates.hpp"
#include "tsnorm/classical_norm.hpp"
#include "tsnorm/generators.hpp"
#include "tsnorm/json_io.hpp"
#include "tsnorm/modified_norm.hpp"
#include "tsnorm/oracles.hpp"
#include "tsnorm/params.hpp"
#include "tsnorm/rng.hpp"
#include "tsnorm/stabilization.hpp"

using namespace tsnorm;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int criterion, bool ok, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion,
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

double elapsed(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<Params> param_grid() {
    return {derive_params(2.0, 2), derive_params(2.0, 4), derive_params(1.5, 3),
            derive_params(3.0, 2)};
}

std::string fmt(double v) { return format_g17(v); }

// ---------------------------------------------------------------- criterion 1
void criterion_classical_oracle() {
    auto start = Clock::now();
    SplitMix64 rng(1001);
    double worst = 0.0;
    int cases = 0;
    for (const Params& params : param_grid()) {
        for (int c = 0; c < 200; ++c) {
            SparseVector x = random_sparse(rng, params, 6);
            double dp = classical_norm(x, params).value;
            double oracle = classical_norm_oracle(x, params, 8).value;
            double err = std::fabs(dp - oracle) / (1.0 + oracle);
            worst = std::max(worst, err);
            ++cases;
        }
    }
    double secs = elapsed(start);
    bool ok = worst <= 1e-6 && secs <= 60.0;
    report(1, ok,
           "classical oracle equivalence: " + std::to_string(cases) +
               " cases, worst rel err " + fmt(worst) + ", " + fmt(secs) + " s (limit 60)");
}

// ---------------------------------------------------------------- criterion 2
void criterion_modified_oracle() {
    auto start = Clock::now();
    SplitMix64 rng(1002);
    double worst = 0.0;
    int cases = 0;
    for (const Params& params : param_grid()) {
        for (int c = 0; c < 200; ++c) {
            SparseVector x = random_sparse(rng, params, 5);
            double opt = modified_norm(x, params).value;
            double oracle = modified_norm_oracle(x, params, 80).value;
            double err = std::fabs(opt - oracle) / (1.0 + oracle);
            worst = std::max(worst, err);
            ++cases;
        }
    }
    double secs = elapsed(start);
    bool ok = worst <= 1e-6 && secs <= 120.0;
    report(2, ok,
           "modified oracle equivalence: " + std::to_string(cases) +
               " cases, worst rel err " + fmt(worst) + ", " + fmt(secs) + " s (limit 120)");
}

// ---------------------------------------------------------------- criterion 3
void criterion_sandwich() {
    SplitMix64 rng(1003);
    int cases = 0;
    bool ok = true;
    std::string note;
    for (const Params& params : param_grid()) {
        for (int c = 0; c < 250; ++c) {
            SparseVector x = random_sparse(rng, params, 40);
            double classical = classical_norm(x, params).value;
            double modified = modified_norm(x, params).value;
            double lp = lp_norm(x, params.p);
            ++cases;
            if (!(classical <= modified + 1e-9 && modified <= lp + 1e-9 &&
                  modified <= 3.0 * classical + 1e-9)) {
                ok = false;
                if (note.empty())
                    note = " first failure at case " + std::to_string(cases);
            }
        }
    }
    report(3, ok, "norm sandwich and 3-equivalence on " + std::to_string(cases) +
                      " vectors" + note);
}

// ---------------------------------------------------------------- criterion 4
void criterion_membership_roundtrip() {
    SplitMix64 rng(1004);
    bool ok = true;
    std::string note;
    int members = 0, rejected = 0;
    for (const Params& params : param_grid()) {
        for (int c = 0; c < 75; ++c) {
            GridVector y = random_dual_member(rng, params, 30, 6);
            try {
                Certificate cert = build_kM_certificate(y, params);
                if (!(verify_certificate(cert, params) == y)) {
                    ok = false;
                    if (note.empty()) note = " round-trip mismatch";
                }
            } catch (const Error& e) {
                ok = false;
                if (note.empty()) note = std::string(" builder failed: ") + e.what();
            }
            ++members;

            GridVector bad = random_dual_nonmember(rng, params, 20, 6);
            bool caught = !kM_membership(bad, params);
            try {
                build_kM_certificate(bad, params);
                caught = false;
            } catch (const Error&) {
            }
            if (!caught) {
                ok = false;
                if (note.empty()) note = " non-member accepted";
            }
            ++rejected;
        }

        // small-scale set equality in both directions
        EnumResult en = enumerate_K({1, 2, 3, 4}, 5, CertMode::Disjoint, params);
        if (en.truncated) {
            ok = false;
            note = " enumeration truncated";
            continue;
        }
        std::set<GridVector> pool(en.members.begin(), en.members.end());
        const int states = 2 * 4 + 1; // absent, or sign x level in {0..3}
        for (int code = 1; code < states * states * states * states; ++code) {
            int rem = code;
            GridVector y(GridBase::T);
            for (Index i = 1; i <= 4; ++i) {
                int st = rem % states;
                rem /= states;
                if (st == 0) continue;
                y.set(i, (st - 1) / 4 == 0 ? 1 : -1, -((st - 1) % 4));
            }
            if (y.empty()) continue;
            if (kM_membership(y, params) != (pool.count(y) == 1)) {
                ok = false;
                if (note.empty()) note = " set equality broke at r=" + std::to_string(params.r);
                break;
            }
        }
    }
    report(4, ok,
           "membership round-trip (" + std::to_string(members) + " members, " +
               std::to_string(rejected) + " rejections) and small-box set equality" + note);
}

// ---------------------------------------------------------------- criterion 5
void criterion_weight_certificates() {
    SplitMix64 rng(1005);
    bool ok = true;
    std::string note;
    int built = 0;
    for (const Params& params : param_grid()) {
        for (int c = 0; c < 75; ++c) {
            ExponentSeq m = random_weight_feasible_seq(rng, params, 20, 6);
            try {
                Certificate cert = build_K_certificate(m, params);
                if (!(verify_certificate(cert, params) == v_map(m, params))) {
                    ok = false;
                    if (note.empty()) note = " certificate mismatch";
                }
            } catch (const Error& e) {
                ok = false;
                if (note.empty()) note = std::string(" builder failed: ") + e.what();
            }
            ++built;
        }
        for (int c = 0; c < 250; ++c) {
            int len = static_cast<int>(rng.range(3, 20));
            ExponentSeq m;
            for (int i = 0; i < len; ++i) m.values.push_back(rng.range(-4, 9));
            std::size_t cut = static_cast<std::size_t>(rng.range(1, len - 2));
            ExponentSeq head, tail;
            head.values.assign(m.values.begin(), m.values.begin() + cut + 1);
            tail.values.assign(m.values.begin() + cut, m.values.end());
            PowerSum rhs = phi_exact(head, params.r);
            rhs += phi_exact(tail, params.r);
            if (phi_exact(m, params.r).compare(rhs) != 0) {
                ok = false;
                if (note.empty()) note = " splice rule broke";
            }
        }
        for (int c = 0; c < 250; ++c) {
            int len = static_cast<int>(rng.range(1, 20));
            ExponentSeq m;
            PowerSum twice(params.r);
            for (int i = 0; i < len; ++i) {
                long long v = rng.range(1, 8);
                m.values.push_back(v);
                twice.add_term(v, 2);
            }
            if (phi_exact(m, params.r).compare(twice) > 0) {
                ok = false;
                if (note.empty()) note = " dual-mass bound broke";
            }
        }
    }
    report(5, ok, "successive certificates (" + std::to_string(built) +
                      " sequences), exact splice rule, dual-mass bound" + note);
}

// ---------------------------------------------------------------- criterion 6
void criterion_comparisons() {
    SplitMix64 rng(1006);
    bool ok = true;
    std::string note;
    int cases1 = 0, cases2 = 0;
    for (const Params& params : param_grid()) {
        for (int c = 0; c < 125; ++c) {
            GridVector x = random_s_member(rng, params, 12, 6);
            try {
                if (!check_comparing1(x, params).holds) {
                    ok = false;
                    if (note.empty()) note = " first bound broke";
                }
            } catch (const Error& e) {
                ok = false;
                if (note.empty()) note = std::string(" ") + e.what();
            }
            ++cases1;
        }
        for (int c = 0; c < 125; ++c) {
            GridVector x = random_s_vector(rng, params, 12, 6);
            if (!check_comparing2(x, params)) {
                ok = false;
                if (note.empty()) note = " second bound broke";
            }
            ++cases2;
        }
    }
    report(6, ok, "comparison bounds on " + std::to_string(cases1) + " + " +
                      std::to_string(cases2) + " grid vectors" + note);
}

// ---------------------------------------------------------------- criterion 7
void criterion_averaging() {
    bool ok = true;
    std::string note;
    for (int r : {2, 4}) {
        for (double p : {1.5, 2.0, 3.0}) {
            Params params = derive_params(p, r);
            const double eps = 0.01;
            try {
                std::size_t need = averaging_required_count(params, eps);
                BlockSequence inputs = balanced_block_inputs(params, need);
                AveragingResult avg = approxim_construct(inputs, eps, params, 1,
                                                         /*per_average=*/true);
                const double lo = std::pow(params.alpha, -3.0);
                for (const auto& y : avg.averages[0]) {
                    auto parts = j_m_split(y, params);
                    for (const auto& part : parts) {
                        double norm =
                            std::pow(part.power_mass(params.p, params), 1.0 / params.p);
                        if (norm < lo * (1 - 1e-9) || norm > 1.0 + 1e-9) {
                            ok = false;
                            if (note.empty())
                                note = " bound broke at r=" + std::to_string(r) +
                                       " p=" + fmt(p);
                        }
                    }
                }
            } catch (const Error& e) {
                ok = false;
                if (note.empty())
                    note = " construction failed at r=" + std::to_string(r) +
                           " p=" + fmt(p) + ": " + e.what();
            }
        }
    }
    report(7, ok, "averaging construction bounds for r in {2,4}, p in {1.5,2,3}, eps 0.01" +
                      note);
}

// ---------------------------------------------------------------- criterion 8
void criterion_stability_envelopes() {
    bool ok = true;
    std::string note;
    std::ostringstream lambdas;
    for (int r : {2, 4}) {
        for (double p : {1.5, 2.0, 3.0}) {
            Params params = derive_params(p, r);
            PipelineOptions opts;
            opts.eps = 0.01;
            opts.n_vectors = 2;
            try {
                std::size_t need = pipeline_required_count(params, opts);
                StabReport report_data =
                    stabilization_pipeline(unit_basis(need), params, 100, 7, opts);
                for (const auto& row : report_data.rows) {
                    if (!(row.stab_lower_ok && row.stab_upper_ok && row.grid_mass_ok)) {
                        ok = false;
                        if (note.empty())
                            note = " two-sided estimate broke at r=" + std::to_string(r) +
                                   " p=" + fmt(p);
                    }
                    if (row.rho < report_data.rho_lower_bound - 1e-9 ||
                        row.rho > report_data.rho_upper_bound + 1e-9) {
                        ok = false;
                        if (note.empty())
                            note = " rho escaped its envelope at r=" + std::to_string(r) +
                                   " p=" + fmt(p);
                    }
                }
                if (report_data.lambda_hat > report_data.lambda_bound + 1e-9) {
                    ok = false;
                    if (note.empty()) note = " lambda_hat exceeded its envelope";
                }
                lambdas << " (r=" << r << ",p=" << p
                        << ": lambda_hat=" << fmt(report_data.lambda_hat)
                        << " bound=" << fmt(report_data.lambda_bound) << ")";
            } catch (const Error& e) {
                ok = false;
                if (note.empty())
                    note = " pipeline failed at r=" + std::to_string(r) + " p=" + fmt(p) +
                           ": " + e.what();
            }
        }
    }
    report(8, ok, "stability envelopes, 100 draws per configuration" + note +
                      lambdas.str());
}

// ---------------------------------------------------------------- criterion 9
void criterion_performance() {
    SplitMix64 rng(1009);
    bool ok = true;
    std::string detail;
    for (auto [p, r] : {std::pair{2.0, 4}, {1.5, 3}}) {
        Params params = derive_params(p, r);
        SparseVector x;
        for (int i = 1; i <= 200; ++i) {
            double v = 2.0 * rng.uniform01_pos() - 1.0;
            x.set(i, v == 0.0 ? 0.5 : v);
        }
        auto t0 = Clock::now();
        double cvalue = classical_norm(x, params).value;
        double ct = elapsed(t0);
        auto t1 = Clock::now();
        double mvalue = modified_norm(x, params, 1e-9).value;
        double mt = elapsed(t1);
        if (ct > 5.0 || mt > 5.0) ok = false;
        detail += " (r=" + std::to_string(r) + ": classical " + fmt(ct) +
                  " s, modified " + fmt(mt) + " s)";
        if (!(cvalue <= mvalue + 1e-9)) ok = false;
    }
    report(9, ok, "support-200 norms within 5 s" + detail);
}

// --------------------------------------------------------------- criterion 10
std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void criterion_determinism(const std::string& cli) {
    bool ok = true;
    std::string note;
    if (cli.empty()) {
        report(10, false, "determinism: CLI path missing (pass it as argv[1])");
        return;
    }
    write_text_file("accept_params.json", "{\"p\": 2.0, \"r\": 2}\n");

    auto run = [&](const std::string& cmd) {
        int rc = std::system(cmd.c_str());
        if (rc != 0) {
            ok = false;
            if (note.empty()) note = " command failed: " + cmd;
        }
    };

    run("'" + cli + "' selftest --seed 3 --n 4 --out accept_self1.json > accept_self1.txt 2>&1");
    run("'" + cli + "' selftest --seed 3 --n 4 --out accept_self2.json > accept_self2.txt 2>&1");
    if (slurp("accept_self1.json") != slurp("accept_self2.json") ||
        slurp("accept_self1.txt") != slurp("accept_self2.txt")) {
        ok = false;
        if (note.empty()) note = " selftest outputs differ";
    }
    if (slurp("accept_self1.json").empty()) {
        ok = false;
        if (note.empty()) note = " selftest wrote no output";
    }

    std::string exp = " experiment stabilization --params accept_params.json "
                      "--basis-gen unit --count 3 --trials 10 --seed 5 --eps 0.04";
    run("'" + cli + "'" + exp + " --out accept_exp1.json --csv accept_exp1.csv > accept_exp1.txt 2>&1");
    run("'" + cli + "'" + exp + " --out accept_exp2.json --csv accept_exp2.csv > accept_exp2.txt 2>&1");
    if (slurp("accept_exp1.json") != slurp("accept_exp2.json") ||
        slurp("accept_exp1.csv") != slurp("accept_exp2.csv") ||
        slurp("accept_exp1.txt") != slurp("accept_exp2.txt")) {
        ok = false;
        if (note.empty()) note = " experiment outputs differ";
    }
    if (slurp("accept_exp1.csv").find("trial,lp_norm,classical,modified,rho,within_bounds") !=
        0) {
        ok = false;
        if (note.empty()) note = " experiment csv header missing";
    }

    // validation errors exit with code 2 and a machine-parseable line
    write_text_file("accept_bad_params.json", "{\"p\": 1.0, \"r\": 2}\n");
    int rc = std::system(("'" + cli +
                          "' norm classical --params accept_bad_params.json "
                          "--vector accept_params.json > accept_err.txt 2> accept_err2.txt")
                             .c_str());
    int code = WEXITSTATUS(rc);
    if (code != 2) {
        ok = false;
        if (note.empty()) note = " bad params exited with " + std::to_string(code);
    }
    if (slurp("accept_err2.txt").find("error code=") != 0) {
        ok = false;
        if (note.empty()) note = " diagnostic line missing";
    }
    report(10, ok, "CLI determinism and validation errors" + note);
}

} // namespace

int main(int argc, char** argv) {
    std::string cli = argc > 1 ? argv[1] : "";
    criterion_classical_oracle();
    criterion_modified_oracle();
    criterion_sandwich();
    criterion_membership_roundtrip();
    criterion_weight_certificates();
    criterion_comparisons();
    criterion_averaging();
    criterion_stability_envelopes();
    criterion_performance();
    criterion_determinism(cli);
    if (g_failures == 0)
        std::printf("acceptance: all criteria passed\n");
    else
        std::printf("acceptance: %d criterion(s) FAILED\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}

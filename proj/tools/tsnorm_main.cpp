#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tsnorm/certificates.hpp"
#include "tsnorm/classical_norm.hpp"
#include "tsnorm/json_io.hpp"
#include "tsnorm/modified_norm.hpp"
#include "tsnorm/oracles.hpp"
#include "tsnorm/selftest.hpp"
#include "tsnorm/stabilization.hpp"
#include "tsnorm/version.hpp"

namespace {

using namespace tsnorm;

struct CommonArgs {
    std::string params_path;
    std::string vector_path;
    double tol = 1e-9;
};

Params load_params(const std::string& path) {
    return params_from_json(load_json_file(path));
}

AnyVector load_vector(const std::string& path) {
    return vector_from_json(load_json_file(path));
}

std::size_t support_budget_default() {
    if (const char* env = std::getenv("TSNORM_SUPPORT_BUDGET")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
        fail("bad_budget", "TSNORM_SUPPORT_BUDGET must be a positive integer");
    }
    return 2000;
}

json run_meta(const Params& params) {
    return json{{"version", kVersion}, {"params", params_to_json(params)}};
}

int cmd_norm(bool classical_mode, const CommonArgs& args,
             const std::string& witness_path, std::size_t budget) {
    Params params = load_params(args.params_path);
    SparseVector x = as_sparse(load_vector(args.vector_path), params);
    if (x.support_size() > budget)
        fail("budget_exceeded", "support " + std::to_string(x.support_size()) +
                                    " exceeds the budget " + std::to_string(budget));
    json out = run_meta(params);
    if (classical_mode) {
        ClassicalResult res = classical_norm(x, params);
        std::printf("%s\n", format_g17(res.value).c_str());
        out["value"] = res.value;
        out["witness"] = x.empty() ? json(nullptr) : split_tree_to_json(res.witness);
    } else {
        ModifiedResult res = modified_norm(x, params, args.tol);
        std::printf("%s\n", format_g17(res.value).c_str());
        out["value"] = res.value;
        out["witness"] = level_assignment_to_json(res.witness);
    }
    if (!witness_path.empty()) write_text_file(witness_path, out.dump(2) + "\n");
    return 0;
}

int cmd_certify_km(const CommonArgs& args, const std::string& out_path) {
    Params params = load_params(args.params_path);
    GridVector y = as_grid(load_vector(args.vector_path), GridBase::T, "certify");
    Certificate cert = build_kM_certificate(y, params);
    GridVector eval = verify_certificate(cert, params);
    if (!(eval == y)) fail("internal", "certificate does not reproduce the vector");
    json out = run_meta(params);
    out["certificate"] = certificate_to_json(cert);
    std::printf("ok\n");
    if (!out_path.empty()) write_text_file(out_path, out.dump(2) + "\n");
    return 0;
}

int cmd_certify_k(const std::string& params_path, const std::string& m_text,
                  const std::string& out_path) {
    Params params = load_params(params_path);
    ExponentSeq m = parse_exponent_seq(m_text);
    Certificate cert = build_K_certificate(m, params);
    GridVector eval = verify_certificate(cert, params);
    if (!(eval == v_map(m, params)))
        fail("internal", "certificate does not reproduce the vector");
    json out = run_meta(params);
    out["phi"] = phi(m, params);
    out["certificate"] = certificate_to_json(cert);
    std::printf("ok\n");
    if (!out_path.empty()) write_text_file(out_path, out.dump(2) + "\n");
    return 0;
}

int cmd_decompose(const CommonArgs& args, const std::string& out_path) {
    Params params = load_params(args.params_path);
    GridVector x = as_grid(load_vector(args.vector_path), GridBase::T, "decompose");
    ClaimDecomposition dec = claim_decompose(x, params);
    json parts = json::array();
    for (const auto& part : dec.parts) parts.push_back(grid_to_json(part));
    json ranks = json::array();
    for (Index i : dec.rank_to_index) ranks.push_back(i);
    json out = run_meta(params);
    out["parts"] = parts;
    out["rank_to_index"] = ranks;
    std::printf("%zu parts\n", dec.parts.size());
    if (!out_path.empty()) write_text_file(out_path, out.dump(2) + "\n");
    return 0;
}

int cmd_phi(const std::string& params_path, const std::string& m_text) {
    Params params = load_params(params_path);
    ExponentSeq m = parse_exponent_seq(m_text);
    std::printf("%s\n", format_g17(phi(m, params)).c_str());
    return 0;
}

int cmd_split3(const CommonArgs& args, const std::string& out_path) {
    Params params = load_params(args.params_path);
    GridVector y = as_grid(load_vector(args.vector_path), GridBase::T, "split3");
    ThreeSplit split = three_split(y, params);
    json pieces = json::array();
    for (const auto& piece : split.pieces) pieces.push_back(grid_to_json(piece));
    json certs = json::array();
    for (const auto& cert : split.certificates) certs.push_back(certificate_to_json(cert));
    json out = run_meta(params);
    out["pieces"] = pieces;
    out["certificates"] = certs;
    std::printf("%zu certificates\n", split.certificates.size());
    if (!out_path.empty()) write_text_file(out_path, out.dump(2) + "\n");
    return 0;
}

int cmd_oracle(bool classical_mode, const CommonArgs& args, int depth) {
    Params params = load_params(args.params_path);
    SparseVector x = as_sparse(load_vector(args.vector_path), params);
    OracleResult res;
    if (classical_mode) {
        int d = depth > 0 ? depth : std::min<int>(12, static_cast<int>(x.support_size()) + 2);
        res = classical_norm_oracle(x, params, d, args.tol);
    } else {
        int d = depth > 0 ? depth : 60;
        res = modified_norm_oracle(x, params, d);
    }
    std::printf("%s slack=%s\n", format_g17(res.value).c_str(),
                format_g17(res.slack).c_str());
    return 0;
}

int cmd_experiment(const std::string& params_path, const std::string& basis_path,
                   const std::string& basis_gen, int count, int trials,
                   std::uint64_t seed, double eps, std::size_t budget,
                   const std::string& out_path, const std::string& csv_path) {
    Params params = load_params(params_path);
    PipelineOptions opts;
    opts.eps = eps;
    opts.n_vectors = count;
    opts.support_budget = budget;

    std::vector<SparseVector> basis;
    std::string kind;
    if (!basis_path.empty()) {
        json j = load_json_file(basis_path);
        if (!j.is_array()) fail("bad_json", "basis file must be an array of vectors");
        for (const auto& vj : j) basis.push_back(as_sparse(vector_from_json(vj), params));
        kind = "file:" + basis_path;
    } else {
        std::size_t need = pipeline_required_count(params, opts);
        if (basis_gen == "unit") {
            basis = unit_basis(need);
        } else if (basis_gen == "random") {
            basis = random_block_basis(seed, need, 3);
        } else {
            fail("bad_basis", "basis generator must be 'unit' or 'random'");
        }
        kind = basis_gen;
    }

    StabReport report = stabilization_pipeline(basis, params, trials, seed, opts);
    report.basis_kind = kind;
    json out = stab_report_to_json(report);
    std::printf("min_rho=%s max_rho=%s lambda_hat=%s\n",
                format_g17(report.min_rho).c_str(), format_g17(report.max_rho).c_str(),
                format_g17(report.lambda_hat).c_str());
    if (!out_path.empty()) write_text_file(out_path, out.dump(2) + "\n");
    if (!csv_path.empty()) write_text_file(csv_path, stab_report_to_csv(report));
    return 0;
}

int cmd_selftest(const std::string& suite, int n, std::uint64_t seed,
                 const std::string& out_path) {
    SelftestConfig config;
    config.suite = suite;
    config.n = n;
    config.seed = seed;
    SelftestReport report = run_selftest(config);
    json suites = json::array();
    std::printf("%-22s %8s %8s\n", "suite", "cases", "failed");
    for (const auto& res : report.suites) {
        std::printf("%-22s %8d %8d\n", res.name.c_str(), res.cases, res.failures);
        json sj{{"name", res.name}, {"cases", res.cases}, {"failures", res.failures}};
        if (!res.first_failure.empty()) sj["first_failure"] = res.first_failure;
        suites.push_back(std::move(sj));
    }
    std::printf("%s\n", report.ok ? "all suites passed" : "FAILURES");
    if (!out_path.empty()) {
        json out{{"version", kVersion}, {"seed", seed}, {"suites", suites},
                 {"ok", report.ok}};
        write_text_file(out_path, out.dump(2) + "\n");
    }
    return report.ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Implicit-equation norms, dual-set certificates, and "
                 "stabilization experiments on finite-support vectors"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    std::size_t budget = 0;
    try {
        budget = support_budget_default();
    } catch (const Error& e) {
        std::fprintf(stderr, "error code=%s msg=\"%s\"\n", e.code().c_str(), e.what());
        return 2;
    }

    // norm classical|modified
    CommonArgs norm_args;
    std::string norm_witness;
    auto* norm = app.add_subcommand("norm", "Evaluate a norm");
    norm->require_subcommand(1);
    bool norm_classical = false;
    for (const char* mode : {"classical", "modified"}) {
        auto* sub = norm->add_subcommand(mode);
        sub->add_option("--params", norm_args.params_path)->required();
        sub->add_option("--vector", norm_args.vector_path)->required();
        sub->add_option("--witness", norm_witness);
        sub->add_option("--tol", norm_args.tol);
        sub->callback([&norm_classical, mode] {
            norm_classical = std::string(mode) == "classical";
        });
    }

    // certify kM|K
    CommonArgs cert_args;
    std::string cert_out, cert_m;
    auto* certify = app.add_subcommand("certify", "Build a membership certificate");
    certify->require_subcommand(1);
    auto* certify_km = certify->add_subcommand("kM");
    certify_km->add_option("--params", cert_args.params_path)->required();
    certify_km->add_option("--vector", cert_args.vector_path)->required();
    certify_km->add_option("--out", cert_out);
    auto* certify_k = certify->add_subcommand("K");
    certify_k->add_option("--params", cert_args.params_path)->required();
    certify_k->add_option("--m", cert_m)->required();
    certify_k->add_option("--out", cert_out);

    CommonArgs dec_args;
    std::string dec_out;
    auto* decompose = app.add_subcommand("decompose", "Unit-mass block decomposition");
    decompose->add_option("--params", dec_args.params_path)->required();
    decompose->add_option("--vector", dec_args.vector_path)->required();
    decompose->add_option("--out", dec_out);

    std::string phi_params, phi_m;
    auto* phi_cmd = app.add_subcommand("phi", "Weight of an exponent sequence");
    phi_cmd->add_option("--params", phi_params)->required();
    phi_cmd->add_option("--m", phi_m)->required();

    CommonArgs split_args;
    std::string split_out;
    auto* split3_cmd = app.add_subcommand("split3", "Three-piece successive split");
    split3_cmd->add_option("--params", split_args.params_path)->required();
    split3_cmd->add_option("--vector", split_args.vector_path)->required();
    split3_cmd->add_option("--out", split_out);

    CommonArgs oracle_args;
    int oracle_depth = 0;
    bool oracle_classical = false;
    auto* oracle = app.add_subcommand("oracle", "Brute-force reference values");
    oracle->require_subcommand(1);
    for (const char* mode : {"classical", "modified"}) {
        auto* sub = oracle->add_subcommand(mode);
        sub->add_option("--params", oracle_args.params_path)->required();
        sub->add_option("--vector", oracle_args.vector_path)->required();
        sub->add_option("--depth", oracle_depth);
        sub->callback([&oracle_classical, mode] {
            oracle_classical = std::string(mode) == "classical";
        });
    }

    std::string exp_params, exp_basis, exp_gen = "unit", exp_out, exp_csv;
    int exp_count = 4, exp_trials = 100;
    std::uint64_t exp_seed = 0;
    double exp_eps = 0.01;
    auto* experiment = app.add_subcommand("experiment", "Stabilization experiment");
    experiment->require_subcommand(1);
    auto* stab = experiment->add_subcommand("stabilization");
    stab->add_option("--params", exp_params)->required();
    stab->add_option("--basis", exp_basis);
    stab->add_option("--basis-gen", exp_gen)->check(CLI::IsMember({"unit", "random"}));
    stab->add_option("--count", exp_count);
    stab->add_option("--trials", exp_trials);
    stab->add_option("--seed", exp_seed);
    stab->add_option("--eps", exp_eps);
    stab->add_option("--budget", budget);
    stab->add_option("--out", exp_out);
    stab->add_option("--csv", exp_csv);

    std::string st_suite, st_out;
    int st_n = 0;
    std::uint64_t st_seed = 0;
    auto* selftest = app.add_subcommand("selftest", "Run the invariant suites");
    selftest->add_option("--suite", st_suite);
    selftest->add_option("--n", st_n);
    selftest->add_option("--seed", st_seed);
    selftest->add_option("--out", st_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::fprintf(stderr, "error code=usage msg=\"%s\"\n", e.what());
        return 2;
    }

    try {
        if (norm->parsed()) return cmd_norm(norm_classical, norm_args, norm_witness, budget);
        if (certify->parsed()) {
            if (certify_km->parsed()) return cmd_certify_km(cert_args, cert_out);
            return cmd_certify_k(cert_args.params_path, cert_m, cert_out);
        }
        if (decompose->parsed()) return cmd_decompose(dec_args, dec_out);
        if (phi_cmd->parsed()) return cmd_phi(phi_params, phi_m);
        if (split3_cmd->parsed()) return cmd_split3(split_args, split_out);
        if (oracle->parsed()) return cmd_oracle(oracle_classical, oracle_args, oracle_depth);
        if (experiment->parsed())
            return cmd_experiment(exp_params, exp_basis, exp_gen, exp_count, exp_trials,
                                  exp_seed, exp_eps, budget, exp_out, exp_csv);
        if (selftest->parsed()) return cmd_selftest(st_suite, st_n, st_seed, st_out);
    } catch (const Error& e) {
        std::fprintf(stderr, "error code=%s msg=\"%s\"\n", e.code().c_str(), e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error code=internal msg=\"%s\"\n", e.what());
        return 2;
    }
    return 0;
}

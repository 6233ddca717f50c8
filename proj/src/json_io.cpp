#include "tsnorm/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tsnorm/version.hpp"

namespace tsnorm {

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json params_to_json(const Params& params) {
    return json{{"p", params.p}, {"q", params.q},         {"r", params.r},
                {"t", params.t}, {"s", params.s},         {"M", params.M},
                {"alpha", params.alpha}};
}

Params params_from_json(const json& j) {
    if (!j.is_object() || !j.contains("p") || !j.contains("r"))
        fail("bad_json", "params need numeric fields p and r");
    if (!j.at("p").is_number() || !j.at("r").is_number_integer())
        fail("bad_json", "params: p must be a number and r an integer");
    return derive_params(j.at("p").get<double>(), j.at("r").get<int>());
}

json sparse_to_json(const SparseVector& x) {
    json entries = json::array();
    for (const auto& [i, v] : x.entries()) entries.push_back(json::array({i, v}));
    return json{{"format", "sparse"}, {"entries", entries}};
}

json grid_to_json(const GridVector& x) {
    json entries = json::array();
    for (const auto& [i, ge] : x.entries())
        entries.push_back(json::array({i, ge.sign, ge.exponent}));
    return json{{"format", "grid"}, {"base", grid_base_name(x.base())},
                {"entries", entries}};
}

namespace {

GridBase grid_base_from_name(const std::string& name) {
    if (name == "alpha") return GridBase::Alpha;
    if (name == "s") return GridBase::S;
    if (name == "t") return GridBase::T;
    fail("bad_json", "unknown grid base '" + name + "'");
}

} // namespace

AnyVector vector_from_json(const json& j) {
    if (!j.is_object() || !j.contains("format"))
        fail("bad_json", "vector needs a 'format' field");
    AnyVector out;
    const std::string format = j.at("format").get<std::string>();
    const json& entries = j.contains("entries") ? j.at("entries") : json::array();
    if (!entries.is_array()) fail("bad_json", "vector entries must be an array");
    if (format == "sparse") {
        for (const auto& e : entries) {
            if (!e.is_array() || e.size() != 2)
                fail("bad_json", "sparse entry must be [index, value]");
            out.sparse.set(e.at(0).get<Index>(), e.at(1).get<double>());
        }
        return out;
    }
    if (format == "grid") {
        out.is_grid = true;
        out.grid = GridVector(grid_base_from_name(j.value("base", std::string())));
        for (const auto& e : entries) {
            if (!e.is_array() || e.size() != 3)
                fail("bad_json", "grid entry must be [index, sign, exponent]");
            out.grid.set(e.at(0).get<Index>(), e.at(1).get<int>(),
                         e.at(2).get<long long>());
        }
        return out;
    }
    fail("bad_json", "unknown vector format '" + format + "'");
}

SparseVector as_sparse(const AnyVector& v, const Params& params) {
    return v.is_grid ? v.grid.to_sparse(params) : v.sparse;
}

GridVector as_grid(const AnyVector& v, GridBase expected, const char* what) {
    if (!v.is_grid)
        fail("bad_vector", std::string(what) + " needs a grid-format vector");
    if (v.grid.base() != expected)
        fail("bad_vector", std::string(what) + " needs base '" +
                               grid_base_name(expected) + "', got '" +
                               grid_base_name(v.grid.base()) + "'");
    return v.grid;
}

json certificate_to_json(const Certificate& cert) {
    struct Conv {
        static json node(const CertNode& n) {
            if (n.is_leaf()) return json{{"leaf", json::array({n.sign, n.index})}};
            json children = json::array();
            for (const auto& c : n.children) children.push_back(node(c));
            return json{{"children", children}};
        }
    };
    return json{{"mode", cert_mode_name(cert.mode)}, {"node", Conv::node(cert.root)}};
}

Certificate certificate_from_json(const json& j) {
    struct Conv {
        static CertNode node(const json& nj) {
            if (!nj.is_object()) fail("bad_json", "certificate node must be an object");
            if (nj.contains("leaf")) {
                const json& leaf = nj.at("leaf");
                if (!leaf.is_array() || leaf.size() != 2)
                    fail("bad_json", "leaf must be [sign, index]");
                return CertNode::leaf(leaf.at(0).get<int>(), leaf.at(1).get<Index>());
            }
            if (nj.contains("children")) {
                std::vector<CertNode> children;
                for (const auto& cj : nj.at("children")) children.push_back(node(cj));
                return CertNode::internal(std::move(children));
            }
            fail("bad_json", "certificate node needs 'leaf' or 'children'");
        }
    };
    if (!j.is_object() || !j.contains("mode") || !j.contains("node"))
        fail("bad_json", "certificate needs 'mode' and 'node'");
    Certificate cert;
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "successive")
        cert.mode = CertMode::Successive;
    else if (mode == "disjoint")
        cert.mode = CertMode::Disjoint;
    else
        fail("bad_json", "unknown certificate mode '" + mode + "'");
    cert.root = Conv::node(j.at("node"));
    return cert;
}

json split_tree_to_json(const SplitTree& node) {
    if (node.is_leaf())
        return json{{"index", node.leaf_index}, {"value", node.value}};
    json children = json::array();
    for (const auto& c : node.children) children.push_back(split_tree_to_json(c));
    return json{{"lo", node.lo}, {"hi", node.hi}, {"value", node.value},
                {"children", children}};
}

json level_assignment_to_json(const LevelAssignment& witness) {
    json levels = json::array();
    for (const auto& [i, level] : witness.levels)
        levels.push_back(json::array({i, level}));
    return json{{"levels", levels}, {"value", witness.value}, {"slack", witness.slack}};
}

json stab_report_to_json(const StabReport& report) {
    const Params& params = report.params;
    const double m_root = std::pow(static_cast<double>(params.M), 1.0 / params.p);
    const double rho_lo = std::pow(4.0, -6.0);
    const double rho_hi = 3.0 * std::pow(4.0, 7.0) * (params.p + params.q);
    const double lambda_bound = 3.0 * std::pow(4.0, 13.0) * (params.p + params.q);
    const double stab_lo = std::pow(params.alpha, -4.0 * params.p);
    const double stab_hi = 6.0 * (params.p + params.q) * std::pow(params.alpha, 4.0);

    json rows = json::array();
    bool all_ok = true;
    for (const auto& row : report.rows) {
        // recompute every inequality from the raw values
        bool lower_ok = stab_lo * row.lp <= m_root * row.modified + 1e-9;
        bool upper_ok = m_root * row.modified <= stab_hi * row.lp + 1e-9;
        bool rho_ok = row.rho >= rho_lo - 1e-9 && row.rho <= rho_hi + 1e-9;
        all_ok = all_ok && lower_ok && upper_ok && rho_ok && row.grid_mass_ok;
        json coeffs = json::array();
        for (double a : row.coeffs) coeffs.push_back(a);
        json klevels = json::array();
        for (long long k : row.k_levels) klevels.push_back(k);
        json r{{"coeffs", coeffs},
               {"k_levels", klevels},
               {"lp_norm", row.lp},
               {"modified", row.modified},
               {"rho", row.rho},
               {"grid_mass_ok", row.grid_mass_ok},
               {"stab_lower_ok", lower_ok},
               {"stab_upper_ok", upper_ok},
               {"rho_in_bounds", rho_ok}};
        if (row.classical) r["classical"] = *row.classical;
        rows.push_back(std::move(r));
    }

    bool lambda_ok = report.lambda_hat <= lambda_bound + 1e-9;
    return json{{"version", kVersion},
                {"params", params_to_json(params)},
                {"config",
                 {{"seed", report.seed},
                  {"trials", report.trials},
                  {"eps", report.eps},
                  {"n_vectors", report.n_vectors},
                  {"support_budget", report.support_budget},
                  {"basis", report.basis_kind}}},
                {"total_support", report.total_support},
                {"trials", rows},
                {"summary",
                 {{"min_rho", report.min_rho},
                  {"max_rho", report.max_rho},
                  {"lambda_hat", report.lambda_hat},
                  {"rho_bounds", json::array({rho_lo, rho_hi})},
                  {"lambda_bound", lambda_bound},
                  {"stab_bounds", json::array({stab_lo, stab_hi})},
                  {"chain_bounds",
                   json::array({std::pow(params.alpha, -4.0 * params.p - 2.0),
                                6.0 * (params.p + params.q) *
                                    std::pow(params.alpha, 6.0)})},
                  {"all_ok", all_ok && lambda_ok}}}};
}

std::string stab_report_to_csv(const StabReport& report) {
    const Params& params = report.params;
    const double rho_lo = std::pow(4.0, -6.0);
    const double rho_hi = 3.0 * std::pow(4.0, 7.0) * (params.p + params.q);
    std::ostringstream os;
    os << "trial,lp_norm,classical,modified,rho,within_bounds\n";
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const auto& row = report.rows[i];
        bool ok = row.rho >= rho_lo - 1e-9 && row.rho <= rho_hi + 1e-9;
        os << i << ',' << format_g17(row.lp) << ',';
        if (row.classical) os << format_g17(*row.classical);
        os << ',' << format_g17(row.modified) << ',' << format_g17(row.rho) << ','
           << (ok ? 1 : 0) << '\n';
    }
    return os.str();
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("bad_file", "cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        fail("bad_json", "cannot parse '" + path + "': " + e.what());
    }
    return j;
}

void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("bad_file", "cannot open '" + path + "' for writing");
    out << contents;
    if (!out) fail("bad_file", "short write to '" + path + "'");
}

} // namespace tsnorm

#include "tsnorm/stabilization.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "tsnorm/classical_norm.hpp"
#include "tsnorm/kraft.hpp"
#include "tsnorm/rng.hpp"

namespace tsnorm {

namespace {

void require_base(const GridVector& x, GridBase base, const char* what) {
    if (x.base() != base)
        fail("bad_vector", std::string(what) + " expects a base-" +
                               grid_base_name(base) + " vector");
}

// Exact membership in the base-s dual-shape set: sum r^(-j) <= 1 over levels.
bool ns_p_membership(const GridVector& x, const Params& params) {
    KraftSum kraft(params.r);
    for (const auto& [i, ge] : x.entries()) {
        if (ge.exponent > 0) return false;
        kraft.add(-ge.exponent);
        if (kraft.exceeds_one()) return false;
    }
    return true;
}

} // namespace

ComparisonWitness check_comparing1(const GridVector& x, const Params& params) {
    require_base(x, GridBase::S, "check_comparing1");
    if (!ns_p_membership(x, params))
        fail("not_member", "vector has p-mass above 1");

    ComparisonWitness out;
    // (s^j)^(p/q) = t^j: the dual vector keeps the exponents, over base t.
    out.dual_witness = x.retagged(GridBase::T);

    // <x, y> = sum s^j t^j = sum r^j = ||x||_p^p, evaluated from exponents.
    double pairing = 0.0;
    for (const auto& [i, ge] : x.entries())
        pairing += std::pow(static_cast<double>(params.r),
                            static_cast<double>(ge.exponent));
    out.pairing = pairing;

    ModifiedResult mod = modified_norm(x.to_sparse(params), params);
    out.modified_value = mod.value;
    out.holds = mod.value + 1e-9 >= pairing;
    return out;
}

bool check_comparing2(const GridVector& x, const Params& params) {
    require_base(x, GridBase::S, "check_comparing2");
    if (x.empty()) return true;
    double mass_p = x.power_mass(params.p, params);
    double bound = 1.0 + mass_p / params.t;
    ModifiedResult mod = modified_norm(x.to_sparse(params), params);
    return mod.value <= bound + 1e-9;
}

namespace {

std::vector<long long> averaging_block_lengths(const Params& params, double eps, int* l_out) {
    if (!(eps > 0.0) || eps >= 1.0) fail("bad_eps", "eps must lie in (0, 1)");
    // least l with r^l >= 1/eps, so floor(b)/b >= 1 - eps for every block length b
    int l = 0;
    double pw = 1.0;
    while (pw < 1.0 / eps) {
        pw *= params.r;
        ++l;
    }
    if (l_out) *l_out = l;
    std::vector<long long> lengths;
    for (int k = 0; k < params.M; ++k) {
        // alpha^((Ml+k)p) = r^l * alpha^(kp)
        double v = std::pow(static_cast<double>(params.r), static_cast<double>(l)) *
                   std::pow(params.alpha, static_cast<double>(k) * params.p);
        lengths.push_back(static_cast<long long>(std::floor(v)));
    }
    return lengths;
}

std::vector<double> level_mass_profile(const GridVector& x, const Params& params) {
    std::vector<double> out(static_cast<std::size_t>(params.M), 0.0);
    for (const auto& [i, ge] : x.entries()) {
        long long m = ((ge.exponent % params.M) + params.M) % params.M;
        out[static_cast<std::size_t>(m)] +=
            std::pow(params.alpha, params.p * static_cast<double>(ge.exponent));
    }
    return out;
}

} // namespace

std::size_t averaging_required_count(const Params& params, double eps) {
    std::size_t total = 0;
    for (long long n : averaging_block_lengths(params, eps, nullptr))
        total += static_cast<std::size_t>(n);
    return total;
}

AveragingResult approxim_construct(const BlockSequence& inputs, double eps,
                                   const Params& params, int n_out,
                                   bool per_average) {
    if (n_out < 1) fail("bad_count", "n_out must be >= 1");
    int l = 0;
    std::vector<long long> lengths = averaging_block_lengths(params, eps, &l);
    std::size_t per_output = 0;
    for (long long n : lengths) per_output += static_cast<std::size_t>(n);
    const std::size_t required = per_output * static_cast<std::size_t>(n_out);

    if (!grid_is_block(inputs.vectors))
        fail("bad_vector", "inputs must form a block sequence");

    const double lo_norm = std::pow(params.alpha, -2.0);
    const double hi_norm = std::pow(params.alpha, -1.0);
    std::vector<std::vector<double>> profiles;
    profiles.reserve(inputs.vectors.size());
    for (std::size_t n = 0; n < inputs.vectors.size(); ++n) {
        const GridVector& x = inputs.vectors[n];
        require_base(x, GridBase::Alpha, "approxim_construct");
        double norm = std::pow(x.power_mass(params.p, params), 1.0 / params.p);
        if (norm < lo_norm * (1 - 1e-9) || norm > hi_norm * (1 + 1e-9))
            fail("bad_vector", "input " + std::to_string(n + 1) +
                                   " violates the norm hypothesis");
        profiles.push_back(level_mass_profile(x, params));
    }

    // Profile binning stands in for passing to a subsequence: bin by
    // floor(mass/eps) per level, pick the first-largest bin.
    std::map<std::vector<long long>, std::vector<std::size_t>> bins;
    std::vector<std::vector<long long>> bin_order;
    for (std::size_t n = 0; n < profiles.size(); ++n) {
        std::vector<long long> key;
        key.reserve(profiles[n].size());
        for (double mass : profiles[n])
            key.push_back(static_cast<long long>(std::floor(mass / eps)));
        auto [it, fresh] = bins.emplace(key, std::vector<std::size_t>{});
        if (fresh) bin_order.push_back(key);
        it->second.push_back(n);
    }
    const std::vector<std::size_t>* selected = nullptr;
    for (const auto& key : bin_order) {
        const auto& members = bins.at(key);
        if (!selected || members.size() > selected->size()) selected = &members;
    }
    if (!selected || selected->size() < required) {
        std::size_t have = selected ? selected->size() : 0;
        fail("insufficient_input",
             "need " + std::to_string(required) + " inputs with matching profiles, " +
                 "largest bin holds " + std::to_string(have));
    }

    AveragingResult out;
    out.profile.eps = eps;
    out.profile.l = l;
    out.profile.block_lengths = lengths;
    out.profile.selected = selected->size();
    out.profile.targets.assign(static_cast<std::size_t>(params.M), 0.0);
    for (std::size_t n : *selected)
        for (int m = 0; m < params.M; ++m)
            out.profile.targets[static_cast<std::size_t>(m)] =
                std::max(out.profile.targets[static_cast<std::size_t>(m)],
                         profiles[n][static_cast<std::size_t>(m)]);

    const double conclusion_lo = std::pow(params.alpha, -3.0);
    std::size_t cursor = 0;
    for (int out_i = 0; out_i < n_out; ++out_i) {
        std::vector<GridVector> averages;
        std::vector<std::vector<double>> c_rows;
        for (int k = 0; k < params.M; ++k) {
            const long long count = lengths[static_cast<std::size_t>(k)];
            const long long shift = -(static_cast<long long>(params.M) * l + k);
            std::vector<GridVector> scaled;
            scaled.reserve(static_cast<std::size_t>(count));
            for (long long j = 0; j < count; ++j, ++cursor)
                scaled.push_back(
                    inputs.vectors[(*selected)[cursor]].scaled_by_pow(shift));
            GridVector y_k = grid_disjoint_sum(scaled);

            double factor = static_cast<double>(count) /
                            std::pow(params.alpha,
                                     static_cast<double>(-(shift)) * params.p);
            std::vector<double> c_row(static_cast<std::size_t>(params.M), 0.0);
            std::vector<double> masses = level_mass_profile(y_k, params);
            for (int m = 0; m < params.M; ++m) {
                double c = factor *
                           out.profile.targets[static_cast<std::size_t>((m + k) % params.M)];
                c_row[static_cast<std::size_t>(m)] = c;
                double mass = masses[static_cast<std::size_t>(m)];
                if (mass > c + 1e-9 || c - mass >= eps + 1e-9)
                    fail("bound_violation",
                         "scaled target drifted from the level mass at (k=" +
                             std::to_string(k) + ", m=" + std::to_string(m) + ")");
                if (per_average) {
                    double norm = std::pow(mass, 1.0 / params.p);
                    if (norm < conclusion_lo * (1 - 1e-9) || norm > 1.0 + 1e-9)
                        fail("bound_violation",
                             "level mass outside [alpha^-3, 1] at (k=" + std::to_string(k) +
                                 ", m=" + std::to_string(m) +
                                 "); eps too large or profiles too thin");
                }
            }
            c_rows.push_back(std::move(c_row));
            averages.push_back(std::move(y_k));
        }

        GridVector sum = grid_disjoint_sum(averages);
        std::vector<double> sum_masses = level_mass_profile(sum, params);
        for (int m = 0; m < params.M; ++m) {
            double norm = std::pow(sum_masses[static_cast<std::size_t>(m)], 1.0 / params.p);
            if (norm < conclusion_lo * (1 - 1e-9) || norm > 1.0 + 1e-9)
                fail("bound_violation",
                     "summed level mass outside [alpha^-3, 1] at m=" + std::to_string(m) +
                         "; eps too large");
        }

        out.averages.push_back(std::move(averages));
        out.sums.push_back(std::move(sum));
        if (out_i == 0) out.profile.c = std::move(c_rows);
    }
    return out;
}

StabTrial stab_verify(const std::vector<GridVector>& seq, std::vector<double> coeffs,
                      const Params& params, const StabOptions& opts) {
    if (seq.empty()) fail("bad_vector", "empty sequence");
    if (coeffs.size() != seq.size())
        fail("bad_count", "coefficient count does not match the sequence");
    if (!grid_is_block(seq)) fail("bad_vector", "sequence is not a block sequence");

    const double hyp_lo = std::pow(params.alpha, -3.0);
    for (std::size_t n = 0; n < seq.size(); ++n) {
        require_base(seq[n], GridBase::Alpha, "stab_verify");
        std::vector<double> masses = level_mass_profile(seq[n], params);
        for (int m = 0; m < params.M; ++m) {
            double norm = std::pow(masses[static_cast<std::size_t>(m)], 1.0 / params.p);
            if (norm < hyp_lo * (1 - 1e-9) || norm > 1.0 + 1e-9)
                fail("bound_violation", "hypothesis fails at (n=" + std::to_string(n + 1) +
                                            ", m=" + std::to_string(m) + ")");
        }
    }

    StabTrial trial;
    double mass = 0.0;
    for (double a : coeffs) {
        if (!(a > 0.0)) fail("bad_coeffs", "coefficients must be positive");
        mass += std::pow(a, params.p);
    }
    const double scale = std::pow(mass, -1.0 / params.p);
    for (double& a : coeffs) a *= scale;
    trial.coeffs = coeffs;

    // grid approximant: quantize each coefficient to alpha^(-k), k minimal
    const double log_alpha = std::log(params.alpha);
    GridVector approx(GridBase::Alpha);
    for (std::size_t n = 0; n < seq.size(); ++n) {
        double a = coeffs[n];
        long long k = static_cast<long long>(std::ceil(-std::log(a) / log_alpha - 1e-12));
        if (k < 0) k = 0;
        // alpha^(-k) <= a < alpha^(-k+1)
        while (std::pow(params.alpha, static_cast<double>(-k)) > a * (1 + 1e-12)) ++k;
        while (k > 0 &&
               std::pow(params.alpha, static_cast<double>(-(k - 1))) <= a * (1 + 1e-12))
            --k;
        trial.k_levels.push_back(k);
        for (const auto& [i, ge] : seq[n].entries()) {
            if (approx.entries().count(i)) fail("bad_vector", "sequence supports overlap");
            approx.set(i, ge.sign, ge.exponent - k);
        }
    }

    trial.grid_mass_ok = true;
    const double inter_lo = std::pow(params.alpha, -4.0);
    std::vector<double> approx_masses = level_mass_profile(approx, params);
    for (int m = 0; m < params.M; ++m) {
        double norm = std::pow(approx_masses[static_cast<std::size_t>(m)], 1.0 / params.p);
        if (norm < inter_lo * (1 - 1e-9) || norm > 1.0 + 1e-9) trial.grid_mass_ok = false;
    }

    // exact-coefficient combination
    SparseVector combo;
    for (std::size_t n = 0; n < seq.size(); ++n) {
        SparseVector xn = seq[n].to_sparse(params);
        for (const auto& [i, v] : xn.entries()) combo.set(i, coeffs[n] * v);
    }

    trial.lp = lp_norm(combo, params.p);
    ModifiedResult mod = modified_norm(combo, params, opts.tol);
    trial.modified = mod.value;
    if (combo.support_size() <= opts.classical_cap)
        trial.classical = classical_norm(combo, params).value;

    const double m_root = std::pow(static_cast<double>(params.M), 1.0 / params.p);
    const double lower = std::pow(params.alpha, -4.0 * params.p) * trial.lp;
    const double upper =
        6.0 * (params.p + params.q) * std::pow(params.alpha, 4.0) * trial.lp;
    trial.stab_lower_ok = lower <= m_root * trial.modified + 1e-9;
    trial.stab_upper_ok = m_root * trial.modified <= upper + 1e-9;
    trial.rho = std::pow(std::log2(static_cast<double>(params.r)), 1.0 / params.p) *
                trial.modified / trial.lp;
    return trial;
}

std::vector<SparseVector> unit_basis(std::size_t count) {
    std::vector<SparseVector> out;
    out.reserve(count);
    for (std::size_t n = 1; n <= count; ++n) {
        SparseVector e;
        e.set(static_cast<Index>(n), 1.0);
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<SparseVector> random_block_basis(std::uint64_t seed, std::size_t count,
                                             int max_width) {
    if (max_width < 1) fail("bad_count", "max_width must be >= 1");
    SplitMix64 rng = SplitMix64::fork(seed, 0xb10c);
    std::vector<SparseVector> out;
    out.reserve(count);
    Index next = 1;
    for (std::size_t n = 0; n < count; ++n) {
        int width = static_cast<int>(rng.range(1, max_width));
        SparseVector x;
        for (int j = 0; j < width; ++j) {
            x.set(next, 0.25 + 0.75 * rng.uniform01_pos());
            ++next;
        }
        next += static_cast<Index>(rng.range(0, 2)); // occasional gaps
        out.push_back(std::move(x));
    }
    return out;
}

std::size_t pipeline_required_count(const Params& params, const PipelineOptions& opts) {
    return averaging_required_count(params, opts.eps) *
           static_cast<std::size_t>(opts.n_vectors);
}

StabReport stabilization_pipeline(const std::vector<SparseVector>& basis,
                                  const Params& params, int trials,
                                  std::uint64_t seed, const PipelineOptions& opts) {
    if (trials < 1) fail("bad_count", "trials must be >= 1");
    if (!is_block(basis)) fail("bad_vector", "basis must be a block sequence");

    // normalize to ||u_n||_p = alpha^(-3/2), then snap to the alpha grid
    const double target = std::pow(params.alpha, -1.5);
    BlockSequence grid_inputs;
    grid_inputs.vectors.reserve(basis.size());
    for (const auto& u : basis) {
        double norm = lp_norm(u, params.p);
        if (!(norm > 0.0)) fail("bad_vector", "basis vectors must be nonzero");
        SparseVector scaled;
        for (const auto& [i, v] : u.entries()) scaled.set(i, v * target / norm);
        grid_inputs.vectors.push_back(
            quantize_to_grid(scaled, params.alpha, GridBase::Alpha));
    }

    AveragingResult avg =
        approxim_construct(grid_inputs, opts.eps, params, opts.n_vectors,
                           /*per_average=*/false);

    StabReport report;
    report.params = params;
    report.seed = seed;
    report.trials = trials;
    report.eps = opts.eps;
    report.n_vectors = opts.n_vectors;
    report.support_budget = opts.support_budget;

    std::size_t total_support = 0;
    for (const auto& y : avg.sums) total_support += y.support_size();
    report.total_support = total_support;
    if (total_support > opts.support_budget)
        fail("budget_exceeded",
             "total support " + std::to_string(total_support) +
                 " exceeds the budget " + std::to_string(opts.support_budget));

    for (int trial = 0; trial < trials; ++trial) {
        SplitMix64 rng = SplitMix64::fork(seed, static_cast<std::uint64_t>(trial));
        std::vector<double> coeffs;
        coeffs.reserve(avg.sums.size());
        for (std::size_t n = 0; n < avg.sums.size(); ++n)
            coeffs.push_back(std::pow(rng.uniform01_pos(), 1.0 / params.p));
        report.rows.push_back(stab_verify(avg.sums, std::move(coeffs), params, opts.stab));
    }

    report.min_rho = report.rows.front().rho;
    report.max_rho = report.rows.front().rho;
    for (const auto& row : report.rows) {
        report.min_rho = std::min(report.min_rho, row.rho);
        report.max_rho = std::max(report.max_rho, row.rho);
    }
    report.lambda_hat = report.max_rho / report.min_rho;
    report.rho_lower_bound = std::pow(4.0, -6.0);
    report.rho_upper_bound = 3.0 * std::pow(4.0, 7.0) * (params.p + params.q);
    report.lambda_bound = 3.0 * std::pow(4.0, 13.0) * (params.p + params.q);
    report.chain_lower = std::pow(params.alpha, -4.0 * params.p - 2.0);
    report.chain_upper = 6.0 * (params.p + params.q) * std::pow(params.alpha, 6.0);
    return report;
}

} // namespace tsnorm

#include "lossyosc/reports.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

#include "lossyosc/eigensolver.hpp"

namespace lossyosc {

namespace {

using nlohmann::ordered_json;

// Adding 0.0 folds negative zeros so output does not depend on their sign.
ordered_json complex_json(cplx z) {
    return ordered_json{{"re", z.real() + 0.0}, {"im", z.imag() + 0.0}};
}

}  // namespace

std::string spectrum_json(const SystemParams& params, std::size_t max_total) {
    const ModeSpectrum s = heff_spectrum(params);
    ordered_json j;
    j["modes"] = params.n_modes();
    j["max_total"] = max_total;
    j["lambdas"] = ordered_json::array();
    for (cplx l : s.lambdas) j["lambdas"].push_back(complex_json(l));
    j["liouvillian_eigenvalues"] = ordered_json::array();
    for (cplx l : liouvillian_eigenvalue_multiset(s)) {
        j["liouvillian_eigenvalues"].push_back(complex_json(l));
    }
    j["ep_condition"] = s.ep_condition;

    struct Entry {
        MultiIndex alpha, beta;
        cplx mu;
    };
    std::vector<Entry> entries;
    const auto idx = multi_indices(params.n_modes(), max_total);
    for (const auto& a : idx) {
        for (const auto& b : idx) entries.push_back({a, b, ladder_exponent(a, b, s)});
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const Entry& x, const Entry& y) { return x.mu.real() > y.mu.real(); });
    j["exponents"] = ordered_json::array();
    const Entry* slowest = nullptr;
    for (const Entry& e : entries) {
        ordered_json row;
        row["alpha"] = e.alpha;
        row["beta"] = e.beta;
        row["re"] = e.mu.real();
        row["im"] = e.mu.imag();
        j["exponents"].push_back(std::move(row));
        if (!slowest && std::abs(e.mu) > 1e-12) slowest = &e;
    }
    j["slowest_nonzero_exponent"] =
        slowest ? complex_json(slowest->mu) : ordered_json(nullptr);
    return j.dump(2);
}

std::string structure_json(const DecompositionReport& r) {
    ordered_json j;
    j["modes"] = r.n_modes;
    j["dims"] = {{"total", r.total},
                 {"nilpotent", r.nilpotent},
                 {"abelian", r.abelian},
                 {"sl_left", r.sl_left},
                 {"sl_right", r.sl_right}};
    j["closure_residual"] = r.closure_residual;
    j["jacobi_residual"] = r.jacobi_residual;
    j["ideals"] = {{"left_right_commutator", r.ideal_commutator},
                   {"radical_ideal_residual", r.radical_ideal_residual},
                   {"trace_residual", r.trace_residual},
                   {"derived_series_length", r.derived_series_length}};
    j["killing"] = {{"rank", r.killing_rank},
                    {"rank_sl_left", r.killing_rank_left},
                    {"rank_sl_right", r.killing_rank_right},
                    {"null_dimension", r.total - r.killing_rank}};
    j["radical_tags"] = r.radical_tags;
    return j.dump(2);
}

}  // namespace lossyosc

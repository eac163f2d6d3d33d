#include "mdiqrng/report.hpp"

#include <json.hpp>

namespace mdiqrng::report {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json interval_json(const decoy::Interval& iv) {
    return ordered_json::array({iv.lower, iv.upper});
}

ordered_json bounds_json(const entropy::CertReport& rep) {
    ordered_json b;
    for (qmath::ProbeId j : qmath::kAllProbes) {
        const int i = qmath::probe_index(j);
        ordered_json probe;
        probe["p_mu"] = interval_json(rep.bounds.mu_rate[i]);
        if (rep.bounds.has_nu[i]) probe["p_nu"] = interval_json(rep.bounds.nu_rate[i]);
        probe["p1"] = interval_json(rep.bounds.single_photon[i]);
        b[qmath::probe_name(j)] = probe;
    }
    ordered_json params;
    params["a1"] = interval_json(rep.params.a1);
    params["nx"] = interval_json(rep.params.nx);
    params["ny"] = interval_json(rep.params.ny);
    params["nz"] = interval_json(rep.params.nz);
    b["params"] = params;
    return b;
}

}  // namespace

std::string cert_report_json(const entropy::CertReport& rep) {
    ordered_json j;
    j["h_min_bits_per_pulse"] = rep.h_min;
    j["bit_rate_hz"] = rep.bit_rate_hz;
    j["mu"] = rep.mu;
    j["nu"] = rep.nu;
    j["a1_lower"] = rep.a1_lower;
    j["nynz_sq_lower"] = rep.nynz_sq_lower;
    if (rep.fidelity_lower) {
        j["fidelity_lower"] = *rep.fidelity_lower;
    } else {
        j["fidelity_lower"] = nullptr;
    }
    j["no_randomness"] = rep.no_randomness;
    j["epsilon_per_use"] = rep.epsilon_per_use;
    j["epsilon_total"] = rep.epsilon_total;
    j["chernoff_uses"] = rep.chernoff_uses;
    j["degenerate_cells"] = rep.bounds.degenerate_cells;
    j["clamp_events"] = rep.bounds.clamp_events;
    j["probe_selection_consumption_bits_per_s"] = rep.consumption_bits_per_s;
    j["flags"] = rep.flags;
    j["bounds"] = bounds_json(rep);
    return j.dump(2) + "\n";
}

std::string intensity_search_json(const entropy::IntensitySearchResult& res) {
    ordered_json j;
    j["mu_star"] = res.mu_star;
    j["nu_star"] = res.nu_star;
    j["h_star_bits_per_pulse"] = res.h_star;
    j["all_zero"] = res.all_zero;
    j["grid_points_evaluated"] = res.trace.size();
    return j.dump(2) + "\n";
}

std::string selftest_json(const extract::SelfTestReport& rep, std::size_t input_bits,
                          std::size_t output_bits, bool test_only_seed) {
    ordered_json j;
    j["monobit_p"] = rep.monobit_p;
    j["chisq_byte_p"] = rep.chisq_byte_p;
    j["input_bits"] = input_bits;
    j["output_bits"] = output_bits;
    j["test_only_seed"] = test_only_seed;
    return j.dump(2) + "\n";
}

}  // namespace mdiqrng::report

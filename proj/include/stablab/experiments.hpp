#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace stablab {

// Outcome of one verification experiment: a pass flag, human-readable
// assertion lines, structured metrics, and CSV-ready rows.
struct CheckOutcome {
    std::string name;
    bool passed = false;
    std::vector<std::string> details;
    nlohmann::json data;
    std::vector<std::string> csv_header;
    std::vector<std::vector<double>> csv_rows;
};

struct AcceptanceOptions {
    std::uint64_t seed = 20260808ull;
    unsigned threads = 0;
    std::size_t cf_samples = 100000;
    std::size_t uniqueness_paths = 2000;
    std::size_t krylov_paths = 20000;
    std::size_t conjugation_paths = 64;
    // Named threshold overrides (keys documented per experiment); anything
    // not present uses the built-in default.
    std::map<std::string, double> thresholds;

    double thr(const std::string& key, double def) const {
        auto it = thresholds.find(key);
        return it == thresholds.end() ? def : it->second;
    }
};

CheckOutcome check_sampler_fidelity(const AcceptanceOptions& opts);
CheckOutcome check_density_identities(const AcceptanceOptions& opts);
CheckOutcome check_semigroup_rates(const AcceptanceOptions& opts);
CheckOutcome check_shift_estimate(const AcceptanceOptions& opts);
CheckOutcome check_indicator_sobolev(const AcceptanceOptions& opts);
CheckOutcome check_pide_solver(const AcceptanceOptions& opts);
CheckOutcome check_lambda_decay_rates(const AcceptanceOptions& opts);
CheckOutcome check_zvonkin_invariants(const AcceptanceOptions& opts);
CheckOutcome check_conjugation(const AcceptanceOptions& opts);
CheckOutcome check_uniqueness_coupling(const AcceptanceOptions& opts);
CheckOutcome check_krylov_window(const AcceptanceOptions& opts);
CheckOutcome check_generator_crosscheck(const AcceptanceOptions& opts);

// All twelve checks in criterion order.
std::vector<CheckOutcome> run_acceptance_suite(const AcceptanceOptions& opts);

// Single-law variants used by the CLI when a law file is supplied.
class StableLaw;
CheckOutcome sampler_check_single(const StableLaw& law, const AcceptanceOptions& opts);
CheckOutcome zvonkin_build_for_law(const StableLaw& law, const AcceptanceOptions& opts);

} // namespace stablab

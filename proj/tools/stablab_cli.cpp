// Experiment driver: parses a flat key=value config, runs one named
// experiment, writes results.csv / report.json / summary.txt plus a config
// echo, and exits 0 only when every assertion passed.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stablab/errors.hpp"
#include "stablab/experiments.hpp"
#include "stablab/io.hpp"
#include "stablab/stable_law.hpp"
#include "stablab/version.hpp"

namespace {

using stablab::AcceptanceOptions;
using stablab::CheckOutcome;
using stablab::ConfigError;

const std::vector<std::string> kExperiments = {
    "sampler_check",  "smoothing_rates",     "sobolev_indicator",
    "pide_semilinear", "pide_lambda_decay",  "zvonkin_build",
    "uniqueness_coupling", "krylov_ratio",   "conjugation_check"};

struct Config {
    std::string experiment;
    std::string law_file;
    AcceptanceOptions opts;
    std::map<std::string, std::string> raw; // echo
};

Config parse_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path);
    const std::set<std::string> known = {"experiment",      "seed",
                                         "threads",         "law_file",
                                         "cf_samples",      "uniqueness_paths",
                                         "krylov_paths",    "conjugation_paths"};
    Config cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
            continue;
        }
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
        cfg.raw[key] = value;
        if (key.rfind("tol.", 0) == 0) {
            cfg.opts.thresholds[key.substr(4)] = std::stod(value);
            continue;
        }
        if (!known.count(key))
            throw ConfigError("unknown config key '" + key + "' (line " +
                              std::to_string(lineno) + ")");
        if (key == "experiment") cfg.experiment = value;
        else if (key == "seed") cfg.opts.seed = std::stoull(value);
        else if (key == "threads") cfg.opts.threads = static_cast<unsigned>(std::stoul(value));
        else if (key == "law_file") cfg.law_file = value;
        else if (key == "cf_samples") cfg.opts.cf_samples = std::stoull(value);
        else if (key == "uniqueness_paths") cfg.opts.uniqueness_paths = std::stoull(value);
        else if (key == "krylov_paths") cfg.opts.krylov_paths = std::stoull(value);
        else if (key == "conjugation_paths") cfg.opts.conjugation_paths = std::stoull(value);
    }
    if (cfg.experiment.empty()) throw ConfigError("config is missing the 'experiment' key");
    bool found = false;
    for (const auto& name : kExperiments) found = found || name == cfg.experiment;
    if (!found) throw ConfigError("unknown experiment name '" + cfg.experiment + "'");
    return cfg;
}

std::vector<CheckOutcome> run_experiment(const Config& cfg) {
    const auto& o = cfg.opts;
    const bool has_law = !cfg.law_file.empty();
    auto load_law = [&] { return stablab::StableLaw::from_text(stablab::io::read_text(cfg.law_file)); };

    if (cfg.experiment == "sampler_check") {
        if (has_law) return {stablab::sampler_check_single(load_law(), o)};
        return {stablab::check_sampler_fidelity(o), stablab::check_density_identities(o)};
    }
    if (cfg.experiment == "smoothing_rates")
        return {stablab::check_semigroup_rates(o), stablab::check_shift_estimate(o)};
    if (cfg.experiment == "sobolev_indicator") return {stablab::check_indicator_sobolev(o)};
    if (cfg.experiment == "pide_semilinear")
        return {stablab::check_pide_solver(o), stablab::check_generator_crosscheck(o)};
    if (cfg.experiment == "pide_lambda_decay") return {stablab::check_lambda_decay_rates(o)};
    if (cfg.experiment == "zvonkin_build") {
        if (has_law) return {stablab::zvonkin_build_for_law(load_law(), o)};
        return {stablab::check_zvonkin_invariants(o)};
    }
    if (cfg.experiment == "uniqueness_coupling") return {stablab::check_uniqueness_coupling(o)};
    if (cfg.experiment == "krylov_ratio") return {stablab::check_krylov_window(o)};
    if (cfg.experiment == "conjugation_check") return {stablab::check_conjugation(o)};
    throw ConfigError("unknown experiment name '" + cfg.experiment + "'");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(stablab::version_string) +
                 " - stable-process / nonlocal-PDE experiment driver"};
    std::string config_path, out_dir = ".";
    bool list = false;
    std::uint64_t seed_override = 0;
    bool seed_given = false;
    unsigned threads_override = 0;
    bool threads_given = false;

    app.add_option("--config", config_path, "experiment config file (key = value lines)");
    app.add_option("--out", out_dir, "output directory");
    app.add_flag("--list", list, "print the experiment registry and exit");
    auto* seed_opt = app.add_option("--seed", seed_override, "override the config seed");
    auto* thr_opt = app.add_option("--threads", threads_override, "worker thread count");
    CLI11_PARSE(app, argc, argv);
    seed_given = seed_opt->count() > 0;
    threads_given = thr_opt->count() > 0;

    if (list) {
        for (const auto& name : kExperiments) std::printf("%s\n", name.c_str());
        return 0;
    }

    try {
        if (config_path.empty()) throw ConfigError("--config is required (or use --list)");
        Config cfg = parse_config(config_path);
        if (seed_given) cfg.opts.seed = seed_override;
        if (threads_given) cfg.opts.threads = threads_override;

        const auto outcomes = run_experiment(cfg);

        std::filesystem::create_directories(out_dir);
        const auto dir = std::filesystem::path(out_dir);

        // results.csv: byte-stable body.
        std::vector<std::string> header{"outcome_index"};
        if (!outcomes.empty())
            header.insert(header.end(), outcomes.front().csv_header.begin(),
                          outcomes.front().csv_header.end());
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < outcomes.size(); ++i)
            for (const auto& row : outcomes[i].csv_rows) {
                std::vector<double> full{static_cast<double>(i)};
                full.insert(full.end(), row.begin(), row.end());
                rows.push_back(full);
            }
        stablab::io::write_csv((dir / "results.csv").string(), header, rows);

        // report.json: structured data, config echo, wall-clock stamp.
        nlohmann::json report;
        report["version"] = stablab::version_string;
        report["experiment"] = cfg.experiment;
        report["seed"] = cfg.opts.seed;
        report["timestamp_unix"] =
            std::chrono::duration_cast<std::chrono::seconds>(
                std::chrono::system_clock::now().time_since_epoch())
                .count();
        nlohmann::json echo;
        for (const auto& [k, v] : cfg.raw) echo[k] = v;
        report["config"] = echo;
        bool all_passed = true;
        for (const auto& o : outcomes) {
            report["outcomes"][o.name] = {{"passed", o.passed}, {"data", o.data}};
            all_passed = all_passed && o.passed;
        }
        stablab::io::write_text((dir / "report.json").string(), report.dump(2) + "\n");

        // Config echo next to the outputs.
        {
            std::ostringstream ss;
            for (const auto& [k, v] : cfg.raw) ss << k << " = " << v << "\n";
            ss << "# resolved_seed = " << cfg.opts.seed << "\n";
            stablab::io::write_text((dir / "config_echo.ini").string(), ss.str());
        }

        // Human summary, and the same on stdout.
        std::ostringstream summary;
        for (const auto& o : outcomes) {
            summary << (o.passed ? "PASS " : "FAIL ") << o.name << "\n";
            for (const auto& line : o.details) summary << line << "\n";
        }
        summary << (all_passed ? "PASS" : "FAIL") << " " << cfg.experiment << "\n";
        stablab::io::write_text((dir / "summary.txt").string(), summary.str());
        std::fputs(summary.str().c_str(), stdout);
        return all_passed ? 0 : 1;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error while running experiment: %s\n", e.what());
        return 1;
    }
}

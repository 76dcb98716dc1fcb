// igl: run experiments, aggregate reports, evaluate theory calculators,
// and check tabular environments.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "igl/analysis.hpp"
#include "igl/config.hpp"
#include "igl/e2g.hpp"
#include "igl/envs.hpp"
#include "igl/experiment.hpp"

namespace {

int cmd_run(const std::string& config_path, const std::string& algo, const std::vector<std::uint64_t>& seeds,
            const std::string& out, const std::string& env) {
    igl::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = igl::load_experiment_config(config_path);
    igl::apply_env_overrides(cfg);
    if (!algo.empty()) cfg.algo = algo;
    if (!env.empty()) cfg.env = env;
    if (!seeds.empty()) cfg.seeds = seeds;
    if (!out.empty()) cfg.out_dir = out;
    auto res = igl::run_experiment(cfg);
    igl::write_report(res.manifest, res.records, cfg.out_dir);
    std::printf("%-8s %-9s %10s %12s %12s %8s\n", "seed", "status", "accuracy", "final_value", "regret", "restarts");
    for (const auto& s : res.manifest.seeds) {
        if (s.ok)
            std::printf("%-8llu %-9s %10.2f %12.4f %12.1f %8u\n", static_cast<unsigned long long>(s.seed), "ok",
                        s.accuracy, s.final_value, s.final_regret, s.restarts);
        else
            std::printf("%-8llu %-9s %s\n", static_cast<unsigned long long>(s.seed), "error", s.error.c_str());
    }
    if (res.manifest.mean)
        std::printf("%s: %.2f +- %.2f over %zu seed(s)\n", cfg.label().c_str(), *res.manifest.mean, *res.manifest.std,
                    res.manifest.n_ok);
    std::printf("wrote %s\n", cfg.out_dir.c_str());
    return res.manifest.n_ok == res.manifest.seeds.size() ? 0 : 1;
}

int cmd_report(const std::vector<std::string>& dirs, const std::string& out) {
    std::string table = "algo,env,mean,std,n_ok\n";
    std::printf("%-16s %-14s %10s %8s %5s\n", "algo", "env", "mean", "std", "n");
    for (const auto& d : dirs) {
        const auto path = std::filesystem::path(d) / "summary.json";
        std::ifstream in(path);
        if (!in) throw igl::DataError("cannot open " + path.string());
        nlohmann::json j;
        try {
            in >> j;
        } catch (const std::exception& e) {
            throw igl::FormatError(path.string() + ": " + e.what());
        }
        const auto& agg = j.at("aggregate");
        const std::string name = j.at("config").at("name").get<std::string>();
        const std::string env = j.at("config").at("env").get<std::string>();
        const auto n = agg.at("n_ok").get<std::size_t>();
        std::string mean, sd;
        if (!agg.at("mean").is_null()) {
            mean = igl::format_number(agg.at("mean").get<double>());
            sd = igl::format_number(agg.at("std").get<double>());
            std::printf("%-16s %-14s %10.2f %8.2f %5zu\n", name.c_str(), env.c_str(), agg.at("mean").get<double>(),
                        agg.at("std").get<double>(), n);
        } else {
            std::printf("%-16s %-14s %10s %8s %5zu\n", name.c_str(), env.c_str(), "-", "-", n);
        }
        table += name + "," + env + "," + mean + "," + sd + "," + std::to_string(n) + "\n";
    }
    if (!out.empty()) {
        igl::write_text_file(out, table);
        std::printf("wrote %s\n", out.c_str());
    }
    return 0;
}

struct TheoryArgs {
    std::size_t k = 10;
    double eta = 0.5, iota = 1.0, n = 1000, ratio_l2 = 1.0, ratio_max = 1.0;
    double card_pi = 1.0, card_psi = 1.0, delta = 0.05;
    double log_complexity = 0.0;
    std::uint64_t warmup = 0;
    std::vector<std::uint64_t> rounds;
};

int cmd_theory(const TheoryArgs& a) {
    igl::TheoryConfig tc;
    tc.card_pi = a.card_pi;
    tc.card_psi = a.card_psi;
    tc.delta = a.delta;
    tc.iota = a.iota;
    if (a.log_complexity > 0.0) tc.log_complexity = a.log_complexity;
    igl::E2GConfig ec;
    ec.k_actions = a.k;
    ec.eta = a.eta;
    ec.iota = a.iota;
    if (a.warmup > 0) ec.warmup_override = a.warmup;
    std::printf("log term            %.6g\n", tc.log_term());
    std::printf("epsilon_stat(n=%g)  %.6g\n", a.n, igl::epsilon_stat(a.n, a.ratio_l2, a.ratio_max, tc));
    std::printf("epsilon_d(n=%g)     %.6g\n", a.n, igl::epsilon_d(a.n, a.iota));
    std::printf("min n for eta/2     %llu\n", static_cast<unsigned long long>(
                                                  igl::min_samples_identifiable(a.eta, a.ratio_l2, a.ratio_max, tc)));
    std::printf("warm-up T0          %llu\n",
                static_cast<unsigned long long>(igl::warmup_length(a.k, a.eta, a.iota)));
    std::vector<std::uint64_t> rounds = a.rounds;
    if (rounds.empty()) rounds = {1, 10, 100, 1000, 10000, 100000};
    std::printf("%10s %6s\n", "round", "n_i");
    for (auto i : rounds)
        std::printf("%10llu %6llu\n", static_cast<unsigned long long>(i),
                    static_cast<unsigned long long>(igl::schedule_n_i(i, ec)));
    return 0;
}

int cmd_check_env(const std::string& env, std::size_t grid) {
    igl::TabularEnvSpec spec;
    if (env == "tab2x3")
        spec = igl::tab_2x3();
    else if (env.rfind("tabular:", 0) == 0)
        spec = igl::load_tabular_spec(env.substr(8));
    else
        spec = igl::load_tabular_spec(env);
    const auto ci = igl::check_conditional_independence(spec);
    std::printf("contexts %zu  actions %zu  alphabet %zu\n", spec.n_contexts, spec.k_actions, spec.alphabet_size());
    std::printf("conditional independence: %s (max violation %.3g)\n", ci.holds ? "holds" : "violated",
                ci.max_violation);
    const auto a2 = igl::verify_assumption2(spec, igl::deterministic_policies(spec),
                                            igl::decoder_grid(spec.alphabet_size(), grid));
    std::printf("V(pi*) %.6g  V(pi_bad) %.6g  max delta_psi %.6g\n", a2.v_star, a2.v_bad, a2.delta_psi_star);
    std::printf("identifiability gap eta_max %.6g: %s\n", a2.eta_max, a2.holds ? "holds" : "fails");
    return ci.holds ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interaction-grounded learning experiments"};
    app.require_subcommand(1);

    std::string config, algo, out, env;
    std::vector<std::uint64_t> seeds;
    auto* run = app.add_subcommand("run", "run an experiment and write its report");
    run->add_option("--config", config, "key = value config file")->check(CLI::ExistingFile);
    run->add_option("--algo", algo, "sup | cb | cb-online | igl-batch | e2g | cb-kmeans");
    run->add_option("--env", env, "blob | mnist | env1 | env2 | family:<i> | tab2x3 | tabular:<path>");
    run->add_option("--seed", seeds, "seed(s), replaces the config list");
    run->add_option("--out", out, "output directory");

    std::vector<std::string> dirs;
    std::string report_out;
    auto* report = app.add_subcommand("report", "aggregate summary.json files into one table");
    report->add_option("dirs", dirs, "run output directories")->required();
    report->add_option("--out", report_out, "write the combined table as CSV");

    TheoryArgs ta;
    auto* theory = app.add_subcommand("theory", "sample-complexity calculators and the exploitation schedule");
    theory->add_option("--k", ta.k, "number of actions");
    theory->add_option("--eta", ta.eta, "identifiability gap");
    theory->add_option("--iota", ta.iota, "log-complexity term for the schedule");
    theory->add_option("--n", ta.n, "sample size");
    theory->add_option("--ratio-l2", ta.ratio_l2, "second moment of pi/d");
    theory->add_option("--ratio-max", ta.ratio_max, "max of pi/d");
    theory->add_option("--card-pi", ta.card_pi, "|Pi|");
    theory->add_option("--card-psi", ta.card_psi, "|Psi|");
    theory->add_option("--delta", ta.delta, "failure probability");
    theory->add_option("--log-complexity", ta.log_complexity, "replaces log(2|Pi||Psi|/delta) when > 0");
    theory->add_option("--warmup", ta.warmup, "warm-up override in rounds");
    theory->add_option("--rounds", ta.rounds, "rounds to tabulate n_i at");

    std::string check_env = "tab2x3";
    std::size_t grid = 10;
    auto* check = app.add_subcommand("check-env", "conditional-independence and identifiability report");
    check->add_option("env", check_env, "tab2x3 or a tabular spec file");
    check->add_option("--grid", grid, "decoder grid resolution");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run) return cmd_run(config, algo, seeds, out, env);
        if (*report) return cmd_report(dirs, report_out);
        if (*theory) return cmd_theory(ta);
        if (*check) return cmd_check_env(check_env, grid);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}

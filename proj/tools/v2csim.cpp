#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "v2csim/config.hpp"
#include "v2csim/matrix.hpp"
#include "v2csim/sim.hpp"

namespace fs = std::filesystem;
using namespace v2csim;

namespace {

std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return v ? std::string(v) : fallback;
}

int env_int_or(const char* name, int fallback) {
    const char* v = std::getenv(name);
    return v ? std::atoi(v) : fallback;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"v2csim - latency-aware cloud-control co-simulation harness"};
    app.require_subcommand(1);

    // run
    auto* run_cmd = app.add_subcommand("run", "execute a single scenario run");
    std::string run_config;
    std::uint64_t run_seed = 0;
    bool run_seed_set = false;
    std::string run_out = env_or("V2CSIM_OUT_DIR", ".");
    run_cmd->add_option("--config", run_config, "scenario config JSON")->required();
    run_cmd->add_option("--seed", run_seed, "override the config seed")
        ->each([&](const std::string&) { run_seed_set = true; });
    run_cmd->add_option("--out", run_out, "output directory");

    // matrix
    auto* matrix_cmd = app.add_subcommand("matrix", "execute the full test matrix");
    std::string matrix_config;
    int seeds_per_cell = 1;
    std::string matrix_out = env_or("V2CSIM_OUT_DIR", "matrix_out");
    int workers = env_int_or("V2CSIM_WORKERS", 4);
    std::uint64_t master_seed = 1;
    matrix_cmd->add_option("--config", matrix_config, "base scenario config JSON")
        ->required();
    matrix_cmd->add_option("--seeds", seeds_per_cell, "seeds per matrix cell");
    matrix_cmd->add_option("--out", matrix_out, "output directory");
    matrix_cmd->add_option("--workers", workers, "parallel workers");
    matrix_cmd->add_option("--master-seed", master_seed,
                           "master seed for the seed-splitting function");

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "fit latency distributions to a CSV");
    std::string fit_input;
    std::string fit_family = "all";
    fit_cmd->add_option("--input", fit_input, "CSV with header latency_ms")->required();
    fit_cmd->add_option("--family", fit_family,
                        "Gamma|Normal|Nakagami|Rayleigh|all");

    // verify-gamma
    auto* vg_cmd = app.add_subcommand(
        "verify-gamma", "check the queueing model against Gamma(2, 1/mu)");
    double vg_mu = 0.1;
    std::size_t vg_n = 100000;
    std::uint64_t vg_seed = 1;
    vg_cmd->add_option("--mu", vg_mu, "rate parameter (1/ms)");
    vg_cmd->add_option("--n", vg_n, "sample count");
    vg_cmd->add_option("--seed", vg_seed, "random seed");

    // report
    auto* report_cmd = app.add_subcommand("report", "re-aggregate a matrix directory");
    std::string report_in;
    std::string report_format = "json";
    report_cmd->add_option("--in", report_in, "matrix output directory")->required();
    report_cmd->add_option("--format", report_format, "json|csv (both always written)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            ScenarioConfig cfg = load_config(run_config);
            if (run_seed_set) cfg.seed = run_seed;
            RunResult res = run_single(cfg);
            fs::create_directories(run_out);
            const std::string stem =
                (fs::path(run_out) / ("run_seed" + std::to_string(cfg.seed))).string();
            write_runlog_csv(res.log, stem + "_log.csv");
            write_events_csv(res.log, stem + "_events.csv");
            write_channel_csv(res.log, stem + "_channel.csv");
            std::ofstream mf(stem + "_metrics.json");
            mf << metrics_to_json(res.metrics) << "\n";
            std::cout << metrics_to_json(res.metrics) << std::endl;
        } else if (*matrix_cmd) {
            ScenarioConfig base = load_config(matrix_config);
            MatrixOptions opts;
            opts.seeds_per_cell = seeds_per_cell;
            opts.master_seed = master_seed;
            opts.workers = workers;
            opts.out_dir = matrix_out;
            MatrixReport rep = run_matrix(base, opts);
            write_matrix_report(rep, matrix_out);
            std::cout << "matrix complete: " << rep.runs.size() << " runs, report in "
                      << matrix_out << std::endl;
        } else if (*fit_cmd) {
            const auto samples = load_latency_csv(fit_input);
            if (fit_family == "all") {
                const auto ranked = rank_families(samples);
                std::cout << "[";
                for (std::size_t i = 0; i < ranked.size(); ++i)
                    std::cout << (i ? ",\n" : "\n") << fit_result_to_json(ranked[i]);
                std::cout << "\n]" << std::endl;
            } else {
                const auto r = fit(samples, family_from_name(fit_family));
                std::cout << fit_result_to_json(r) << std::endl;
            }
        } else if (*vg_cmd) {
            QueueingGenerator gen;
            gen.lambda1 = vg_mu;       // any stable pair with lambda2-lambda1 = mu
            gen.lambda2 = 2.0 * vg_mu;
            gen.mu2 = vg_mu;
            gen.retx_prob = 1.0;
            RandomStream rng(vg_seed);
            const auto rep = verify_gamma_theory(gen, vg_n, rng);
            std::cout << "empirical mean:     " << rep.empirical_mean << " ms\n"
                      << "analytic mean:      " << rep.analytic_mean << " ms\n"
                      << "empirical variance: " << rep.empirical_variance << " ms^2\n"
                      << "analytic variance:  " << rep.analytic_variance << " ms^2\n"
                      << "KS distance:        " << rep.ks_distance << std::endl;
        } else if (*report_cmd) {
            MatrixReport rep = load_matrix_report(report_in);
            write_matrix_report(rep, report_in);
            std::cout << "report rewritten in " << report_in << std::endl;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}

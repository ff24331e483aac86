// Command-line front end. See README.md for the subcommand reference.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "toepca/cli.hpp"
#include "toepca/io.hpp"

namespace {

void add_common_flags(CLI::App* cmd, toepca::cli::ExperimentConfig& cfg,
                      std::string& symbol_spec, std::string& symbol_json) {
    cmd->add_option("--symbol", symbol_spec,
                    "symbol spec, e.g. ar1:rho=0.5 | bandlimited:W=0.7854 | "
                    "lines:(0.7854,1),(1.0472,2) | white:scale=2");
    cmd->add_option("--symbol-json", symbol_json, "path to a symbol JSON file");
    cmd->add_option("--cov", cfg.covariance_path, "path to a covariance CSV (tau,sigma)");
    cmd->add_option("--N", cfg.windows, "window lengths")->delimiter(',');
    cmd->add_option("--out", cfg.outdir, "output directory (default $TOEPCA_OUTDIR or .)");
    cmd->add_option("--seed", cfg.seed, "random seed");
    cmd->add_option("--quad-panels", cfg.quad.panels, "quadrature panels per symbol piece set");
    cmd->add_option("--quad-points", cfg.quad.points_per_panel, "quadrature points per panel");
    cmd->add_flag("--timestamp", cfg.timestamp, "prepend a timestamp header to CSV outputs");
    cmd->add_flag("--allow-large-tau", cfg.allow_large_tau,
                  "lift the covariance length cap");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rank-n stationary process approximation toolkit"};
    app.require_subcommand(1);

    toepca::cli::ExperimentConfig cfg;
    if (const char* env = std::getenv("TOEPCA_OUTDIR")) cfg.outdir = env;
    std::string symbol_spec, symbol_json;

    auto* spectrum = app.add_subcommand("spectrum", "eigenvalue tables and window tracks");
    add_common_flags(spectrum, cfg, symbol_spec, symbol_json);
    spectrum->add_option("--threshold", cfg.threshold, "effective-rank threshold in (0,1)");

    auto* approx = app.add_subcommand("approx", "optimal rank-n window approximation");
    add_common_flags(approx, cfg, symbol_spec, symbol_json);
    approx->add_option("--n", cfg.ranks, "ranks")->delimiter(',');
    approx->add_flag("--n-sweep", cfg.rank_sweep, "sweep all ranks 1..N");
    approx->add_flag("--dump-sigma-hat", cfg.dump_reduced, "write the reduced covariance CSV");

    auto* realize = app.add_subcommand("realize", "stationary state-space extension");
    add_common_flags(realize, cfg, symbol_spec, symbol_json);
    realize->add_option("--n", cfg.ranks, "ranks")->delimiter(',');
    realize->add_flag("--n-sweep", cfg.rank_sweep, "sweep all ranks 1..N");

    auto* converge = app.add_subcommand("converge", "weak-convergence gap reports");
    add_common_flags(converge, cfg, symbol_spec, symbol_json);
    converge->add_option("--n", cfg.ranks, "ranks")->delimiter(',');
    converge->add_flag("--n-sweep", cfg.rank_sweep, "sweep all ranks 1..N");
    converge->add_option("--psi-count", cfg.psi_count, "test bank size");

    auto* sample = app.add_subcommand("sample", "Monte Carlo paths and estimates");
    add_common_flags(sample, cfg, symbol_spec, symbol_json);
    sample->add_option("--n", cfg.ranks, "ranks")->delimiter(',');
    sample->add_option("--count", cfg.sample_count, "number of paths");

    auto* repro = app.add_subcommand("repro", "run the full verification suite");
    repro->add_option("--out", cfg.outdir, "output directory");
    repro->add_option("--seed", cfg.seed, "random seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!symbol_spec.empty() && !symbol_json.empty()) {
            std::cerr << "config error: --symbol and --symbol-json are mutually exclusive\n";
            return 2;
        }
        if (!symbol_spec.empty()) cfg.symbol = toepca::cli::parse_symbol_spec(symbol_spec);
        if (!symbol_json.empty()) cfg.symbol = toepca::load_symbol(symbol_json);
    } catch (const toepca::Error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    const std::string sub = app.get_subcommands().front()->get_name();
    return toepca::cli::run(sub, cfg);
}

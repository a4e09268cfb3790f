// Command-line front end: design (offline pattern search), acquire (single
// delay-Doppler estimate), evaluate (Monte Carlo campaign).

#include "mcacq/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <thread>

namespace {

void add_common(CLI::App* cmd, mcacq::CommonOptions& opt) {
    cmd->add_option("--config", opt.config_path, "Configuration file (JSON)");
    cmd->add_option("--output", opt.output_dir, "Output directory")->capture_default_str();
    cmd->add_option("--seed", opt.seed, "Master seed override");
    cmd->add_option("--workers", opt.workers, "Worker thread cap (default: available cores)");
    cmd->add_flag("--pss-only", opt.pss_only, "Correlate against the PSS symbol only");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-coset sub-Nyquist acquisition toolkit"};
    app.require_subcommand(1);

    mcacq::CommonOptions design_opt, acquire_opt, evaluate_opt;

    auto* design = app.add_subcommand("design", "Exhaustive coset-pattern search for (L, K)");
    int l = 8, k = 4;
    design->add_option("-L,--period", l, "Coset period L")->required();
    design->add_option("-K,--kept", k, "Retained cosets per period K")->required();
    add_common(design, design_opt);

    auto* acquire = app.add_subcommand("acquire", "Single acquisition on a sample file");
    std::string samples_path;
    std::vector<double> synth_args;
    acquire->add_option("--input", samples_path, "Sample file, one 'real,imag' per line");
    acquire->add_option("--synthesize", synth_args,
                        "Synthesize the input: DELAY DOPPLER_HZ SNR_DB")
        ->expected(3);
    acquire->add_option("--pattern", acquire_opt.pattern_paths, "Coset pattern file");
    acquire->add_option("--surface-dump", acquire_opt.surface_dump_path,
                        "Dump the full acquisition surface to this path");
    add_common(acquire, acquire_opt);

    auto* evaluate = app.add_subcommand("evaluate", "RMSE / acquisition-time campaign");
    evaluate->add_option("--pattern", evaluate_opt.pattern_paths, "Coset pattern file (repeatable)");
    evaluate->add_option("--trials", evaluate_opt.trials, "Monte Carlo trials per (pattern, SNR)");
    evaluate->add_option("--snr", evaluate_opt.snr_list_db, "SNR sweep in dB (comma separated)")
        ->delimiter(',');
    add_common(evaluate, evaluate_opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (design->parsed()) return mcacq::cmd_design(design_opt, l, k, std::cout, std::cerr);
    if (acquire->parsed()) {
        std::optional<std::array<double, 3>> synth;
        if (!synth_args.empty()) synth = {synth_args[0], synth_args[1], synth_args[2]};
        return mcacq::cmd_acquire(acquire_opt, samples_path, synth, std::cout, std::cerr);
    }
    return mcacq::cmd_evaluate(evaluate_opt, std::cout, std::cerr);
}

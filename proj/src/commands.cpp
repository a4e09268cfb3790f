#include "mcacq/commands.hpp"

#include "mcacq/design.hpp"
#include "mcacq/signal.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

namespace mcacq {

namespace {

ToolConfig resolve_config(const CommonOptions& opt) {
    ToolConfig cfg = opt.config_path.empty() ? ToolConfig{} : load_config(opt.config_path);
    if (opt.seed) cfg.scenario.master_seed = *opt.seed;
    if (opt.trials) cfg.scenario.trials = *opt.trials;
    if (opt.snr_list_db) cfg.scenario.snr_list_db = *opt.snr_list_db;
    if (opt.workers) cfg.scenario.workers = *opt.workers;
    if (opt.pss_only) cfg.scenario.pilot.pss_only = true;
    cfg.scenario.validate();
    return cfg;
}

std::vector<CosetPattern> load_patterns(const std::vector<std::string>& paths) {
    std::vector<CosetPattern> patterns;
    for (const auto& path : paths) patterns.push_back(load_pattern_file(path).pattern);
    return patterns;
}

int run_guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 1;
    } catch (const CapacityError& e) {
        err << "capacity error: " << e.what() << "\n";
        return 3;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << "\n";
        return 1;
    }
}

void ensure_output_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory " + dir + ": " + ec.message());
}

}  // namespace

cvec load_samples(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("samples: cannot open " + path);
    cvec samples;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        double re = 0.0, im = 0.0;
        char trailing = 0;
        const int got = std::sscanf(line.c_str(), " %lf , %lf %c", &re, &im, &trailing);
        if (got != 2)
            throw DataError("samples: " + path + ":" + std::to_string(line_no) +
                            ": expected 'real,imag', got '" + line + "'");
        samples.emplace_back(re, im);
    }
    if (samples.empty()) throw DataError("samples: " + path + " contains no samples");
    return samples;
}

void save_samples(const std::string& path, const cvec& samples) {
    std::ofstream out(path);
    if (!out) throw DataError("samples: cannot open " + path + " for writing");
    char line[80];
    for (const cplx& s : samples) {
        std::snprintf(line, sizeof line, "%.17g,%.17g\n", s.real(), s.imag());
        out << line;
    }
}

int cmd_design(const CommonOptions& opt, int l, int k, std::ostream& out, std::ostream& err) {
    return run_guarded(err, [&] {
        const ToolConfig cfg = resolve_config(opt);
        const auto& sc = cfg.scenario;
        const Pilot pilot = make_pilot(sc.pilot, sc.numerology);

        DesignConfig dc = make_design_config(l, k, pilot, sc.d_max, sc.doppler_max_hz,
                                             sc.observation_time_s, sc.sample_period_s());
        if (cfg.design_dopplers_hz) dc.design_dopplers_hz = *cfg.design_dopplers_hz;
        dc.enumeration_cap = cfg.enumeration_cap;
        dc.workers = sc.workers;
        dc.validate();

        const auto ranked = design_cosets(dc);
        if (ranked.front().second.degenerate)
            throw DataError("design: every candidate pattern is degenerate for this configuration");

        ensure_output_dir(opt.output_dir);
        const std::string report_path = opt.output_dir + "/design-report.json";
        save_design_report(report_path, dc, ranked, 20);

        PatternFile pf;
        pf.pattern = ranked.front().first;
        pf.score = ranked.front().second;
        pf.provenance = PatternProvenance{pilot.label, dc.grid.d_max, dc.design_dopplers_hz};
        const std::string pattern_path =
            opt.output_dir + "/pattern-" + std::to_string(l) + "-" + std::to_string(k) + ".json";
        save_pattern_file(pattern_path, pf);

        out << "ranked " << ranked.size() << " patterns for L=" << l << " K=" << k << "\n";
        char line[160];
        for (size_t i = 0; i < ranked.size() && i < 5; ++i) {
            const auto& [pattern, score] = ranked[i];
            std::snprintf(line, sizeof line, "%zu. %-28s J=%-12.6g SPR=%-10.6g B=%.6g\n", i + 1,
                          pattern.label().c_str(), score.cost, score.mean_spr, score.mean_balance);
            out << line;
        }
        out << "report: " << report_path << "\n";
        out << "selected pattern: " << pattern_path << "\n";
        return 0;
    });
}

int cmd_acquire(const CommonOptions& opt, const std::string& samples_path,
                const std::optional<std::array<double, 3>>& synthesize, std::ostream& out,
                std::ostream& err) {
    return run_guarded(err, [&] {
        if (samples_path.empty() == !synthesize)
            throw ConfigError("acquire: provide exactly one input, a samples file or --synthesize");
        if (opt.pattern_paths.size() > 1)
            throw ConfigError("acquire: at most one pattern file");

        const ToolConfig cfg = resolve_config(opt);
        const auto& sc = cfg.scenario;
        const Pilot pilot = make_pilot(sc.pilot, sc.numerology);
        const SearchGrid grid = make_search_grid(sc.d_max, sc.doppler_max_hz, sc.observation_time_s,
                                                 sc.sample_period_s());
        const CosetPattern pattern = opt.pattern_paths.empty()
                                         ? uniform_pattern()
                                         : load_pattern_file(opt.pattern_paths[0]).pattern;

        cvec r;
        if (synthesize) {
            const auto& [delay, doppler_hz, snr_db] = *synthesize;
            const int d = static_cast<int>(delay);
            if (d < 0 || d > sc.d_max)
                throw ConfigError("acquire: synthesized delay outside the searched range [0, " +
                                  std::to_string(sc.d_max) + "]");
            SynthesisParams sp;
            sp.delay_samples = d;
            sp.doppler_hz = doppler_hz;
            sp.sample_period_s = sc.sample_period_s();
            sp.noise_variance = snr_to_noise_variance(snr_db, pilot);
            sp.rng_seed = derive_seed(sc.master_seed, 2);
            r = synthesize_received(pilot, sp, pilot.length() + static_cast<size_t>(sc.d_max));
        } else {
            r = load_samples(samples_path);
        }

        const SamplingMask mask = make_mask(pattern, r.size());
        const AcquisitionSurface surface = reduced_correlate(r, mask, pilot, grid);
        const AcquisitionResult res = glrt_peak(surface);

        if (!opt.surface_dump_path.empty()) dump_surface(surface, opt.surface_dump_path);

        char line[256];
        std::snprintf(line, sizeof line,
                      "pattern: %s\ndelay_hat: %d\ndoppler_hat_hz: %.9g\npeak_value: %.9g\n"
                      "mac_count: %llu\n",
                      pattern.label().c_str(), res.delay_hat, res.doppler_hat_hz, res.peak_value,
                      static_cast<unsigned long long>(res.mac_count));
        out << line;
        return 0;
    });
}

int cmd_evaluate(const CommonOptions& opt, std::ostream& out, std::ostream& err) {
    return run_guarded(err, [&] {
        ToolConfig cfg = resolve_config(opt);
        cfg.scenario.patterns = load_patterns(opt.pattern_paths);
        cfg.scenario.validate();

        const CampaignReport report = run_campaign(cfg.scenario);
        const std::string echo = describe_config(cfg);

        ensure_output_dir(opt.output_dir);
        write_rmse_csv(opt.output_dir + "/rmse.csv", report, echo);
        write_mta_csv(opt.output_dir + "/mta.csv", report, echo);
        write_fig_data(opt.output_dir + "/fig-delay.dat", report, FigAxis::delay, echo);
        write_fig_data(opt.output_dir + "/fig-doppler.dat", report, FigAxis::doppler, echo);

        out << "config: " << echo << "\n";
        out << summary_table(report);
        out << "wrote rmse.csv, mta.csv, fig-delay.dat, fig-doppler.dat to " << opt.output_dir
            << "\n";
        return 0;
    });
}

}  // namespace mcacq

#include "mcacq/harness.hpp"

#include "mcacq/signal.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <thread>

namespace mcacq {

namespace {

// Seed streams hung off each trial seed / cell seed. The bootstrap stream sits
// far above any realistic trial index so chained derivations never collide.
constexpr uint64_t kParamsStream = 1;
constexpr uint64_t kNoiseStream = 2;
constexpr uint64_t kBootstrapStream = 0x626f6f74;  // > 2^30

constexpr int kBootstrapResamples = 1000;

struct CellContext {
    const ScenarioConfig* cfg = nullptr;
    const Pilot* pilot = nullptr;
    const SearchGrid* grid = nullptr;
    const SamplingMask* mask = nullptr;
    std::string pattern_label;
    size_t n_obs = 0;
};

TrialRecord run_trial_ctx(const CellContext& ctx, CorrelatorWorkspace& ws, double snr_db,
                          uint64_t trial_seed) {
    const ScenarioConfig& cfg = *ctx.cfg;

    Rng64 params(derive_seed(trial_seed, kParamsStream));
    TrialRecord rec;
    rec.snr_db = snr_db;
    rec.pattern_label = ctx.pattern_label;
    rec.true_delay = static_cast<int>(params.next_below(static_cast<uint64_t>(cfg.d_max)));
    rec.true_doppler_hz = params.next_uniform(-cfg.doppler_max_hz, cfg.doppler_max_hz);

    SynthesisParams sp;
    sp.delay_samples = rec.true_delay;
    sp.doppler_hz = rec.true_doppler_hz;
    sp.sample_period_s = cfg.sample_period_s();
    sp.noise_variance = snr_to_noise_variance(snr_db, *ctx.pilot);
    sp.rng_seed = derive_seed(trial_seed, kNoiseStream);
    const cvec r = synthesize_received(*ctx.pilot, sp, ctx.n_obs);

    const auto t0 = std::chrono::steady_clock::now();
    const AcquisitionSurface surface = reduced_correlate(r, *ctx.mask, *ctx.pilot, *ctx.grid, {}, &ws);
    const AcquisitionResult peak = glrt_peak(surface);
    const auto t1 = std::chrono::steady_clock::now();

    rec.est_delay = peak.delay_hat;
    rec.est_doppler_hz = peak.doppler_hat_hz;
    rec.peak_value = peak.peak_value;
    rec.mac_count = peak.mac_count;
    rec.elapsed_s = std::chrono::duration<double>(t1 - t0).count();
    return rec;
}

// 95% percentile interval from sorted resample statistics.
std::pair<double, double> percentile_95(std::vector<double>& stats) {
    std::sort(stats.begin(), stats.end());
    const size_t b = stats.size();
    return {stats[b * 25 / 1000], stats[b * 975 / 1000 - 1]};
}

std::string column_label(std::string label) {
    std::replace(label.begin(), label.end(), ' ', ',');
    return label;
}

}  // namespace

Pilot make_pilot(const PilotSelection& sel, const NumerologyConfig& numerology) {
    if (sel.kind == PilotSelection::Kind::nr) {
        return sel.pss_only ? build_nr_pss_pilot(sel.n_id2, numerology)
                            : build_nr_pilot(sel.n_id1, sel.n_id2, numerology);
    }
    return generate_synthetic_pilot(sel.length, sel.seed);
}

void ScenarioConfig::validate() const {
    numerology.validate();
    if (doppler_max_hz <= 0.0) throw ConfigError("scenario: doppler_max_hz must be positive");
    if (observation_time_s <= 0.0) throw ConfigError("scenario: observation_time_s must be positive");
    if (d_max < 4) throw ConfigError("scenario: d_max must be >= 4");
    if (trials < 1) throw ConfigError("scenario: trials must be >= 1");
    if (snr_list_db.empty()) throw ConfigError("scenario: snr_list_db must be nonempty");
    if (workers < 1) throw ConfigError("scenario: workers must be >= 1");
    for (const auto& p : patterns) p.validate();
    if (pilot.kind == PilotSelection::Kind::nr) {
        if (pilot.n_id1 < 0 || pilot.n_id1 > 335) throw ConfigError("scenario: n_id1 must be in [0, 335]");
        if (pilot.n_id2 < 0 || pilot.n_id2 > 2) throw ConfigError("scenario: n_id2 must be in [0, 2]");
    } else if (pilot.length < 1) {
        throw ConfigError("scenario: synthetic pilot length must be >= 1");
    }
}

TrialRecord run_trial(const ScenarioConfig& cfg, const CosetPattern& pattern, double snr_db,
                      uint64_t trial_seed) {
    cfg.validate();
    pattern.validate();
    const Pilot pilot = make_pilot(cfg.pilot, cfg.numerology);
    const SearchGrid grid =
        make_search_grid(cfg.d_max, cfg.doppler_max_hz, cfg.observation_time_s, cfg.sample_period_s());
    const size_t n_obs = pilot.length() + static_cast<size_t>(cfg.d_max);
    const SamplingMask mask = make_mask(pattern, n_obs);

    CellContext ctx;
    ctx.cfg = &cfg;
    ctx.pilot = &pilot;
    ctx.grid = &grid;
    ctx.mask = &mask;
    ctx.pattern_label = pattern.label();
    ctx.n_obs = n_obs;
    CorrelatorWorkspace ws;
    return run_trial_ctx(ctx, ws, snr_db, trial_seed);
}

std::pair<double, double> compute_rmse(const std::vector<TrialRecord>& records) {
    if (records.empty()) throw std::invalid_argument("compute_rmse: no records");
    KahanSum d2, f2;
    for (const auto& rec : records) {
        const double dd = static_cast<double>(rec.est_delay - rec.true_delay);
        const double df = rec.est_doppler_hz - rec.true_doppler_hz;
        d2.add(dd * dd);
        f2.add(df * df);
    }
    const double n = static_cast<double>(records.size());
    return {std::sqrt(d2.value() / n), std::sqrt(f2.value() / n)};
}

CampaignReport run_campaign(const ScenarioConfig& cfg) {
    cfg.validate();

    std::vector<CosetPattern> patterns = {uniform_pattern()};
    for (const auto& p : cfg.patterns)
        if (!(p == uniform_pattern())) patterns.push_back(p);

    const Pilot pilot = make_pilot(cfg.pilot, cfg.numerology);
    const SearchGrid grid =
        make_search_grid(cfg.d_max, cfg.doppler_max_hz, cfg.observation_time_s, cfg.sample_period_s());
    const size_t n_obs = pilot.length() + static_cast<size_t>(cfg.d_max);
    const size_t n_trials = static_cast<size_t>(cfg.trials);

    CampaignReport report;
    report.snr_list_db = cfg.snr_list_db;
    report.cells.reserve(patterns.size() * cfg.snr_list_db.size());

    std::vector<TrialRecord> records(n_trials);
    std::vector<double> d_sq(n_trials), f_sq(n_trials);

    for (size_t p_idx = 0; p_idx < patterns.size(); ++p_idx) {
        const CosetPattern& pattern = patterns[p_idx];
        const SamplingMask mask = make_mask(pattern, n_obs);
        const uint64_t pattern_seed = derive_seed(cfg.master_seed, p_idx);
        report.pattern_labels.push_back(pattern.label());

        CellContext ctx;
        ctx.cfg = &cfg;
        ctx.pilot = &pilot;
        ctx.grid = &grid;
        ctx.mask = &mask;
        ctx.pattern_label = pattern.label();
        ctx.n_obs = n_obs;

        KahanSum pattern_elapsed, pattern_mac;

        for (size_t s_idx = 0; s_idx < cfg.snr_list_db.size(); ++s_idx) {
            const double snr_db = cfg.snr_list_db[s_idx];
            const uint64_t cell_seed = derive_seed(pattern_seed, s_idx);

            const int workers = std::min<int>(cfg.workers, static_cast<int>(n_trials));
            std::vector<std::string> worker_errs(static_cast<size_t>(std::max(workers, 1)));
            auto run_range = [&](size_t lo, size_t hi, size_t w_idx) {
                CorrelatorWorkspace ws;
                for (size_t t = lo; t < hi; ++t) {
                    try {
                        records[t] = run_trial_ctx(ctx, ws, snr_db, derive_seed(cell_seed, t));
                    } catch (const std::exception& e) {
                        worker_errs[w_idx] = "campaign aborted at pattern " + ctx.pattern_label +
                                             ", snr " + std::to_string(snr_db) + " dB, trial " +
                                             std::to_string(t) + ": " + e.what();
                        return;
                    }
                }
            };
            if (workers <= 1) {
                run_range(0, n_trials, 0);
            } else {
                std::vector<std::thread> pool;
                pool.reserve(workers);
                for (int w = 0; w < workers; ++w) {
                    const size_t lo = n_trials * w / workers;
                    const size_t hi = n_trials * (w + 1) / workers;
                    pool.emplace_back(run_range, lo, hi, static_cast<size_t>(w));
                }
                for (auto& th : pool) th.join();
            }
            for (const auto& err : worker_errs)
                if (!err.empty()) throw DataError(err);

            CampaignCell cell;
            cell.pattern_label = pattern.label();
            cell.snr_db = snr_db;
            cell.trials = cfg.trials;

            KahanSum d2, f2, elapsed, mac;
            for (size_t t = 0; t < n_trials; ++t) {
                const TrialRecord& rec = records[t];
                const double dd = static_cast<double>(rec.est_delay - rec.true_delay);
                const double df = rec.est_doppler_hz - rec.true_doppler_hz;
                d_sq[t] = dd * dd;
                f_sq[t] = df * df;
                d2.add(d_sq[t]);
                f2.add(f_sq[t]);
                elapsed.add(rec.elapsed_s);
                mac.add(static_cast<double>(rec.mac_count));
            }
            const double n = static_cast<double>(n_trials);
            cell.delay_rmse = std::sqrt(d2.value() / n);
            cell.doppler_rmse = std::sqrt(f2.value() / n);
            cell.mta_s = elapsed.value() / n;
            cell.mean_mac = mac.value() / n;
            pattern_elapsed.add(elapsed.value());
            pattern_mac.add(mac.value());

            Rng64 boot(derive_seed(cell_seed, kBootstrapStream));
            std::vector<double> rd(kBootstrapResamples), rf(kBootstrapResamples);
            for (int b = 0; b < kBootstrapResamples; ++b) {
                double sd = 0.0, sf = 0.0;
                for (size_t t = 0; t < n_trials; ++t) {
                    const size_t j = static_cast<size_t>(boot.next_below(n_trials - 1));
                    sd += d_sq[j];
                    sf += f_sq[j];
                }
                rd[b] = std::sqrt(sd / n);
                rf[b] = std::sqrt(sf / n);
            }
            std::tie(cell.delay_ci_low, cell.delay_ci_high) = percentile_95(rd);
            std::tie(cell.doppler_ci_low, cell.doppler_ci_high) = percentile_95(rf);

            cell.wallclock_gain =
                p_idx == 0 ? 1.0 : report.cell(0, s_idx).mta_s / cell.mta_s;
            report.cells.push_back(cell);
        }

        const double cells_n = static_cast<double>(cfg.snr_list_db.size()) * static_cast<double>(n_trials);
        PatternSummary sum;
        sum.pattern_label = pattern.label();
        sum.keep_ratio = pattern.keep_ratio();
        sum.mta_ms = pattern_elapsed.value() / cells_n * 1e3;
        sum.mean_mac = pattern_mac.value() / cells_n;
        sum.wallclock_gain = p_idx == 0 ? 1.0 : report.summaries[0].mta_ms / sum.mta_ms;
        sum.mac_gain = p_idx == 0 ? 1.0 : report.summaries[0].mean_mac / sum.mean_mac;
        report.summaries.push_back(sum);
    }
    return report;
}

void write_rmse_csv(const std::string& path, const CampaignReport& report,
                    const std::string& config_echo) {
    std::ofstream out(path);
    if (!out) throw DataError("write_rmse_csv: cannot open " + path);
    char line[256];
    out << "# config: " << config_echo << "\n";
    out << "pattern,snr_db,delay_rmse,doppler_rmse,ci_low,ci_high\n";
    for (const auto& cell : report.cells) {
        std::snprintf(line, sizeof line, "%s,%g,%.9g,%.9g,%.9g,%.9g\n", cell.pattern_label.c_str(),
                      cell.snr_db, cell.delay_rmse, cell.doppler_rmse, cell.delay_ci_low,
                      cell.delay_ci_high);
        out << line;
    }
}

void write_mta_csv(const std::string& path, const CampaignReport& report,
                   const std::string& config_echo) {
    std::ofstream out(path);
    if (!out) throw DataError("write_mta_csv: cannot open " + path);
    char line[256];
    out << "# config: " << config_echo << "\n";
    out << "pattern,mta_ms,wallclock_gain,mac_gain\n";
    for (const auto& sum : report.summaries) {
        std::snprintf(line, sizeof line, "%s,%.6f,%.3f,%.9g\n", sum.pattern_label.c_str(), sum.mta_ms,
                      sum.wallclock_gain, sum.mac_gain);
        out << line;
    }
}

void write_fig_data(const std::string& path, const CampaignReport& report, FigAxis axis,
                    const std::string& config_echo) {
    std::ofstream out(path);
    if (!out) throw DataError("write_fig_data: cannot open " + path);
    char buf[64];
    out << "# config: " << config_echo << "\n";
    out << "# snr_db";
    for (const auto& label : report.pattern_labels) out << " " << column_label(label);
    out << "\n";
    for (size_t s = 0; s < report.snr_list_db.size(); ++s) {
        std::snprintf(buf, sizeof buf, "%g", report.snr_list_db[s]);
        out << buf;
        for (size_t p = 0; p < report.pattern_labels.size(); ++p) {
            const CampaignCell& cell = report.cell(p, s);
            std::snprintf(buf, sizeof buf, " %.9g",
                          axis == FigAxis::delay ? cell.delay_rmse : cell.doppler_rmse);
            out << buf;
        }
        out << "\n";
    }
}

std::string summary_table(const CampaignReport& report) {
    char line[160];
    std::string table;
    std::snprintf(line, sizeof line, "%-28s %6s %12s %9s %10s\n", "pattern", "K/L", "MTA ms", "gain",
                  "MAC gain");
    table += line;
    for (const auto& sum : report.summaries) {
        std::snprintf(line, sizeof line, "%-28s %6.3f %12.4f %8.1fx %9.1fx\n",
                      sum.pattern_label.c_str(), sum.keep_ratio, sum.mta_ms, sum.wallclock_gain,
                      sum.mac_gain);
        table += line;
    }
    return table;
}

}  // namespace mcacq

// Monte Carlo campaign engine: per-trial acquisition with randomized truth,
// delay/Doppler RMSE vs SNR with bootstrap confidence intervals, and mean
// acquisition time with both wall-clock and MAC-count ledgers.

#pragma once

#include "mcacq/correlator.hpp"
#include "mcacq/coset.hpp"
#include "mcacq/pilot.hpp"

#include <string>
#include <vector>

namespace mcacq {

// Which reference waveform the campaign correlates against.
struct PilotSelection {
    enum class Kind { nr, synthetic };
    Kind kind = Kind::nr;
    int n_id1 = 0;         // NR cell identity group
    int n_id2 = 0;         // NR identity within the group
    bool pss_only = false; // single-symbol PSS replica instead of the full block
    size_t length = 1024;  // synthetic pilot only
    uint64_t seed = 7;     // synthetic pilot only
};

Pilot make_pilot(const PilotSelection& sel, const NumerologyConfig& numerology);

struct ScenarioConfig {
    NumerologyConfig numerology;        // fs = 3.84 MHz, N_FFT = 256, SCS = 15 kHz
    double doppler_max_hz = 20e3;
    double observation_time_s = 1e-3;   // sets the Doppler bin width
    int d_max = 64;
    std::vector<double> snr_list_db = {-20, -18, -16, -14, -12, -10, -8, -6,
                                       -4,  -2,  0,   2,   4,   6,   8,  10};
    int trials = 5000;
    std::vector<CosetPattern> patterns;  // uniform benchmark is added automatically
    uint64_t master_seed = 1;
    PilotSelection pilot;
    int workers = 1;

    double sample_period_s() const { return 1.0 / numerology.sampling_frequency_hz; }
    void validate() const;
};

struct TrialRecord {
    int true_delay = 0;
    double true_doppler_hz = 0.0;
    int est_delay = 0;
    double est_doppler_hz = 0.0;
    double snr_db = 0.0;
    std::string pattern_label;
    double elapsed_s = 0.0;    // correlate + peak stage only
    uint64_t mac_count = 0;
    double peak_value = 0.0;
};

// One (pattern, snr) cell of the campaign.
struct CampaignCell {
    std::string pattern_label;
    double snr_db = 0.0;
    int trials = 0;
    double delay_rmse = 0.0;        // samples
    double doppler_rmse = 0.0;      // Hz
    double delay_ci_low = 0.0;      // 95% bootstrap percentile interval
    double delay_ci_high = 0.0;
    double doppler_ci_low = 0.0;
    double doppler_ci_high = 0.0;
    double mta_s = 0.0;             // mean correlate+peak wall-clock
    double mean_mac = 0.0;
    double wallclock_gain = 1.0;    // MTA(uniform at this snr) / MTA(this)
};

// Per-pattern aggregate over all SNR cells (the acquisition-time table rows).
struct PatternSummary {
    std::string pattern_label;
    double keep_ratio = 1.0;     // K/L
    double mta_ms = 0.0;
    double wallclock_gain = 1.0; // MTA(uniform) / MTA(pattern)
    double mac_gain = 1.0;       // mean_mac(uniform) / mean_mac(pattern)
    double mean_mac = 0.0;
};

struct CampaignReport {
    std::vector<std::string> pattern_labels;  // uniform benchmark first
    std::vector<double> snr_list_db;
    std::vector<CampaignCell> cells;          // pattern-major, SNR within
    std::vector<PatternSummary> summaries;

    const CampaignCell& cell(size_t pattern_idx, size_t snr_idx) const {
        return cells[pattern_idx * snr_list_db.size() + snr_idx];
    }
};

// One acquisition: truth drawn from trial_seed (delay uniform on {0..d_max},
// Doppler uniform continuous on [-nu_max, +nu_max]), received buffer
// synthesized and masked, reduced_correlate + glrt_peak timed.
TrialRecord run_trial(const ScenarioConfig& cfg, const CosetPattern& pattern, double snr_db,
                      uint64_t trial_seed);

// Full sweep over (uniform + cfg.patterns) x snr_list_db, cfg.trials each.
// Per-trial seeds split deterministically from master_seed; any failed trial
// aborts the campaign with the offending (pattern, snr, trial) named.
CampaignReport run_campaign(const ScenarioConfig& cfg);

// (delay_rmse in samples, doppler_rmse in Hz); rejects empty input.
std::pair<double, double> compute_rmse(const std::vector<TrialRecord>& records);

// Delimited outputs. config_echo is written first as "# config: <echo>" so
// every artifact carries the resolved configuration.
void write_rmse_csv(const std::string& path, const CampaignReport& report,
                    const std::string& config_echo);
void write_mta_csv(const std::string& path, const CampaignReport& report,
                   const std::string& config_echo);
// axis = delay or doppler RMSE: "# snr_db <pattern...>" header then one row
// per SNR, one column per pattern.
enum class FigAxis { delay, doppler };
void write_fig_data(const std::string& path, const CampaignReport& report, FigAxis axis,
                    const std::string& config_echo);

// Fixed-width acquisition-time table (pattern, K/L, MTA ms, gains).
std::string summary_table(const CampaignReport& report);

}  // namespace mcacq

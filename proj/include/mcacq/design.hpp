// Offline exhaustive coset-pattern selection: every C(L,K) pattern is scored
// with the same reduced acquisition metric the receiver runs, and the ranking
// minimizes J = mean sidelobe-to-peak ratio / retained-energy balance.

#pragma once

#include "mcacq/correlator.hpp"
#include "mcacq/coset.hpp"
#include "mcacq/pilot.hpp"

#include <map>
#include <optional>

namespace mcacq {

struct DesignConfig {
    int period = 8;   // L
    int kept = 4;     // K
    Pilot pilot;
    SearchGrid grid;  // delays 0..d_max crossed with the design Doppler bins
    std::vector<double> design_dopplers_hz;  // probe Dopplers, snapped to grid bins
    uint64_t enumeration_cap = kDefaultEnumerationCap;
    int workers = 1;

    int d_max() const { return grid.d_max; }
    size_t observation_length() const { return pilot.length() + static_cast<size_t>(grid.d_max); }
    void validate() const;
};

// Grid from make_search_grid; probe Dopplers {-nu_max, 0, +nu_max} snapped to
// the nearest bins.
DesignConfig make_design_config(int l, int k, Pilot pilot, int d_max, double nu_max_hz,
                                double t_obs_s, double sample_period_s);

struct DesignScore {
    double mean_spr = 0.0;      // average over reference delays of the worst-case SPR
    double mean_balance = 0.0;  // retained-energy balance (constant over reference delays)
    double cost = 0.0;          // J = mean_spr / mean_balance; +inf when degenerate
    double balance = 0.0;
    std::map<int, double> per_delay_spr;
    bool degenerate = false;
};

// {floor(d_max/4), floor(d_max/2), floor(3*d_max/4)}, deduplicated, ascending.
std::vector<int> reference_delays(int d_max);

// 3x3 cell neighborhood around the true peak, clipped at grid edges.
struct GuardRegion {
    int d0 = 0;
    int i0 = 0;
    bool contains(int d, int i) const { return std::abs(d - d0) <= 1 && std::abs(i - i0) <= 1; }
};

// Largest metric value outside the guard region divided by the peak value.
// Invalid delays are excluded; a zero peak is a degenerate pattern.
double sidelobe_peak_ratio(const AcquisitionSurface& surface, int d0, int i0);

// min over d of D(d) / max over d of D(d); 0 when some delay has no coverage,
// error when every delay has none.
double energy_balance(const std::vector<double>& per_delay_energy);

DesignScore score_pattern(const CosetPattern& pattern, const DesignConfig& cfg);

// Every pattern scored, sorted ascending by cost (ties by lexicographic coset
// order). Degenerate patterns stay in the ranking with +inf cost.
std::vector<std::pair<CosetPattern, DesignScore>> design_cosets(const DesignConfig& cfg);

// Pattern file: L, K, cosets, and optionally the designer's score and the
// design configuration that produced it. Round-trips bit-exactly.
struct PatternProvenance {
    std::string pilot_label;
    int d_max = 0;
    std::vector<double> design_dopplers_hz;
};

struct PatternFile {
    CosetPattern pattern;
    std::optional<DesignScore> score;
    std::optional<PatternProvenance> provenance;
};

void save_pattern_file(const std::string& path, const PatternFile& pf);
PatternFile load_pattern_file(const std::string& path);

// Ranked design report (top_r entries) with the configuration echo.
void save_design_report(const std::string& path, const DesignConfig& cfg,
                        const std::vector<std::pair<CosetPattern, DesignScore>>& ranked, size_t top_r);

}  // namespace mcacq

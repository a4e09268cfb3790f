// Full-rate and reduced delay-Doppler correlators, the normalized acquisition
// metric Lambda(d, nu) = |chi(d, nu)|^2 / D(d), peak extraction, and the joint
// multi-pilot search. The reduced correlator evaluates the matched-filter sum
// directly on the retained index set; no FFT shortcut exists for non-uniform
// retained indices, and the MAC ledger is the complexity figure of merit.

#pragma once

#include "mcacq/coset.hpp"
#include "mcacq/pilot.hpp"
#include "mcacq/types.hpp"

namespace mcacq {

struct DopplerGrid {
    std::vector<double> bins_hz;
    double bin_width_hz = 0.0;
};

// Bin width 0.443 / T_obs (<= 3 dB scalloping); bins k*width for all k with
// |k*width| <= nu_max, built symmetrically outward from an exact 0 Hz bin.
DopplerGrid make_doppler_grid(double nu_max_hz, double t_obs_s);

struct SearchGrid {
    int d_max = 0;                      // delays searched: 0..d_max
    std::vector<double> doppler_bins_hz;  // ascending, symmetric, contains 0
    double bin_width_hz = 0.0;
    double sample_period_s = 0.0;

    int num_bins() const { return static_cast<int>(doppler_bins_hz.size()); }
    int nearest_bin(double nu_hz) const;
    int zero_bin() const { return nearest_bin(0.0); }
    void validate() const;
};

SearchGrid make_search_grid(int d_max, double nu_max_hz, double t_obs_s, double sample_period_s);

struct AcquisitionSurface {
    SearchGrid grid;
    std::vector<double> lambda;      // (d_max+1) x num_bins, row-major in d
    std::vector<double> denom;       // retained pilot energy D(d), one per delay
    std::vector<cplx> chi;           // raw correlations, kept only on request
    std::vector<int> invalid_delays; // delays with D(d) == 0, excluded from the peak
    uint64_t mac_count = 0;

    double lambda_at(int d, int bin) const { return lambda[static_cast<size_t>(d) * grid.num_bins() + bin]; }
    cplx chi_at(int d, int bin) const { return chi[static_cast<size_t>(d) * grid.num_bins() + bin]; }
    bool delay_valid(int d) const { return denom[d] > 0.0; }
};

struct AcquisitionResult {
    int delay_hat = 0;
    double doppler_hat_hz = 0.0;
    double peak_value = 0.0;
    int pilot_index_hat = -1;  // set by joint_search, -1 otherwise
    uint64_t mac_count = 0;
};

struct CorrelateOptions {
    bool retain_chi = false;
    int workers = 1;  // cells are partitioned by delay row; results identical for any count
};

// Caches the exp(-j*2*pi*nu*n*Ts) table shared across calls with the same
// (grid, n_obs); table construction is excluded from the MAC ledger.
class CorrelatorWorkspace {
  public:
    void prepare(const SearchGrid& grid, size_t n_obs);
    const double* row_re(size_t n) const { return tab_re_.data() + n * num_bins_; }
    const double* row_im(size_t n) const { return tab_im_.data() + n * num_bins_; }

  private:
    std::vector<double> tab_re_;
    std::vector<double> tab_im_;
    std::vector<double> bins_;
    size_t n_obs_ = 0;
    size_t num_bins_ = 0;
    double sample_period_s_ = 0.0;
};

// chi(d, nu) = sum over retained n of r[n] * conj(s[n-d]) * exp(-j*2*pi*nu*n*Ts),
// Lambda = |chi|^2 / D(d) with D(d) the retained pilot energy at delay d.
// Delays with D(d) == 0 are flagged invalid, never divided by.
AcquisitionSurface reduced_correlate(const cvec& r, const SamplingMask& mask, const Pilot& pilot,
                                     const SearchGrid& grid, const CorrelateOptions& opts = {},
                                     CorrelatorWorkspace* ws = nullptr);

// Same engine with the implicit all-ones mask.
AcquisitionSurface full_correlate(const cvec& r, const Pilot& pilot, const SearchGrid& grid,
                                  const CorrelateOptions& opts = {}, CorrelatorWorkspace* ws = nullptr);

// Argmax over valid cells. Ties: smallest delay, then smallest |nu|, then
// negative nu before positive.
AcquisitionResult glrt_peak(const AcquisitionSurface& surface);

// Peak or nullopt when every delay is invalid.
std::optional<AcquisitionResult> try_glrt_peak(const AcquisitionSurface& surface);

// Global maximizer over (pilot, delay, doppler); glrt_peak's tie-break
// extended with smallest pilot index first. mac_count sums over pilots.
AcquisitionResult joint_search(const cvec& r, const SamplingMask& mask, const std::vector<Pilot>& pilots,
                               const SearchGrid& grid, const CorrelateOptions& opts = {},
                               CorrelatorWorkspace* ws = nullptr);

// Delimited dump (d, nu_hz, lambda, d_energy) for plots and debugging.
void dump_surface(const AcquisitionSurface& surface, const std::string& path);

}  // namespace mcacq

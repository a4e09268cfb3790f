#include "mcacq/correlator.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <thread>

namespace mcacq {

DopplerGrid make_doppler_grid(double nu_max_hz, double t_obs_s) {
    if (nu_max_hz <= 0.0) throw std::invalid_argument("make_doppler_grid: nu_max must be positive");
    if (t_obs_s <= 0.0) throw std::invalid_argument("make_doppler_grid: t_obs must be positive");
    DopplerGrid g;
    g.bin_width_hz = 0.443 / t_obs_s;
    int k_max = 0;
    while (static_cast<double>(k_max + 1) * g.bin_width_hz <= nu_max_hz) ++k_max;
    g.bins_hz.reserve(2 * k_max + 1);
    for (int k = -k_max; k <= k_max; ++k) g.bins_hz.push_back(static_cast<double>(k) * g.bin_width_hz);
    return g;
}

int SearchGrid::nearest_bin(double nu_hz) const {
    const auto& b = doppler_bins_hz;
    auto it = std::lower_bound(b.begin(), b.end(), nu_hz);
    if (it == b.begin()) return 0;
    if (it == b.end()) return static_cast<int>(b.size()) - 1;
    const size_t hi = static_cast<size_t>(it - b.begin());
    const size_t lo = hi - 1;
    // ties go to the smaller bin value
    return (nu_hz - b[lo] < b[hi] - nu_hz) ? static_cast<int>(lo) : ((b[hi] - nu_hz < nu_hz - b[lo]) ? static_cast<int>(hi) : static_cast<int>(lo));
}

void SearchGrid::validate() const {
    if (d_max < 0) throw std::invalid_argument("search grid: d_max must be >= 0");
    if (sample_period_s <= 0.0) throw std::invalid_argument("search grid: sample period must be positive");
    if (doppler_bins_hz.empty()) throw std::invalid_argument("search grid: no doppler bins");
    for (size_t i = 1; i < doppler_bins_hz.size(); ++i)
        if (doppler_bins_hz[i] <= doppler_bins_hz[i - 1])
            throw std::invalid_argument("search grid: bins must be strictly increasing");
    const size_t b = doppler_bins_hz.size();
    for (size_t i = 0; i < b; ++i)
        if (doppler_bins_hz[i] != -doppler_bins_hz[b - 1 - i])
            throw std::invalid_argument("search grid: bins must be symmetric about 0");
}

SearchGrid make_search_grid(int d_max, double nu_max_hz, double t_obs_s, double sample_period_s) {
    DopplerGrid dg = make_doppler_grid(nu_max_hz, t_obs_s);
    SearchGrid g;
    g.d_max = d_max;
    g.doppler_bins_hz = std::move(dg.bins_hz);
    g.bin_width_hz = dg.bin_width_hz;
    g.sample_period_s = sample_period_s;
    g.validate();
    return g;
}

void CorrelatorWorkspace::prepare(const SearchGrid& grid, size_t n_obs) {
    if (n_obs == n_obs_ && sample_period_s_ == grid.sample_period_s &&
        bins_ == grid.doppler_bins_hz)
        return;
    n_obs_ = n_obs;
    sample_period_s_ = grid.sample_period_s;
    bins_ = grid.doppler_bins_hz;
    num_bins_ = bins_.size();
    tab_re_.resize(n_obs_ * num_bins_);
    tab_im_.resize(n_obs_ * num_bins_);
    for (size_t n = 0; n < n_obs_; ++n) {
        double* re = tab_re_.data() + n * num_bins_;
        double* im = tab_im_.data() + n * num_bins_;
        const double t = static_cast<double>(n) * sample_period_s_;
        for (size_t i = 0; i < num_bins_; ++i) {
            const double ph = -kTwoPi * bins_[i] * t;
            re[i] = std::cos(ph);
            im[i] = std::sin(ph);
        }
    }
}

namespace {

// One delay row: chi(d, .) over all bins, D(d), and the per-row MAC count.
// The row is summed sequentially by a single caller so results do not depend
// on how rows are distributed across workers.
void correlate_row(int d, const cvec& r, const cvec& s, const std::vector<int>& omega,
                   const CorrelatorWorkspace& ws, int num_bins, double* acc_re, double* acc_im,
                   AcquisitionSurface& out, bool retain_chi, uint64_t& macs) {
    const int ns = static_cast<int>(s.size());
    const auto lo_it = std::lower_bound(omega.begin(), omega.end(), d);
    const auto hi_it = std::lower_bound(lo_it, omega.end(), d + ns);

    double energy = 0.0;
    for (auto it = lo_it; it != hi_it; ++it) energy += std::norm(s[*it - d]);
    out.denom[d] = energy;

    const size_t row = static_cast<size_t>(d) * num_bins;
    if (energy == 0.0) {
        for (int i = 0; i < num_bins; ++i) out.lambda[row + i] = 0.0;
        if (retain_chi)
            for (int i = 0; i < num_bins; ++i) out.chi[row + i] = cplx{0.0, 0.0};
        return;
    }

    std::fill(acc_re, acc_re + num_bins, 0.0);
    std::fill(acc_im, acc_im + num_bins, 0.0);
    for (auto it = lo_it; it != hi_it; ++it) {
        const int n = *it;
        const cplx base = r[n] * std::conj(s[n - d]);
        const double br = base.real();
        const double bi = base.imag();
        const double* tr = ws.row_re(static_cast<size_t>(n));
        const double* ti = ws.row_im(static_cast<size_t>(n));
        for (int i = 0; i < num_bins; ++i) {
            acc_re[i] += br * tr[i] - bi * ti[i];
            acc_im[i] += br * ti[i] + bi * tr[i];
        }
    }
    macs += static_cast<uint64_t>(hi_it - lo_it) * static_cast<uint64_t>(num_bins);

    const double inv_energy = 1.0 / energy;
    for (int i = 0; i < num_bins; ++i)
        out.lambda[row + i] = (acc_re[i] * acc_re[i] + acc_im[i] * acc_im[i]) * inv_energy;
    if (retain_chi)
        for (int i = 0; i < num_bins; ++i) out.chi[row + i] = cplx{acc_re[i], acc_im[i]};
}

}  // namespace

AcquisitionSurface reduced_correlate(const cvec& r, const SamplingMask& mask, const Pilot& pilot,
                                     const SearchGrid& grid, const CorrelateOptions& opts,
                                     CorrelatorWorkspace* ws) {
    grid.validate();
    if (mask.size() != r.size()) throw std::invalid_argument("reduced_correlate: mask/buffer length mismatch");
    if (r.size() < pilot.length() + static_cast<size_t>(grid.d_max))
        throw std::invalid_argument("reduced_correlate: observation shorter than pilot length plus d_max");

    CorrelatorWorkspace local_ws;
    CorrelatorWorkspace& w = ws ? *ws : local_ws;
    w.prepare(grid, r.size());

    const std::vector<int> omega = retained_indices(mask);
    const int num_bins = grid.num_bins();
    const int num_delays = grid.d_max + 1;

    AcquisitionSurface out;
    out.grid = grid;
    out.lambda.assign(static_cast<size_t>(num_delays) * num_bins, 0.0);
    out.denom.assign(num_delays, 0.0);
    if (opts.retain_chi) out.chi.assign(static_cast<size_t>(num_delays) * num_bins, cplx{0.0, 0.0});

    const int workers = std::max(1, opts.workers);
    if (workers == 1 || num_delays == 1) {
        std::vector<double> acc_re(num_bins), acc_im(num_bins);
        uint64_t macs = 0;
        for (int d = 0; d < num_delays; ++d)
            correlate_row(d, r, pilot.samples, omega, w, num_bins, acc_re.data(), acc_im.data(), out,
                          opts.retain_chi, macs);
        out.mac_count = macs;
    } else {
        const int nw = std::min(workers, num_delays);
        std::vector<uint64_t> worker_macs(nw, 0);
        std::vector<std::thread> pool;
        pool.reserve(nw);
        for (int t = 0; t < nw; ++t) {
            const int lo = static_cast<int>(static_cast<int64_t>(num_delays) * t / nw);
            const int hi = static_cast<int>(static_cast<int64_t>(num_delays) * (t + 1) / nw);
            pool.emplace_back([&, lo, hi, t] {
                std::vector<double> acc_re(num_bins), acc_im(num_bins);
                for (int d = lo; d < hi; ++d)
                    correlate_row(d, r, pilot.samples, omega, w, num_bins, acc_re.data(), acc_im.data(),
                                  out, opts.retain_chi, worker_macs[t]);
            });
        }
        for (auto& th : pool) th.join();
        for (uint64_t m : worker_macs) out.mac_count += m;
    }

    for (int d = 0; d < num_delays; ++d)
        if (out.denom[d] == 0.0) out.invalid_delays.push_back(d);
    return out;
}

AcquisitionSurface full_correlate(const cvec& r, const Pilot& pilot, const SearchGrid& grid,
                                  const CorrelateOptions& opts, CorrelatorWorkspace* ws) {
    SamplingMask all_ones;
    all_ones.bits.assign(r.size(), 1);
    all_ones.retained_count = r.size();
    return reduced_correlate(r, all_ones, pilot, grid, opts, ws);
}

std::optional<AcquisitionResult> try_glrt_peak(const AcquisitionSurface& surface) {
    const int num_bins = surface.grid.num_bins();
    const auto& bins = surface.grid.doppler_bins_hz;
    bool have = false;
    double best_v = 0.0;
    int best_d = 0, best_i = 0;
    for (int d = 0; d <= surface.grid.d_max; ++d) {
        if (!surface.delay_valid(d)) continue;
        const size_t row = static_cast<size_t>(d) * num_bins;
        for (int i = 0; i < num_bins; ++i) {
            const double v = surface.lambda[row + i];
            bool better;
            if (!have) {
                better = true;
            } else if (v != best_v) {
                better = v > best_v;
            } else if (d != best_d) {
                better = false;  // earlier d already held
            } else {
                const double a = std::abs(bins[i]);
                const double b = std::abs(bins[best_i]);
                better = (a != b) ? a < b : bins[i] < bins[best_i];
            }
            if (better) {
                have = true;
                best_v = v;
                best_d = d;
                best_i = i;
            }
        }
    }
    if (!have) return std::nullopt;
    AcquisitionResult res;
    res.delay_hat = best_d;
    res.doppler_hat_hz = bins[best_i];
    res.peak_value = best_v;
    res.mac_count = surface.mac_count;
    return res;
}

AcquisitionResult glrt_peak(const AcquisitionSurface& surface) {
    auto res = try_glrt_peak(surface);
    if (!res) throw DataError("glrt_peak: every searched delay has zero retained pilot energy");
    return *res;
}

AcquisitionResult joint_search(const cvec& r, const SamplingMask& mask, const std::vector<Pilot>& pilots,
                               const SearchGrid& grid, const CorrelateOptions& opts,
                               CorrelatorWorkspace* ws) {
    if (pilots.empty()) throw std::invalid_argument("joint_search: empty pilot family");
    std::optional<AcquisitionResult> best;
    uint64_t total_macs = 0;
    for (size_t m = 0; m < pilots.size(); ++m) {
        AcquisitionSurface surf = reduced_correlate(r, mask, pilots[m], grid, opts, ws);
        total_macs += surf.mac_count;
        auto peak = try_glrt_peak(surf);
        if (!peak) continue;
        peak->pilot_index_hat = static_cast<int>(m);
        // equal peak values keep the smaller pilot index
        if (!best || peak->peak_value > best->peak_value) best = peak;
    }
    if (!best) throw DataError("joint_search: no valid acquisition cell for any pilot");
    best->mac_count = total_macs;
    return *best;
}

void dump_surface(const AcquisitionSurface& surface, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("dump_surface: cannot open " + path);
    out << "d,nu_hz,lambda,d_energy\n";
    char line[160];
    const int num_bins = surface.grid.num_bins();
    for (int d = 0; d <= surface.grid.d_max; ++d) {
        for (int i = 0; i < num_bins; ++i) {
            std::snprintf(line, sizeof(line), "%d,%.9g,%.17g,%.17g\n", d,
                          surface.grid.doppler_bins_hz[i], surface.lambda_at(d, i), surface.denom[d]);
            out << line;
        }
    }
}

}  // namespace mcacq

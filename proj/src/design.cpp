#include "mcacq/design.hpp"

#include "mcacq/signal.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

namespace mcacq {

using json = nlohmann::json;

void DesignConfig::validate() const {
    if (kept < 1 || kept > period) throw ConfigError("design: require 1 <= K <= L");
    if (grid.d_max < 4) throw ConfigError("design: d_max must be >= 4 so reference delays are distinct");
    grid.validate();
    if (design_dopplers_hz.empty()) throw ConfigError("design: probe Doppler set must be nonempty");
    if (std::find(design_dopplers_hz.begin(), design_dopplers_hz.end(), 0.0) == design_dopplers_hz.end())
        throw ConfigError("design: probe Doppler set must contain 0 Hz");
    if (pilot.length() == 0 || pilot.energy() <= 0.0) throw ConfigError("design: pilot has no energy");
}

DesignConfig make_design_config(int l, int k, Pilot pilot, int d_max, double nu_max_hz,
                                double t_obs_s, double sample_period_s) {
    DesignConfig cfg;
    cfg.period = l;
    cfg.kept = k;
    cfg.pilot = std::move(pilot);
    cfg.grid = make_search_grid(d_max, nu_max_hz, t_obs_s, sample_period_s);
    const auto& bins = cfg.grid.doppler_bins_hz;
    cfg.design_dopplers_hz = {bins.front(), 0.0, bins.back()};
    std::sort(cfg.design_dopplers_hz.begin(), cfg.design_dopplers_hz.end());
    cfg.design_dopplers_hz.erase(
        std::unique(cfg.design_dopplers_hz.begin(), cfg.design_dopplers_hz.end()),
        cfg.design_dopplers_hz.end());
    cfg.validate();
    return cfg;
}

std::vector<int> reference_delays(int d_max) {
    if (d_max < 4) throw std::invalid_argument("reference_delays: d_max must be >= 4");
    std::vector<int> d = {d_max / 4, d_max / 2, 3 * d_max / 4};
    std::sort(d.begin(), d.end());
    d.erase(std::unique(d.begin(), d.end()), d.end());
    return d;
}

double sidelobe_peak_ratio(const AcquisitionSurface& surface, int d0, int i0) {
    const int num_bins = surface.grid.num_bins();
    const int num_delays = surface.grid.d_max + 1;
    if (d0 < 0 || d0 >= num_delays || i0 < 0 || i0 >= num_bins)
        throw std::invalid_argument("sidelobe_peak_ratio: peak cell outside the grid");
    const int64_t guard_d = std::min(d0 + 1, num_delays - 1) - std::max(d0 - 1, 0) + 1;
    const int64_t guard_i = std::min(i0 + 1, num_bins - 1) - std::max(i0 - 1, 0) + 1;
    if (static_cast<int64_t>(num_delays) * num_bins <= guard_d * guard_i)
        throw std::invalid_argument("sidelobe_peak_ratio: grid not larger than the guard region");

    const double peak = surface.delay_valid(d0) ? surface.lambda_at(d0, i0) : 0.0;
    if (peak <= 0.0)
        throw DegeneratePatternError("sidelobe_peak_ratio: zero metric at the true peak cell");

    const GuardRegion guard{d0, i0};
    double worst = 0.0;
    for (int d = 0; d < num_delays; ++d) {
        if (!surface.delay_valid(d)) continue;
        for (int i = 0; i < num_bins; ++i) {
            if (guard.contains(d, i)) continue;
            worst = std::max(worst, surface.lambda_at(d, i));
        }
    }
    return worst / peak;
}

double energy_balance(const std::vector<double>& per_delay_energy) {
    if (per_delay_energy.empty()) throw std::invalid_argument("energy_balance: empty energy vector");
    double lo = per_delay_energy[0], hi = per_delay_energy[0];
    for (double v : per_delay_energy) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi <= 0.0) throw DegeneratePatternError("energy_balance: no retained pilot energy at any delay");
    return lo / hi;
}

namespace {

// Everything fixed across candidate patterns: the reference delays, the probe
// Doppler bins, and the noiseless design signals (one per (d0, nu_p) pair).
struct DesignContext {
    const DesignConfig* cfg = nullptr;
    std::vector<int> ref_delays;
    std::vector<int> probe_bins;          // bin index of each probe Doppler
    std::vector<double> probe_dopplers;   // snapped probe values
    std::vector<cvec> signals;            // ref_delays.size() x probe count, row-major
    size_t n_obs = 0;
};

DesignContext make_context(const DesignConfig& cfg) {
    DesignContext ctx;
    ctx.cfg = &cfg;
    ctx.ref_delays = reference_delays(cfg.grid.d_max);
    ctx.n_obs = cfg.observation_length();
    for (double nu : cfg.design_dopplers_hz) {
        const int bin = cfg.grid.nearest_bin(nu);
        ctx.probe_bins.push_back(bin);
        ctx.probe_dopplers.push_back(cfg.grid.doppler_bins_hz[bin]);
    }
    for (int d0 : ctx.ref_delays) {
        for (double nu_p : ctx.probe_dopplers) {
            SynthesisParams p;
            p.delay_samples = d0;
            p.doppler_hz = nu_p;
            p.sample_period_s = cfg.grid.sample_period_s;
            ctx.signals.push_back(synthesize_received(cfg.pilot, p, ctx.n_obs));
        }
    }
    return ctx;
}

// Retained pilot energy per delay, identical arithmetic to the correlator's
// denominator, evaluated without paying for a full surface.
std::vector<double> retained_energies(const std::vector<int>& omega, const Pilot& pilot, int d_max) {
    const int ns = static_cast<int>(pilot.length());
    std::vector<double> denom(static_cast<size_t>(d_max) + 1, 0.0);
    for (int d = 0; d <= d_max; ++d) {
        const auto lo = std::lower_bound(omega.begin(), omega.end(), d);
        const auto hi = std::lower_bound(lo, omega.end(), d + ns);
        double e = 0.0;
        for (auto it = lo; it != hi; ++it) e += std::norm(pilot.samples[*it - d]);
        denom[d] = e;
    }
    return denom;
}

DesignScore score_with_context(const DesignContext& ctx, const CosetPattern& pattern,
                               CorrelatorWorkspace& ws) {
    const DesignConfig& cfg = *ctx.cfg;
    pattern.validate();

    const SamplingMask mask = make_mask(pattern, ctx.n_obs);
    const std::vector<int> omega = retained_indices(mask);

    DesignScore score;
    const std::vector<double> denom = retained_energies(omega, cfg.pilot, cfg.grid.d_max);
    double balance = 0.0;
    try {
        balance = energy_balance(denom);
    } catch (const DegeneratePatternError&) {
        balance = 0.0;
    }
    score.balance = balance;
    score.mean_balance = balance;
    if (balance <= 0.0) {
        score.degenerate = true;
        score.cost = std::numeric_limits<double>::infinity();
        return score;
    }

    const size_t probes = ctx.probe_dopplers.size();
    KahanSum spr_sum;
    for (size_t a = 0; a < ctx.ref_delays.size(); ++a) {
        const int d0 = ctx.ref_delays[a];
        double worst_spr = 0.0;
        for (size_t b = 0; b < probes; ++b) {
            const cvec& r = ctx.signals[a * probes + b];
            AcquisitionSurface surf = reduced_correlate(r, mask, cfg.pilot, cfg.grid, {}, &ws);
            double spr;
            try {
                spr = sidelobe_peak_ratio(surf, d0, ctx.probe_bins[b]);
            } catch (const DegeneratePatternError&) {
                score.degenerate = true;
                score.cost = std::numeric_limits<double>::infinity();
                return score;
            }
            worst_spr = std::max(worst_spr, spr);
        }
        score.per_delay_spr[d0] = worst_spr;
        spr_sum.add(worst_spr);
    }
    score.mean_spr = spr_sum.value() / static_cast<double>(ctx.ref_delays.size());
    score.cost = score.mean_spr / score.mean_balance;
    return score;
}

}  // namespace

DesignScore score_pattern(const CosetPattern& pattern, const DesignConfig& cfg) {
    cfg.validate();
    const DesignContext ctx = make_context(cfg);
    CorrelatorWorkspace ws;
    return score_with_context(ctx, pattern, ws);
}

std::vector<std::pair<CosetPattern, DesignScore>> design_cosets(const DesignConfig& cfg) {
    cfg.validate();
    const std::vector<CosetPattern> candidates = enumerate_patterns(cfg.period, cfg.kept, cfg.enumeration_cap);
    const DesignContext ctx = make_context(cfg);

    std::vector<DesignScore> scores(candidates.size());
    const int workers = std::max(1, cfg.workers);
    if (workers == 1 || candidates.size() <= 1) {
        CorrelatorWorkspace ws;
        for (size_t i = 0; i < candidates.size(); ++i)
            scores[i] = score_with_context(ctx, candidates[i], ws);
    } else {
        const int nw = static_cast<int>(std::min<size_t>(workers, candidates.size()));
        std::vector<std::thread> pool;
        pool.reserve(nw);
        for (int t = 0; t < nw; ++t) {
            const size_t lo = candidates.size() * t / nw;
            const size_t hi = candidates.size() * (t + 1) / nw;
            pool.emplace_back([&, lo, hi] {
                CorrelatorWorkspace ws;
                for (size_t i = lo; i < hi; ++i)
                    scores[i] = score_with_context(ctx, candidates[i], ws);
            });
        }
        for (auto& th : pool) th.join();
    }

    std::vector<size_t> order(candidates.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (scores[a].cost != scores[b].cost) return scores[a].cost < scores[b].cost;
        return candidates[a].cosets < candidates[b].cosets;
    });

    std::vector<std::pair<CosetPattern, DesignScore>> ranked;
    ranked.reserve(candidates.size());
    for (size_t i : order) ranked.emplace_back(candidates[i], scores[i]);
    return ranked;
}

namespace {

json score_to_json(const DesignScore& s) {
    json j;
    j["mean_spr"] = s.mean_spr;
    j["mean_balance"] = s.mean_balance;
    j["cost"] = s.degenerate ? json("inf") : json(s.cost);
    j["balance"] = s.balance;
    j["degenerate"] = s.degenerate;
    json spr = json::object();
    for (const auto& [d0, v] : s.per_delay_spr) spr[std::to_string(d0)] = v;
    j["per_delay_spr"] = spr;
    return j;
}

DesignScore score_from_json(const json& j) {
    DesignScore s;
    s.mean_spr = j.at("mean_spr").get<double>();
    s.mean_balance = j.at("mean_balance").get<double>();
    s.degenerate = j.at("degenerate").get<bool>();
    s.cost = s.degenerate ? std::numeric_limits<double>::infinity() : j.at("cost").get<double>();
    s.balance = j.at("balance").get<double>();
    for (const auto& [key, v] : j.at("per_delay_spr").items())
        s.per_delay_spr[std::stoi(key)] = v.get<double>();
    return s;
}

}  // namespace

void save_pattern_file(const std::string& path, const PatternFile& pf) {
    pf.pattern.validate();
    json j;
    j["l"] = pf.pattern.period;
    j["k"] = pf.pattern.kept();
    j["cosets"] = pf.pattern.cosets;
    if (pf.score) j["score"] = score_to_json(*pf.score);
    if (pf.provenance) {
        j["design"] = {{"pilot_label", pf.provenance->pilot_label},
                       {"d_max", pf.provenance->d_max},
                       {"design_dopplers_hz", pf.provenance->design_dopplers_hz}};
    }
    std::ofstream out(path);
    if (!out) throw DataError("save_pattern_file: cannot open " + path);
    out << j.dump(2) << "\n";
}

PatternFile load_pattern_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("load_pattern_file: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError("load_pattern_file: " + path + ": " + e.what());
    }
    PatternFile pf;
    try {
        pf.pattern.period = j.at("l").get<int>();
        pf.pattern.cosets = j.at("cosets").get<std::vector<int>>();
        if (j.at("k").get<int>() != pf.pattern.kept())
            throw DataError("load_pattern_file: k does not match the coset count");
        if (j.contains("score")) pf.score = score_from_json(j["score"]);
        if (j.contains("design")) {
            PatternProvenance prov;
            prov.pilot_label = j["design"].at("pilot_label").get<std::string>();
            prov.d_max = j["design"].at("d_max").get<int>();
            prov.design_dopplers_hz = j["design"].at("design_dopplers_hz").get<std::vector<double>>();
            pf.provenance = prov;
        }
    } catch (const json::exception& e) {
        throw DataError("load_pattern_file: " + path + ": " + e.what());
    }
    try {
        pf.pattern.validate();
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("load_pattern_file: ") + e.what());
    }
    return pf;
}

void save_design_report(const std::string& path, const DesignConfig& cfg,
                        const std::vector<std::pair<CosetPattern, DesignScore>>& ranked, size_t top_r) {
    json j;
    j["config"] = {{"l", cfg.period},
                   {"k", cfg.kept},
                   {"pilot_label", cfg.pilot.label},
                   {"d_max", cfg.grid.d_max},
                   {"design_dopplers_hz", cfg.design_dopplers_hz},
                   {"doppler_bin_width_hz", cfg.grid.bin_width_hz},
                   {"num_doppler_bins", cfg.grid.num_bins()},
                   {"sample_period_s", cfg.grid.sample_period_s},
                   {"observation_length", cfg.observation_length()}};
    j["candidates_total"] = ranked.size();
    json entries = json::array();
    for (size_t i = 0; i < ranked.size() && i < top_r; ++i) {
        json e = score_to_json(ranked[i].second);
        e["cosets"] = ranked[i].first.cosets;
        e["rank"] = i;
        entries.push_back(e);
    }
    j["ranked"] = entries;
    std::ofstream out(path);
    if (!out) throw DataError("save_design_report: cannot open " + path);
    out << j.dump(2) << "\n";
}

}  // namespace mcacq

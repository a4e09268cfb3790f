#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mcacq/correlator.hpp"
#include "mcacq/signal.hpp"

#include <filesystem>
#include <fstream>

using namespace mcacq;

namespace {

// Straight-line evaluation of the correlator definition, kept independent of
// the library kernel (complex std::exp per cell, no phase table, no windowed
// index arithmetic) so the two implementations can cross-check each other.
struct NaiveSurface {
    std::vector<double> lambda;  // (d_max+1) x bins
    std::vector<double> denom;
};

NaiveSurface naive_correlate(const cvec& r, const SamplingMask& mask, const Pilot& pilot,
                             const SearchGrid& grid) {
    const int ns = static_cast<int>(pilot.length());
    const int bins = grid.num_bins();
    NaiveSurface out;
    out.lambda.assign(static_cast<size_t>(grid.d_max + 1) * bins, 0.0);
    out.denom.assign(grid.d_max + 1, 0.0);
    for (int d = 0; d <= grid.d_max; ++d) {
        double den = 0.0;
        for (size_t n = 0; n < r.size(); ++n) {
            const int k = static_cast<int>(n) - d;
            if (mask.bits[n] && k >= 0 && k < ns) den += std::norm(pilot.samples[k]);
        }
        out.denom[d] = den;
        if (den == 0.0) continue;
        for (int i = 0; i < bins; ++i) {
            cplx chi{0.0, 0.0};
            for (size_t n = 0; n < r.size(); ++n) {
                const int k = static_cast<int>(n) - d;
                if (!mask.bits[n] || k < 0 || k >= ns) continue;
                const double ph = -kTwoPi * grid.doppler_bins_hz[i] * static_cast<double>(n) *
                                  grid.sample_period_s;
                chi += r[n] * std::conj(pilot.samples[k]) * std::exp(cplx{0.0, ph});
            }
            out.lambda[static_cast<size_t>(d) * bins + i] = std::norm(chi) / den;
        }
    }
    return out;
}

SamplingMask ones_mask(size_t n) {
    SamplingMask m;
    m.bits.assign(n, 1);
    m.retained_count = n;
    return m;
}

cvec random_buffer(size_t n, uint64_t seed) {
    Rng64 rng(seed);
    cvec out(n);
    for (auto& v : out) {
        double re, im;
        rng.next_gaussian_pair(re, im);
        v = cplx{re, im};
    }
    return out;
}

constexpr double kTs = 1.0 / 3.84e6;

}  // namespace

TEST_CASE("the Doppler grid at the default scenario is 91 bins of 443 Hz") {
    const DopplerGrid g = make_doppler_grid(20e3, 1e-3);
    CHECK(g.bin_width_hz == doctest::Approx(443.0).epsilon(0.5 / 443.0));
    REQUIRE(g.bins_hz.size() == 91);
    CHECK(g.bins_hz[45] == 0.0);
    CHECK(g.bins_hz.front() == doctest::Approx(-45 * 443.0));
    CHECK(g.bins_hz.back() <= 20e3);
    for (size_t i = 0; i < g.bins_hz.size(); ++i)
        CHECK(g.bins_hz[i] == -g.bins_hz[g.bins_hz.size() - 1 - i]);
}

TEST_CASE("every Doppler grid contains an exact zero bin") {
    for (double nu_max : {100.0, 443.0, 5e3, 20e3}) {
        for (double t_obs : {1e-4, 1e-3, 5e-3}) {
            const DopplerGrid g = make_doppler_grid(nu_max, t_obs);
            CHECK(std::count(g.bins_hz.begin(), g.bins_hz.end(), 0.0) == 1);
        }
    }
}

TEST_CASE("nearest_bin rounds to the closest bin, ties toward the smaller value") {
    const SearchGrid g = make_search_grid(4, 1000, 1e-3, kTs);  // bins -886, -443, 0, 443, 886
    REQUIRE(g.num_bins() == 5);
    CHECK(g.nearest_bin(0.0) == 2);
    CHECK(g.zero_bin() == 2);
    CHECK(g.nearest_bin(200.0) == 2);
    CHECK(g.nearest_bin(250.0) == 3);
    CHECK(g.nearest_bin(-5000.0) == 0);
    CHECK(g.nearest_bin(5000.0) == 4);
    CHECK(g.doppler_bins_hz[g.nearest_bin(g.bin_width_hz / 2.0)] == 0.0);  // exact midpoint
}

TEST_CASE("reduced correlator matches the naive definition on random instances") {
    for (uint64_t seed = 0; seed < 20; ++seed) {
        Rng64 rng(derive_seed(777, seed));
        const size_t ns = 8 + rng.next_below(24);
        const int d_max = 2 + static_cast<int>(rng.next_below(5));
        const Pilot pilot = generate_synthetic_pilot(ns, derive_seed(seed, 1));
        const size_t n_obs = ns + d_max + rng.next_below(4);
        const cvec r = random_buffer(n_obs, derive_seed(seed, 2));
        const SearchGrid grid = make_search_grid(d_max, 400.0 + 500.0 * rng.next_double(), 1e-3, kTs);

        CosetPattern pat{4, {0, static_cast<int>(1 + rng.next_below(2))}};
        const SamplingMask mask = make_mask(pat, n_obs);

        const AcquisitionSurface fast = reduced_correlate(r, mask, pilot, grid);
        const NaiveSurface slow = naive_correlate(r, mask, pilot, grid);
        REQUIRE(fast.lambda.size() == slow.lambda.size());
        for (size_t c = 0; c < fast.lambda.size(); ++c) {
            const double scale = std::max(1.0, std::abs(slow.lambda[c]));
            CHECK(std::abs(fast.lambda[c] - slow.lambda[c]) <= 1e-10 * scale);
        }
        for (int d = 0; d <= d_max; ++d)
            CHECK(fast.denom[d] == doctest::Approx(slow.denom[d]).epsilon(1e-12));
    }
}

TEST_CASE("the all-ones mask reduces to the full-rate correlator") {
    const Pilot pilot = generate_synthetic_pilot(32, 3);
    const size_t n_obs = 40;
    const cvec r = random_buffer(n_obs, 11);
    const SearchGrid grid = make_search_grid(8, 1500, 1e-3, kTs);

    const AcquisitionSurface reduced = reduced_correlate(r, ones_mask(n_obs), pilot, grid);
    const AcquisitionSurface full = full_correlate(r, pilot, grid);
    REQUIRE(reduced.lambda.size() == full.lambda.size());
    for (size_t c = 0; c < reduced.lambda.size(); ++c) {
        const double scale = std::max(1.0, std::abs(full.lambda[c]));
        CHECK(std::abs(reduced.lambda[c] - full.lambda[c]) <= 1e-10 * scale);
    }
    CHECK(reduced.mac_count == full.mac_count);
}

TEST_CASE("mac_count sums the retained window overlaps times the bin count") {
    const Pilot pilot = generate_synthetic_pilot(24, 9);
    const int d_max = 6;
    const size_t n_obs = 24 + d_max;
    const cvec r = random_buffer(n_obs, 13);
    const SearchGrid grid = make_search_grid(d_max, 1000, 1e-3, kTs);

    const CosetPattern pat{8, {1, 4, 6}};
    const SamplingMask mask = make_mask(pat, n_obs);
    const AcquisitionSurface surf = reduced_correlate(r, mask, pilot, grid);

    uint64_t expected = 0;
    const auto omega = retained_indices(mask);
    for (int d = 0; d <= d_max; ++d) {
        uint64_t overlap = 0;
        for (int n : omega)
            if (n >= d && n < d + 24) ++overlap;
        expected += overlap * static_cast<uint64_t>(grid.num_bins());
    }
    CHECK(surf.mac_count == expected);
}

TEST_CASE("reduced/full mac ratio equals K/L when the period divides the pilot length") {
    const Pilot pilot = generate_synthetic_pilot(64, 21);  // 8 divides 64
    const int d_max = 8;
    const size_t n_obs = 64 + d_max;
    const cvec r = random_buffer(n_obs, 22);
    const SearchGrid grid = make_search_grid(d_max, 900, 1e-3, kTs);

    const uint64_t full_macs = full_correlate(r, pilot, grid).mac_count;
    const SamplingMask mask = make_mask({8, {2, 3, 4, 5}}, n_obs);
    const uint64_t reduced_macs = reduced_correlate(r, mask, pilot, grid).mac_count;
    CHECK(full_macs == 2 * reduced_macs);  // L/K = 8/4 exactly
}

TEST_CASE("noiseless on-grid signals peak at the true cell with the retained energy") {
    const Pilot pilot = generate_synthetic_pilot(48, 30);
    const int d_max = 10;
    const SearchGrid grid = make_search_grid(d_max, 1500, 1e-3, kTs);
    const size_t n_obs = 48 + d_max;

    for (int trial = 0; trial < 8; ++trial) {
        Rng64 rng(derive_seed(31, trial));
        const int d0 = static_cast<int>(rng.next_below(d_max));
        const int bin = static_cast<int>(rng.next_below(grid.num_bins() - 1));
        SynthesisParams sp;
        sp.delay_samples = d0;
        sp.doppler_hz = grid.doppler_bins_hz[bin];
        sp.sample_period_s = kTs;
        const cvec r = synthesize_received(pilot, sp, n_obs);

        const AcquisitionSurface surf = full_correlate(r, pilot, grid);
        const AcquisitionResult res = glrt_peak(surf);
        CHECK(res.delay_hat == d0);
        CHECK(res.doppler_hat_hz == grid.doppler_bins_hz[bin]);
        CHECK(res.peak_value == doctest::Approx(surf.denom[d0]).epsilon(1e-12));
    }
}

TEST_CASE("matched filtering under the 8/4 pattern keeps the true-delay dominance") {
    const Pilot pilot = generate_synthetic_pilot(64, 17);
    const SearchGrid grid = make_search_grid(3, 100, 1e-3, kTs);  // single 0 Hz bin
    REQUIRE(grid.num_bins() == 1);
    const size_t n_obs = 64 + 3;
    SynthesisParams sp;
    sp.sample_period_s = kTs;
    const cvec r = synthesize_received(pilot, sp, n_obs);

    const SamplingMask mask = make_mask({8, {2, 3, 4, 5}}, n_obs);
    const AcquisitionSurface surf = reduced_correlate(r, mask, pilot, grid);
    CHECK(surf.lambda_at(0, 0) == doctest::Approx(surf.denom[0]).epsilon(1e-12));
    for (int d = 1; d <= 3; ++d) CHECK(surf.lambda_at(0, 0) >= surf.lambda_at(d, 0));
}

TEST_CASE("a zero input yields an all-zero metric") {
    const Pilot pilot = generate_synthetic_pilot(16, 2);
    const SearchGrid grid = make_search_grid(4, 1000, 1e-3, kTs);
    const AcquisitionSurface surf = full_correlate(cvec(20, cplx{0, 0}), pilot, grid);
    for (double v : surf.lambda) CHECK(v == 0.0);
    CHECK(surf.invalid_delays.empty());
}

TEST_CASE("the full-scenario noiseless peak lands exactly on (40, +2 bins)") {
    const Pilot pilot = build_nr_pilot(0, 0, NumerologyConfig{});
    const SearchGrid grid = make_search_grid(64, 20e3, 1e-3, kTs);
    const int bin = grid.zero_bin() + 2;
    SynthesisParams sp;
    sp.delay_samples = 40;
    sp.doppler_hz = grid.doppler_bins_hz[bin];
    sp.sample_period_s = kTs;
    const cvec r = synthesize_received(pilot, sp, 1024 + 64);

    const AcquisitionResult res = glrt_peak(full_correlate(r, pilot, grid));
    CHECK(res.delay_hat == 40);
    CHECK(res.doppler_hat_hz == grid.doppler_bins_hz[bin]);
    CHECK(res.doppler_hat_hz == doctest::Approx(886.0).epsilon(1e-9));
}

TEST_CASE("peak extraction breaks ties by delay, then |doppler|, then sign") {
    SearchGrid grid = make_search_grid(6, 500, 1e-3, kTs);  // bins -443, 0, +443
    REQUIRE(grid.num_bins() == 3);
    AcquisitionSurface surf;
    surf.grid = grid;
    surf.lambda.assign(7 * 3, 0.0);
    surf.denom.assign(7, 1.0);

    SUBCASE("single nonzero cell") {
        surf.lambda[4 * 3 + 0] = 2.5;
        const AcquisitionResult res = glrt_peak(surf);
        CHECK(res.delay_hat == 4);
        CHECK(res.doppler_hat_hz == -443.0);
        CHECK(res.peak_value == 2.5);
    }
    SUBCASE("equal maxima at delays 3 and 5 pick 3") {
        surf.lambda[3 * 3 + 1] = 5.0;
        surf.lambda[5 * 3 + 1] = 5.0;
        const AcquisitionResult res = glrt_peak(surf);
        CHECK(res.delay_hat == 3);
        CHECK(res.doppler_hat_hz == 0.0);
    }
    SUBCASE("equal maxima across bins prefer small |doppler|, negative first") {
        surf.lambda[2 * 3 + 0] = 7.0;
        surf.lambda[2 * 3 + 2] = 7.0;
        CHECK(glrt_peak(surf).doppler_hat_hz == -443.0);
        surf.lambda[2 * 3 + 1] = 7.0;
        CHECK(glrt_peak(surf).doppler_hat_hz == 0.0);
    }
}

TEST_CASE("delays with no retained pilot energy are flagged, not scored") {
    const Pilot pilot = generate_synthetic_pilot(4, 8);
    const size_t n_obs = 8;
    const SearchGrid grid = make_search_grid(4, 100, 1e-3, kTs);
    const cvec r = random_buffer(n_obs, 3);

    SamplingMask tail;
    tail.bits = {0, 0, 0, 0, 0, 0, 1, 1};
    tail.retained_count = 2;
    const AcquisitionSurface surf = reduced_correlate(r, tail, pilot, grid);
    CHECK(surf.invalid_delays == std::vector<int>{0, 1, 2});
    CHECK_FALSE(surf.delay_valid(0));
    CHECK(surf.delay_valid(3));
    CHECK_NOTHROW(glrt_peak(surf));
    CHECK(glrt_peak(surf).delay_hat >= 3);

    SamplingMask none;
    none.bits.assign(n_obs, 0);
    const AcquisitionSurface dead = reduced_correlate(r, none, pilot, grid);
    CHECK(dead.invalid_delays.size() == 5);
    CHECK_FALSE(try_glrt_peak(dead).has_value());
    CHECK_THROWS_AS(glrt_peak(dead), DataError);
}

TEST_CASE("scaling the input moves the peak value, never the argmax") {
    const Pilot pilot = generate_synthetic_pilot(32, 40);
    const SearchGrid grid = make_search_grid(6, 1000, 1e-3, kTs);
    SynthesisParams sp;
    sp.delay_samples = 4;
    sp.doppler_hz = grid.doppler_bins_hz[grid.zero_bin() + 1];
    sp.sample_period_s = kTs;
    sp.noise_variance = 0.5;
    sp.rng_seed = 77;
    const cvec r = synthesize_received(pilot, sp, 40);
    cvec scaled = r;
    const cplx beta{2.0, -3.0};
    for (auto& v : scaled) v *= beta;

    const AcquisitionResult a = glrt_peak(full_correlate(r, pilot, grid));
    const AcquisitionResult b = glrt_peak(full_correlate(scaled, pilot, grid));
    CHECK(a.delay_hat == b.delay_hat);
    CHECK(a.doppler_hat_hz == b.doppler_hat_hz);
    CHECK(b.peak_value == doctest::Approx(std::norm(beta) * a.peak_value).epsilon(1e-10));
}

TEST_CASE("adding Doppler bins never lowers the global maximum") {
    const Pilot pilot = generate_synthetic_pilot(32, 50);
    SynthesisParams sp;
    sp.delay_samples = 2;
    sp.doppler_hz = 700.0;  // off-grid
    sp.sample_period_s = kTs;
    const cvec r = synthesize_received(pilot, sp, 38);

    double previous = 0.0;
    for (double nu_max : {500.0, 1000.0, 2000.0, 4000.0}) {
        const SearchGrid grid = make_search_grid(6, nu_max, 1e-3, kTs);
        const double peak = glrt_peak(full_correlate(r, pilot, grid)).peak_value;
        CHECK(peak >= previous);
        previous = peak;
    }
}

TEST_CASE("worker count never changes the surface") {
    const Pilot pilot = generate_synthetic_pilot(48, 60);
    const SearchGrid grid = make_search_grid(9, 1500, 1e-3, kTs);
    const size_t n_obs = 60;
    const cvec r = random_buffer(n_obs, 61);
    const SamplingMask mask = make_mask({4, {1, 3}}, n_obs);

    CorrelateOptions serial;
    CorrelateOptions parallel;
    parallel.workers = 3;
    const AcquisitionSurface a = reduced_correlate(r, mask, pilot, grid, serial);
    const AcquisitionSurface b = reduced_correlate(r, mask, pilot, grid, parallel);
    CHECK(a.lambda == b.lambda);  // bit-identical, not just close
    CHECK(a.denom == b.denom);
    CHECK(a.mac_count == b.mac_count);
}

TEST_CASE("joint search identifies the transmitted pilot of a family") {
    const NumerologyConfig num{};
    std::vector<Pilot> family = {build_nr_pss_pilot(0, num), build_nr_pss_pilot(1, num),
                                 build_nr_pss_pilot(2, num)};
    const int d_max = 8;
    const size_t n_obs = 256 + d_max;
    const SearchGrid grid = make_search_grid(d_max, 500, 1e-3, kTs);

    SynthesisParams sp;
    sp.delay_samples = 5;
    sp.sample_period_s = kTs;
    const cvec r = synthesize_received(family[2], sp, n_obs);

    const AcquisitionResult joint = joint_search(r, ones_mask(n_obs), family, grid);
    CHECK(joint.pilot_index_hat == 2);
    CHECK(joint.delay_hat == 5);
    CHECK(joint.doppler_hat_hz == 0.0);

    // singleton family reduces to plain peak extraction
    const std::vector<Pilot> single = {family[0]};
    const AcquisitionResult via_joint = joint_search(r, ones_mask(n_obs), single, grid);
    const AcquisitionResult direct = glrt_peak(reduced_correlate(r, ones_mask(n_obs), single[0], grid));
    CHECK(via_joint.delay_hat == direct.delay_hat);
    CHECK(via_joint.doppler_hat_hz == direct.doppler_hat_hz);
    CHECK(via_joint.peak_value == direct.peak_value);
    CHECK(via_joint.mac_count == direct.mac_count);

    // pure noise still yields a well-formed result; thresholding is not this op's job
    const cvec noise = random_buffer(n_obs, 1234);
    const AcquisitionResult blind = joint_search(noise, ones_mask(n_obs), family, grid);
    CHECK(blind.pilot_index_hat >= 0);
    CHECK(blind.pilot_index_hat < 3);

    CHECK_THROWS_AS(joint_search(r, ones_mask(n_obs), {}, grid), std::invalid_argument);
}

TEST_CASE("surface dumps carry one labeled row per grid cell") {
    const Pilot pilot = generate_synthetic_pilot(16, 70);
    const SearchGrid grid = make_search_grid(3, 500, 1e-3, kTs);
    const cvec r = random_buffer(20, 71);
    const AcquisitionSurface surf = full_correlate(r, pilot, grid);

    const std::string path = (std::filesystem::temp_directory_path() / "surface_dump.csv").string();
    dump_surface(surf, path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "d,nu_hz,lambda,d_energy");
    size_t rows = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == static_cast<size_t>(4) * grid.num_bins());
    std::remove(path.c_str());
}

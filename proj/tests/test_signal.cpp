#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mcacq/signal.hpp"

using namespace mcacq;

namespace {

Pilot fixed_pilot(cvec samples) {
    Pilot p;
    p.samples = std::move(samples);
    p.label = "fixed";
    return p;
}

}  // namespace

TEST_CASE("awgn produces exact zeros at zero variance") {
    const cvec w = awgn(0.0, 5, 12345);
    REQUIRE(w.size() == 5);
    for (const cplx& v : w) CHECK(v == cplx{0.0, 0.0});
}

TEST_CASE("awgn rejects negative variance") {
    CHECK_THROWS_AS(awgn(-1.0, 4, 1), std::invalid_argument);
}

TEST_CASE("awgn is deterministic in the seed") {
    const cvec a = awgn(1.0, 100, 42);
    const cvec b = awgn(1.0, 100, 42);
    const cvec c = awgn(1.0, 100, 43);
    CHECK(a == b);
    CHECK(a != c);
}

TEST_CASE("awgn empirical power matches the requested variance within 2%") {
    const size_t n = 1000000;
    for (double sigma2 : {1.0, 0.25}) {
        const cvec w = awgn(sigma2, n, 7);
        double power = 0.0;
        for (const cplx& v : w) power += std::norm(v);
        power /= static_cast<double>(n);
        CHECK(power == doctest::Approx(sigma2).epsilon(0.02));
    }
}

TEST_CASE("synthesize_received with zero delay and Doppler returns the pilot") {
    const Pilot p = fixed_pilot({{1, 0}, {0, 1}, {-1, 0}, {0.5, -0.5}});
    SynthesisParams sp;
    sp.sample_period_s = 1e-6;
    const cvec r = synthesize_received(p, sp, 4);
    REQUIRE(r.size() == 4);
    for (size_t i = 0; i < 4; ++i) CHECK(r[i] == p.samples[i]);
}

TEST_CASE("synthesize_received places a delayed pilot between zero runs") {
    const Pilot p = fixed_pilot({{1, 0}, {2, 0}, {3, 0}, {4, 0}});
    SynthesisParams sp;
    sp.delay_samples = 2;
    sp.sample_period_s = 1e-6;
    const cvec r = synthesize_received(p, sp, 8);
    const cvec expected = {{0, 0}, {0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}, {0, 0}, {0, 0}};
    CHECK(r == expected);
}

TEST_CASE("quarter-rate Doppler rotates an all-ones pilot to [1, j]") {
    const Pilot p = fixed_pilot({{1, 0}, {1, 0}});
    SynthesisParams sp;
    sp.sample_period_s = 1e-3;
    sp.doppler_hz = 1.0 / (4.0 * sp.sample_period_s);
    const cvec r = synthesize_received(p, sp, 2);
    CHECK(r[0].real() == doctest::Approx(1.0));
    CHECK(r[0].imag() == doctest::Approx(0.0));
    CHECK(r[1].real() == doctest::Approx(0.0));
    CHECK(r[1].imag() == doctest::Approx(1.0));
}

TEST_CASE("synthesize_received rejects a window too small for pilot plus delay") {
    const Pilot p = fixed_pilot({{1, 0}, {1, 0}, {1, 0}});
    SynthesisParams sp;
    sp.delay_samples = 2;
    sp.sample_period_s = 1e-6;
    CHECK_THROWS_AS(synthesize_received(p, sp, 4), std::invalid_argument);
    CHECK_NOTHROW(synthesize_received(p, sp, 5));
}

TEST_CASE("noiseless synthesis at delay d equals the zero-delay synthesis shifted") {
    const Pilot p = generate_synthetic_pilot(16, 99);
    SynthesisParams sp;
    sp.sample_period_s = 1e-6;
    sp.doppler_hz = 0.0;
    const cvec base = synthesize_received(p, sp, 24);
    for (int d : {1, 3, 8}) {
        SynthesisParams sd = sp;
        sd.delay_samples = d;
        const cvec shifted = synthesize_received(p, sd, 24);
        for (size_t n = 0; n < 16; ++n)
            CHECK(shifted[n + d] == base[n]);
    }
}

TEST_CASE("Doppler modulation never changes the noiseless sample magnitudes") {
    const Pilot p = generate_synthetic_pilot(32, 5);
    SynthesisParams sp;
    sp.sample_period_s = 1.0 / 3.84e6;
    const cvec ref = synthesize_received(p, sp, 32);
    for (double nu : {443.0, -19935.0, 12345.678}) {
        SynthesisParams sn = sp;
        sn.doppler_hz = nu;
        const cvec r = synthesize_received(p, sn, 32);
        for (size_t n = 0; n < 32; ++n)
            CHECK(std::abs(r[n]) == doctest::Approx(std::abs(ref[n])).epsilon(1e-12));
    }
}

TEST_CASE("snr_to_noise_variance follows the per-sample power convention") {
    Pilot unit = fixed_pilot({{1, 0}, {0, -1}, {-1, 0}, {0, 1}});  // P_s = 1
    CHECK(snr_to_noise_variance(0.0, unit) == doctest::Approx(1.0));
    CHECK(snr_to_noise_variance(10.0, unit) == doctest::Approx(0.1));

    Pilot strong = fixed_pilot({{1, 1}, {1, -1}});  // P_s = 2
    CHECK(snr_to_noise_variance(-3.0, strong) == doctest::Approx(3.9905).epsilon(1e-4));

    Pilot empty = fixed_pilot({{0, 0}, {0, 0}});
    CHECK_THROWS_AS(snr_to_noise_variance(0.0, empty), std::invalid_argument);
}
